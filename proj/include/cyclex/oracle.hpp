#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "cyclex/model.hpp"

namespace cyclex {

/// Budget-bounded exhaustive enumeration result. The truncated sum
/// approaches the true (possibly infinite) sum from below as the budget
/// grows; lowerBound is nondecreasing in budget for a fixed query.
struct MassEstimate {
  double lowerBound = 0.0;
  std::uint64_t budget = 0;
  std::uint64_t runsCounted = 0;  // successful runs summed
};

/// Sums the probabilities of all leftmost derivations that consume `words`
/// under pseudo-success semantics using at most `budget` rule applications.
/// Bypasses graphs and solvers entirely.
MassEstimate oracle_prefix_pcfg(const Grammar& pcfg,
                                std::span<const std::string> words,
                                std::optional<std::string_view> start,
                                std::uint64_t budget);

/// Exact-consumption variant: the derivation must end exactly at the last
/// word. Exact once the budget exceeds the largest derivation size.
MassEstimate oracle_sentence_pcfg(const Grammar& pcfg,
                                  std::span<const std::string> words,
                                  std::optional<std::string_view> start,
                                  std::uint64_t budget);

/// Enumerates left-corner parsing choice sequences with at most `budget`
/// switch draws that consume `words`.
MassEstimate oracle_plcg_prefix(const PlcgModel& plcg,
                                std::span<const std::string> words,
                                std::uint64_t budget);

/// Sums the probabilities of paths from `from` first hitting `to` within
/// `budget` transitions.
MassEstimate oracle_reach(const MarkovChain& chain, std::string_view from,
                          std::string_view to, std::uint64_t budget);

}  // namespace cyclex
