#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cyclex/engines.hpp"
#include "cyclex/eqsolve.hpp"

namespace cyclex {

struct SolveOptions {
  SolveMethod solver = SolveMethod::stratifiedLinear;
  double tol = 1e-10;
  std::uint64_t maxIter = 1'000'000;
  BuildOptions build;
};

struct QueryResult {
  double probability = 0.0;
  bool provable = false;
  bool cyclic = false;
  std::uint32_t sccCount = 0;
  SolveMethod solver = SolveMethod::stratifiedLinear;
  std::optional<std::uint64_t> iterations;  // fixpoint only
  bool converged = true;
  /// False when the graph violated linearity and the stratified solver
  /// fell back to fixpoint iteration.
  bool linear = true;
};

/// Full pipeline over an arbitrary engine: build, assemble, decompose,
/// solve. Keeps the intermediate artifacts for dumps and diagnostics;
/// graph/system/solution are empty when the root is unprovable.
struct QueryArtifacts {
  QueryResult result;
  std::optional<ExplanationGraph> graph;
  std::optional<EquationSystem> system;
  std::optional<SccDecomposition> sccs;
  std::optional<Solution> solution;
};

QueryArtifacts run_query(const DerivationEngine& engine,
                         const SolveOptions& options = {});

/// Probability that a sentence of the grammar extends `words`.
QueryResult prefix_probability(std::shared_ptr<const Grammar> pcfg,
                               std::span<const std::string> words,
                               std::optional<std::string_view> start = std::nullopt,
                               const SolveOptions& options = {});

/// Probability of `words` as a complete sentence.
QueryResult sentence_probability(std::shared_ptr<const Grammar> pcfg,
                                 std::span<const std::string> words,
                                 std::optional<std::string_view> start = std::nullopt,
                                 const SolveOptions& options = {});

QueryResult plcg_prefix_probability(std::shared_ptr<const PlcgModel> plcg,
                                    std::span<const std::string> words,
                                    const SolveOptions& options = {});

/// For every terminal w with positive continuation mass:
/// P(w | u) = P_prefix(u w) / P_prefix(u), ranked descending, ties broken
/// lexicographically. Throws QueryError when P_prefix(u) is zero.
std::vector<std::pair<std::string, double>> conditional_next(
    std::shared_ptr<const Grammar> pcfg, std::span<const std::string> words,
    std::optional<std::string_view> start = std::nullopt,
    const SolveOptions& options = {});

/// Joint probability prior(y) * P_prefix(actions from y) for every declared
/// plan y, ranked descending, ties lexicographic. All-zero results are
/// permitted and listed.
std::vector<std::pair<std::string, double>> recognize_plan(
    std::shared_ptr<const PlanModel> model, std::span<const std::string> actions,
    const SolveOptions& options = {});

QueryResult reach_probability(std::shared_ptr<const MarkovChain> chain,
                              std::string_view from, std::string_view to,
                              const SolveOptions& options = {});

}  // namespace cyclex
