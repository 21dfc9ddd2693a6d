#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "cyclex/explgraph.hpp"
#include "cyclex/model.hpp"

namespace cyclex {

/// Top-down PCFG parser with pseudo success: succeeds as soon as the input
/// words are consumed, even with nonterminals pending. Root is the query
/// wrapper over ([start], 0, N). Words outside the terminal vocabulary
/// yield an unprovable root, not an error; an empty word sequence is
/// rejected with QueryError.
std::unique_ptr<DerivationEngine> pcfg_prefix_engine(
    std::shared_ptr<const Grammar> pcfg, std::span<const std::string> words,
    std::optional<std::string_view> start = std::nullopt);

/// Same expansion without the pseudo-success shortcut: success requires
/// exact consumption of the words as a sentence.
std::unique_ptr<DerivationEngine> pcfg_sentence_engine(
    std::shared_ptr<const Grammar> pcfg, std::span<const std::string> words,
    std::optional<std::string_view> start = std::nullopt);

/// Bottom-up left-corner parser over shift/attach/project switches,
/// with pseudo success once the words are consumed.
std::unique_ptr<DerivationEngine> plcg_prefix_engine(
    std::shared_ptr<const PlcgModel> plcg, std::span<const std::string> words);

/// reach(from, to): probability of ever reaching `to` from `from`.
/// Unknown state names are rejected with QueryError.
std::unique_ptr<DerivationEngine> markov_reach_engine(
    std::shared_ptr<const MarkovChain> chain, std::string_view from,
    std::string_view to);

}  // namespace cyclex
