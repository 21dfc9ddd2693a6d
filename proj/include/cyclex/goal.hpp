#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "cyclex/symbols.hpp"

namespace cyclex {

/// Ground call pattern of the top-down parsers. Positions index into the
/// query word sequence and encode the d-list of the clause head: a span
/// goal states "this symbol stack derives words[begin..end) exactly" (end
/// < N) or "derives a string whose prefix is words[begin..N)" (end == N,
/// prefix mode). The query form is the top wrapper and prints the words.
struct ParseGoal {
  enum class Mode : std::uint8_t { prefix, sentence };
  enum class Form : std::uint8_t { query, span };
  Mode mode = Mode::prefix;
  Form form = Form::span;
  std::vector<SymbolId> symbols;  // span: pending stack; query: the words
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  bool operator==(const ParseGoal&) const = default;
};

/// Ground call pattern of the left-corner parser, mirroring g_call/3,
/// lc_call/4 and att_or_pro/2.
struct PlcgGoal {
  enum class Kind : std::uint8_t { query, g_call, lc_call, att_or_pro };
  Kind kind = Kind::query;
  std::vector<SymbolId> symbols;  // g_call stack, or the words for query
  SymbolId g = 0;                 // lc_call goal symbol
  SymbolId b = 0;                 // lc_call current left corner
  SymbolId a = 0;                 // att_or_pro subject
  bool attach = false;            // att_or_pro operation
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  bool operator==(const PlcgGoal&) const = default;
};

/// Ground reachability query between two chain states.
struct ReachGoal {
  SymbolId from = 0;
  SymbolId to = 0;
  bool operator==(const ReachGoal&) const = default;
};

using Goal = std::variant<ParseGoal, PlcgGoal, ReachGoal>;

struct GoalHash {
  std::size_t operator()(const Goal& g) const;
};

/// Canonical printable form, e.g. pre_pcfg([s,s],0,1), g_call([s],1,2),
/// lc_call(s,a,1,2), att_or_pro(s,pro), reach(s0,s3).
std::string to_string(const Goal& goal, const SymbolTable& symbols);

}  // namespace cyclex
