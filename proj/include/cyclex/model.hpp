#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cyclex/errors.hpp"
#include "cyclex/symbols.hpp"

namespace cyclex {

/// One production rule. `prob` is the selection probability; plain CFGs
/// (used for PLCG models) carry 1.0 placeholders that are never read.
struct Rule {
  SymbolId lhs;
  std::vector<SymbolId> rhs;  // nonempty: no epsilon rules
  double prob = 1.0;
};

/// Raw result of parsing a grammar file, before semantic validation.
/// Terminal/nonterminal kinds are inferred from LHS occurrence.
struct GrammarFile {
  std::shared_ptr<SymbolTable> symbols;
  SymbolId start = 0;
  bool startDeclared = false;
  std::vector<Rule> rules;
  bool hasProbabilities = false;   // true iff every rule line carried ": p"
  std::vector<SymbolId> plans;     // "plan" declarations, in file order
};

/// Parses the line-oriented grammar format:
///   start <nonterminal>
///   <lhs> -> <sym> <sym> ... [: <prob>]
///   plan <nonterminal>
/// '#' starts a comment. Throws ModelError with a line number on bad syntax.
/// Rule lines must uniformly carry probabilities or uniformly omit them.
GrammarFile parse_grammar_file(std::string_view text);

/// A validated grammar. When `probabilistic()` is true the per-lhs rule
/// probabilities sum to 1 within 1e-9 and every probability lies in (0,1].
/// Either way the grammar is epsilon-free, has no useless nonterminal, and
/// its start symbol is a nonterminal. Immutable after construction.
class Grammar {
 public:
  const SymbolTable& symbols() const { return *symbols_; }
  std::shared_ptr<const SymbolTable> symbolsPtr() const { return symbols_; }
  SymbolId start() const { return start_; }
  bool probabilistic() const { return probabilistic_; }
  const std::vector<Rule>& rules() const { return rules_; }
  std::span<const std::uint32_t> rulesFor(SymbolId lhs) const;
  bool isNonterminal(SymbolId s) const { return s < nonterminal_.size() && nonterminal_[s]; }
  /// Terminal ids in first-appearance order.
  const std::vector<SymbolId>& terminals() const { return terminals_; }
  const std::vector<SymbolId>& nonterminals() const { return nonterminals_; }

  static Grammar validate(GrammarFile file, bool probabilistic);

 private:
  friend class PlcgModel;  // owns an empty Grammar until make_plcg fills it
  Grammar() = default;
  std::shared_ptr<const SymbolTable> symbols_;
  SymbolId start_ = 0;
  bool probabilistic_ = false;
  std::vector<Rule> rules_;
  std::map<SymbolId, std::vector<std::uint32_t>> byLhs_;
  std::vector<bool> nonterminal_;
  std::vector<SymbolId> terminals_;
  std::vector<SymbolId> nonterminals_;
};

/// Parses and validates a PCFG. Validation failures are reported, never
/// silently repaired: per-lhs probability sums must be 1 within 1e-9 and
/// no renormalization is performed.
Grammar parse_pcfg(std::string_view text);

/// Parses and validates a bare CFG (rule lines without probabilities).
Grammar parse_cfg(std::string_view text);

/// Nonterminals that are non-productive (derive no terminal string) or do
/// not occur in any sentence derivation from `start`. Two least fixpoints:
/// productivity first, then reachability through productive rules only.
/// Works on raw, unvalidated rule sets.
std::set<SymbolId> detect_useless(std::span<const Rule> rules, SymbolId start);

/// Transitive closure of { (X, Y) | X -> Y beta is a rule }.
class LeftCornerRelation {
 public:
  explicit LeftCornerRelation(std::map<SymbolId, std::set<SymbolId>> pairs)
      : pairs_(std::move(pairs)) {}

  bool contains(SymbolId x, SymbolId y) const {
    auto it = pairs_.find(x);
    return it != pairs_.end() && it->second.count(y) > 0;
  }
  /// Left corners of `x`, empty set if none.
  const std::set<SymbolId>& corners(SymbolId x) const;
  /// True iff some X has X ->L X.
  bool cyclic() const;
  const std::map<SymbolId, std::set<SymbolId>>& pairs() const { return pairs_; }

 private:
  std::map<SymbolId, std::set<SymbolId>> pairs_;
};

LeftCornerRelation left_corner_closure(std::span<const Rule> rules);

/// first(G) = { terminal t | (G, t) in the left-corner closure }, per
/// nonterminal.
std::map<SymbolId, std::set<SymbolId>> first_sets(std::span<const Rule> rules);

/// Probabilistic left-corner model: per-switch distributions over the
/// shift/attach/project choices of bottom-up left-corner parsing.
class PlcgModel {
 public:
  struct LcEntry {
    std::uint32_t rule;  // index into cfg().rules()
    double prob;
  };

  const Grammar& cfg() const { return cfg_; }
  const LeftCornerRelation& leftCorner() const { return lc_; }

  /// first(G) distribution; keys are terminals, pairs ordered by id.
  const std::vector<std::pair<SymbolId, double>>& firstDist(SymbolId g) const;
  bool hasFirstDist(SymbolId g) const { return firstDist_.count(g) > 0; }

  /// lc(G, b) distribution over rules A -> b gamma with G = A or G ->L A.
  const std::vector<LcEntry>& lcDist(SymbolId g, SymbolId b) const;
  bool hasLcDist(SymbolId g, SymbolId b) const { return lcDist_.count({g, b}) > 0; }

  /// att(A) distribution; present only when (A, A) is in the left-corner
  /// relation. Otherwise attach is forced with probability 1.
  bool hasAttDist(SymbolId a) const { return attDist_.count(a) > 0; }
  double attProb(SymbolId a, bool attach) const;

  friend PlcgModel make_plcg(const Grammar& cfg, std::string_view overridesText);

 private:
  Grammar cfg_;
  LeftCornerRelation lc_{{}};
  std::map<SymbolId, std::vector<std::pair<SymbolId, double>>> firstDist_;
  std::map<std::pair<SymbolId, SymbolId>, std::vector<LcEntry>> lcDist_;
  std::map<SymbolId, std::pair<double, double>> attDist_;  // (att, pro)
};

/// Builds a PLCG model with every switch equiprobable over its outcome set,
/// then applies overrides from the parameter file text (may be empty):
///   first <G> <terminal> <prob>
///   lc <G> <b> <A> -> <sym> ... : <prob>
///   att <G> att <prob> | att <G> pro <prob>
/// Overridden switches must still sum to 1 within 1e-9; no renormalization.
PlcgModel make_plcg(const Grammar& cfg, std::string_view overridesText = {});

/// Discrete Markov chain; states are implicit in the transition list.
/// States with no outgoing edges are absorbing.
class MarkovChain {
 public:
  const SymbolTable& states() const { return *states_; }
  std::shared_ptr<const SymbolTable> statesPtr() const { return states_; }
  std::size_t stateCount() const { return trans_.size(); }
  /// Outgoing transitions of `s` in file order.
  const std::vector<std::pair<SymbolId, double>>& transitions(SymbolId s) const {
    return trans_.at(s);
  }

  friend MarkovChain parse_markov_chain(std::string_view text);

 private:
  std::shared_ptr<const SymbolTable> states_;
  std::vector<std::vector<std::pair<SymbolId, double>>> trans_;
};

/// Parses "trans <from> <to> <prob>" lines; per-state sums must be 1 within
/// 1e-9 except for absorbing states.
MarkovChain parse_markov_chain(std::string_view text);

/// A PCFG whose start symbol has only unit rules S -> y, plus the declared
/// set of plan nonterminals y.
class PlanModel {
 public:
  const Grammar& pcfg() const { return *pcfg_; }
  std::shared_ptr<const Grammar> pcfgPtr() const { return pcfg_; }
  const std::vector<SymbolId>& plans() const { return plans_; }
  /// Selection probability of S -> plan.
  double planPrior(SymbolId plan) const;

  friend PlanModel parse_plan_model(std::string_view text);

 private:
  std::shared_ptr<const Grammar> pcfg_;
  std::vector<SymbolId> plans_;
};

/// Parses a grammar file with "plan" declarations. Every start rule must be
/// a unit rule S -> y to a nonterminal, every declared plan must be a
/// nonterminal with such a rule, and at least one plan must be declared.
PlanModel parse_plan_model(std::string_view text);

}  // namespace cyclex
