#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cyclex/goal.hpp"
#include "cyclex/symbols.hpp"

namespace cyclex {

/// One probabilistic switch outcome used by a proof step.
struct SwitchChoice {
  std::string switchId;
  std::string outcome;
  double prob = 1.0;
  bool operator==(const SwitchChoice&) const = default;
};

/// One defining clause body: a conjunction of subgoals and switch choices.
/// An empty alternative denotes a logically proved fact.
struct Alternative {
  std::vector<Goal> subgoals;
  std::vector<SwitchChoice> choices;
  bool operator==(const Alternative&) const = default;
};

/// H <=> alt_1 v ... v alt_M. Alternatives are mutually exclusive by the
/// generative exclusiveness of the engines; this is assumed, not verified.
struct DefiningFormula {
  Goal head;
  std::vector<Alternative> alternatives;
};

/// Supplies the expansion semantics for one query: a pure, deterministic
/// map from a ground goal to its finite set of candidate proof alternatives.
class DerivationEngine {
 public:
  virtual ~DerivationEngine() = default;
  virtual Goal root() const = 0;
  virtual std::vector<Alternative> expand(const Goal& goal) const = 0;
  /// Table used to render goals of this engine.
  virtual std::shared_ptr<const SymbolTable> symbols() const = 0;
};

struct BuildOptions {
  /// Cap on distinct goals explored; exceeding it raises BudgetError.
  std::size_t maxGoals = 10'000'000;
};

/// Closed mapping from provable goals to defining formulas; may be cyclic.
/// Formula order is first-discovery order from the root (breadth first),
/// so formula(0).head is the root.
class ExplanationGraph {
 public:
  ExplanationGraph(std::shared_ptr<const SymbolTable> symbols,
                   std::vector<DefiningFormula> formulas);

  const Goal& root() const { return formulas_.front().head; }
  std::size_t size() const { return formulas_.size(); }
  const DefiningFormula& formula(std::size_t i) const { return formulas_.at(i); }
  std::optional<std::uint32_t> indexOf(const Goal& goal) const;
  const SymbolTable& symbols() const { return *symbols_; }

 private:
  std::shared_ptr<const SymbolTable> symbols_;
  std::vector<DefiningFormula> formulas_;
  std::unordered_map<Goal, std::uint32_t, GoalHash> index_;
};

/// Tabled all-proof search as an explore-then-prune closure: first the set
/// of goals reachable from the root under expand(), then the least fixpoint
/// of provability; unprovable goals and alternatives mentioning them are
/// deleted. Returns nullopt when the root itself is unprovable.
std::optional<ExplanationGraph> build_graph(const DerivationEngine& engine,
                                            const BuildOptions& options = {});

/// True iff some goal is its own ancestor through subgoal edges.
bool is_cyclic(const ExplanationGraph& graph);

/// Deterministic text dump: one line per goal in discovery order,
/// "head <=> alt v alt", conjuncts joined by " & ", choices rendered
/// msw(<switch>,<outcome>); facts print as a bare head line.
std::string dump_graph(const ExplanationGraph& graph);

}  // namespace cyclex
