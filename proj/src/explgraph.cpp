#include "cyclex/explgraph.hpp"

#include <deque>
#include <sstream>

#include "cyclex/errors.hpp"

namespace cyclex {

ExplanationGraph::ExplanationGraph(std::shared_ptr<const SymbolTable> symbols,
                                   std::vector<DefiningFormula> formulas)
    : symbols_(std::move(symbols)), formulas_(std::move(formulas)) {
  for (std::uint32_t i = 0; i < formulas_.size(); ++i)
    index_.emplace(formulas_[i].head, i);
}

std::optional<std::uint32_t> ExplanationGraph::indexOf(const Goal& goal) const {
  auto it = index_.find(goal);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

struct Explored {
  std::vector<Goal> goals;  // discovery order
  std::vector<std::vector<Alternative>> alts;
  std::unordered_map<Goal, std::uint32_t, GoalHash> index;
};

Explored explore(const DerivationEngine& engine, const BuildOptions& options) {
  Explored ex;
  auto intern = [&](const Goal& g) -> std::uint32_t {
    auto it = ex.index.find(g);
    if (it != ex.index.end()) return it->second;
    if (ex.goals.size() >= options.maxGoals)
      throw BudgetError("goal-universe budget of " + std::to_string(options.maxGoals) +
                        " goals exceeded");
    std::uint32_t id = static_cast<std::uint32_t>(ex.goals.size());
    ex.goals.push_back(g);
    ex.index.emplace(g, id);
    return id;
  };

  intern(engine.root());
  for (std::uint32_t next = 0; next < ex.goals.size(); ++next) {
    std::vector<Alternative> raw = engine.expand(ex.goals[next]);
    std::vector<Alternative> alts;
    for (auto& alt : raw) {
      // one defining clause per ground instance: drop duplicates
      bool dup = false;
      for (const auto& kept : alts)
        if (kept == alt) { dup = true; break; }
      if (dup) continue;
      for (const Goal& sub : alt.subgoals) intern(sub);
      alts.push_back(std::move(alt));
    }
    ex.alts.push_back(std::move(alts));
  }
  return ex;
}

std::vector<bool> provable(const Explored& ex) {
  std::size_t n = ex.goals.size();
  std::vector<bool> proved(n, false);
  // worklist least fixpoint: per (goal, alternative) count of unproven
  // subgoal occurrences, with reverse edges from each occurrence
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> dependents(n);
  std::vector<std::vector<std::uint32_t>> remaining(n);
  std::deque<std::uint32_t> queue;
  for (std::uint32_t i = 0; i < n; ++i) {
    remaining[i].resize(ex.alts[i].size());
    for (std::uint32_t a = 0; a < ex.alts[i].size(); ++a) {
      const auto& alt = ex.alts[i][a];
      remaining[i][a] = static_cast<std::uint32_t>(alt.subgoals.size());
      if (alt.subgoals.empty()) {
        if (!proved[i]) { proved[i] = true; queue.push_back(i); }
      } else {
        for (const Goal& sub : alt.subgoals)
          dependents[ex.index.at(sub)].push_back({i, a});
      }
    }
  }
  while (!queue.empty()) {
    std::uint32_t s = queue.front();
    queue.pop_front();
    for (auto [g, a] : dependents[s]) {
      if (--remaining[g][a] == 0 && !proved[g]) {
        proved[g] = true;
        queue.push_back(g);
      }
    }
  }
  return proved;
}

}  // namespace

std::optional<ExplanationGraph> build_graph(const DerivationEngine& engine,
                                            const BuildOptions& options) {
  Explored ex = explore(engine, options);
  std::vector<bool> proved = provable(ex);
  if (!proved[0]) return std::nullopt;

  // rediscover from the root over proved goals only; this drops goals that
  // were referenced solely from deleted alternatives
  std::vector<DefiningFormula> formulas;
  std::unordered_map<Goal, std::uint32_t, GoalHash> seen;
  std::deque<std::uint32_t> queue;
  seen.emplace(ex.goals[0], 0);
  queue.push_back(0);
  while (!queue.empty()) {
    std::uint32_t id = queue.front();
    queue.pop_front();
    DefiningFormula f;
    f.head = ex.goals[id];
    for (const auto& alt : ex.alts[id]) {
      bool live = true;
      for (const Goal& sub : alt.subgoals)
        if (!proved[ex.index.at(sub)]) { live = false; break; }
      if (!live) continue;
      for (const Goal& sub : alt.subgoals) {
        if (!seen.count(sub)) {
          seen.emplace(sub, static_cast<std::uint32_t>(seen.size()));
          queue.push_back(ex.index.at(sub));
        }
      }
      f.alternatives.push_back(alt);
    }
    formulas.push_back(std::move(f));
  }
  return ExplanationGraph(engine.symbols(), std::move(formulas));
}

bool is_cyclic(const ExplanationGraph& graph) {
  std::size_t n = graph.size();
  std::vector<std::vector<std::uint32_t>> edges(n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (const auto& alt : graph.formula(i).alternatives)
      for (const Goal& sub : alt.subgoals) edges[i].push_back(*graph.indexOf(sub));

  std::vector<int> color(n, 0);  // 0 white, 1 on stack, 2 done
  std::vector<std::pair<std::uint32_t, std::size_t>> stack;
  for (std::uint32_t start = 0; start < n; ++start) {
    if (color[start]) continue;
    stack.push_back({start, 0});
    color[start] = 1;
    while (!stack.empty()) {
      auto [node, edge] = stack.back();
      if (edge == edges[node].size()) {
        color[node] = 2;
        stack.pop_back();
        continue;
      }
      ++stack.back().second;
      std::uint32_t target = edges[node][edge];
      if (color[target] == 1) return true;
      if (color[target] == 0) {
        color[target] = 1;
        stack.push_back({target, 0});
      }
    }
  }
  return false;
}

std::string dump_graph(const ExplanationGraph& graph) {
  std::ostringstream out;
  const SymbolTable& syms = graph.symbols();
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const DefiningFormula& f = graph.formula(i);
    out << to_string(f.head, syms);
    bool bareFact = f.alternatives.size() == 1 && f.alternatives[0].subgoals.empty() &&
                    f.alternatives[0].choices.empty();
    if (!bareFact) {
      out << " <=> ";
      for (std::size_t a = 0; a < f.alternatives.size(); ++a) {
        if (a) out << " v ";
        const Alternative& alt = f.alternatives[a];
        bool firstConj = true;
        for (const Goal& sub : alt.subgoals) {
          if (!firstConj) out << " & ";
          out << to_string(sub, syms);
          firstConj = false;
        }
        for (const SwitchChoice& c : alt.choices) {
          if (!firstConj) out << " & ";
          out << "msw(" << c.switchId << ',' << c.outcome << ')';
          firstConj = false;
        }
        if (firstConj) out << "true";
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace cyclex
