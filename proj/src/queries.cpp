#include "cyclex/queries.hpp"

#include <algorithm>

#include "cyclex/errors.hpp"

namespace cyclex {

namespace {

void rankDescending(std::vector<std::pair<std::string, double>>& entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
}

}  // namespace

QueryArtifacts run_query(const DerivationEngine& engine, const SolveOptions& options) {
  QueryArtifacts art;
  art.result.solver = options.solver;
  auto graph = build_graph(engine, options.build);
  if (!graph) return art;  // unprovable: probability 0 over the empty graph

  art.graph = std::move(*graph);
  art.system = assemble(*art.graph);
  art.sccs = decompose_scc(*art.system);
  auto linearity = check_linearity(*art.system, *art.sccs);
  art.result.linear = linearity.ok;

  Solution sol;
  if (options.solver == SolveMethod::stratifiedLinear && linearity.ok)
    sol = solve_stratified(*art.system, *art.sccs);
  else
    sol = solve_fixpoint(*art.system, {options.tol, options.maxIter});

  art.result.provable = true;
  art.result.probability = sol.values[art.system->root()];
  art.result.sccCount = static_cast<std::uint32_t>(art.sccs->strata.size());
  art.result.cyclic =
      std::any_of(art.sccs->selfRecursive.begin(), art.sccs->selfRecursive.end(),
                  [](bool b) { return b; });
  art.result.solver = sol.method;
  if (sol.method == SolveMethod::fixpoint) art.result.iterations = sol.iterations;
  art.result.converged = sol.converged;
  art.solution = std::move(sol);
  return art;
}

QueryResult prefix_probability(std::shared_ptr<const Grammar> pcfg,
                               std::span<const std::string> words,
                               std::optional<std::string_view> start,
                               const SolveOptions& options) {
  auto engine = pcfg_prefix_engine(std::move(pcfg), words, start);
  return run_query(*engine, options).result;
}

QueryResult sentence_probability(std::shared_ptr<const Grammar> pcfg,
                                 std::span<const std::string> words,
                                 std::optional<std::string_view> start,
                                 const SolveOptions& options) {
  auto engine = pcfg_sentence_engine(std::move(pcfg), words, start);
  return run_query(*engine, options).result;
}

QueryResult plcg_prefix_probability(std::shared_ptr<const PlcgModel> plcg,
                                    std::span<const std::string> words,
                                    const SolveOptions& options) {
  auto engine = plcg_prefix_engine(std::move(plcg), words);
  return run_query(*engine, options).result;
}

std::vector<std::pair<std::string, double>> conditional_next(
    std::shared_ptr<const Grammar> pcfg, std::span<const std::string> words,
    std::optional<std::string_view> start, const SolveOptions& options) {
  QueryResult base = prefix_probability(pcfg, words, start, options);
  if (!(base.probability > 0.0)) throw QueryError("zero-probability prefix");

  std::vector<std::string> extended(words.begin(), words.end());
  extended.emplace_back();
  std::vector<std::pair<std::string, double>> ranking;
  for (SymbolId t : pcfg->terminals()) {
    extended.back() = pcfg->symbols().name(t);
    QueryResult r = prefix_probability(pcfg, extended, start, options);
    if (r.probability > 0.0)
      ranking.emplace_back(extended.back(), r.probability / base.probability);
  }
  rankDescending(ranking);
  return ranking;
}

std::vector<std::pair<std::string, double>> recognize_plan(
    std::shared_ptr<const PlanModel> model, std::span<const std::string> actions,
    const SolveOptions& options) {
  std::vector<std::pair<std::string, double>> ranking;
  for (SymbolId plan : model->plans()) {
    const std::string& name = model->pcfg().symbols().name(plan);
    double prior = model->planPrior(plan);
    QueryResult r = prefix_probability(model->pcfgPtr(), actions, name, options);
    ranking.emplace_back(name, prior * r.probability);
  }
  rankDescending(ranking);
  return ranking;
}

QueryResult reach_probability(std::shared_ptr<const MarkovChain> chain,
                              std::string_view from, std::string_view to,
                              const SolveOptions& options) {
  auto engine = markov_reach_engine(std::move(chain), from, to);
  return run_query(*engine, options).result;
}

}  // namespace cyclex
