#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cyclex/oracle.hpp"
#include "cyclex/queries.hpp"
#include "cyclex/util.hpp"

namespace {

using nlohmann::json;
using namespace cyclex;

struct CommonOpts {
  std::string solver = "stratified-linear";
  double tol = 1e-10;
  std::uint64_t maxIter = 1'000'000;
  bool jsonOut = false;
  std::string start;
  std::string dumpGraph;
  std::string dumpEquations;
  std::int64_t oracleBudget = -1;
  std::string batch;
};

void addCommon(CLI::App* cmd, CommonOpts& c, bool hasStart, bool batchable) {
  cmd->add_option("--solver", c.solver, "stratified-linear or fixpoint")
      ->check(CLI::IsMember({"stratified-linear", "fixpoint"}));
  cmd->add_option("--tol", c.tol, "fixpoint convergence tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", c.maxIter, "fixpoint iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--json", c.jsonOut, "machine-readable output");
  if (hasStart) cmd->add_option("--start", c.start, "start symbol override");
  cmd->add_option("--dump-graph", c.dumpGraph, "write the explanation graph here");
  cmd->add_option("--dump-equations", c.dumpEquations, "write the equations here");
  cmd->add_option("--oracle-check", c.oracleBudget,
                  "cross-check with the enumeration oracle at this budget");
  if (batchable)
    cmd->add_option("--batch", c.batch, "file of queries, one word sequence per line");
}

SolveOptions toOptions(const CommonOpts& c) {
  SolveOptions o;
  o.solver = c.solver == "fixpoint" ? SolveMethod::fixpoint
                                    : SolveMethod::stratifiedLinear;
  o.tol = c.tol;
  o.maxIter = c.maxIter;
  return o;
}

std::vector<std::string> splitWords(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

std::string readFile(const std::string& path, const char* kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(std::string("cannot read ") + kind + " file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void writeFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file " + path);
  out << content;
}

const char* solverName(SolveMethod m) {
  return m == SolveMethod::fixpoint ? "fixpoint" : "stratified-linear";
}

json resultJson(const std::string& query, const QueryResult& r,
                std::optional<double> oracle) {
  json j;
  j["query"] = query;
  j["probability"] = r.probability;
  j["cyclic"] = r.cyclic;
  j["scc_count"] = r.sccCount;
  j["solver"] = solverName(r.solver);
  j["iterations"] = r.iterations ? json(*r.iterations) : json(nullptr);
  j["converged"] = r.converged;
  j["oracle_lower_bound"] = oracle ? json(*oracle) : json(nullptr);
  return j;
}

void printHuman(const QueryResult& r, std::optional<double> oracle) {
  std::printf("probability %.12g\n", r.probability);
  std::printf("cyclic %s\n", r.cyclic ? "true" : "false");
  std::printf("scc_count %u\n", r.sccCount);
  std::printf("solver %s\n", solverName(r.solver));
  if (r.iterations) std::printf("iterations %llu\n", (unsigned long long)*r.iterations);
  std::printf("converged %s\n", r.converged ? "true" : "false");
  if (oracle) {
    std::printf("oracle_lower_bound %.12g\n", *oracle);
    std::printf("oracle_gap %.12g\n", r.probability - *oracle);
  }
}

void maybeDump(const CommonOpts& c, const QueryArtifacts& art) {
  if (!c.dumpGraph.empty())
    writeFile(c.dumpGraph, art.graph ? dump_graph(*art.graph) : std::string());
  if (!c.dumpEquations.empty())
    writeFile(c.dumpEquations, art.system ? dump_equations(*art.system) : std::string());
}

int finish(const CommonOpts& c, const std::string& query, const QueryResult& r,
           std::optional<double> oracle) {
  if (c.jsonOut)
    std::cout << resultJson(query, r, oracle).dump() << '\n';
  else
    printHuman(r, oracle);
  if (!r.converged) {
    std::cerr << "error[solver]: fixpoint did not converge within "
              << c.maxIter << " iterations\n";
    return 3;
  }
  return 0;
}

std::optional<std::string_view> startOf(const CommonOpts& c) {
  if (c.start.empty()) return std::nullopt;
  return std::string_view(c.start);
}

int runBatch(const CommonOpts& c, const std::string& queryName,
             const std::function<QueryResult(const std::vector<std::string>&)>& one) {
  std::istringstream in(readFile(c.batch, "batch"));
  std::string line;
  json results = json::array();
  int rc = 0;
  while (std::getline(in, line)) {
    auto words = splitWords(line);
    if (words.empty()) continue;
    QueryResult r = one(words);
    if (!r.converged) rc = 3;
    if (c.jsonOut) {
      std::string q = queryName + "(" + line + ")";
      results.push_back(resultJson(q, r, std::nullopt));
    } else {
      std::printf("%.12g\t%s\n", r.probability, line.c_str());
    }
  }
  if (c.jsonOut) {
    json j;
    j["query"] = queryName + "-batch";
    j["results"] = results;
    std::cout << j.dump() << '\n';
  }
  if (rc != 0)
    std::cerr << "error[solver]: fixpoint did not converge on some batch entries\n";
  return rc;
}

int rankedOutput(const CommonOpts& c, const std::string& query, const char* rowTag,
                 const std::vector<std::pair<std::string, double>>& ranking,
                 const QueryResult& base, std::optional<double> oracle) {
  if (c.jsonOut) {
    json j = resultJson(query, base, oracle);
    j["probability"] = ranking.empty() ? 0.0 : ranking.front().second;
    json rows = json::array();
    for (const auto& [name, p] : ranking) rows.push_back(json::array({name, p}));
    j["ranking"] = rows;
    std::cout << j.dump() << '\n';
  } else {
    for (const auto& [name, p] : ranking)
      std::printf("%s %s %.12g\n", rowTag, name.c_str(), p);
    printHuman(base, oracle);
  }
  return base.converged ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"probabilities that are infinite sums, via cyclic explanation graphs"};
  app.require_subcommand(1);

  CommonOpts prefixC, sentenceC, nextC, planC, plcgC, reachC;
  std::string grammarPath, prefixArg, sentenceArg, actionsArg, paramsPath, chainPath;
  std::string fromState, toState;
  bool normalize = false;

  auto* prefixCmd = app.add_subcommand("prefix-prob", "prefix probability of a PCFG");
  prefixCmd->add_option("--grammar", grammarPath, "PCFG file")->required();
  prefixCmd->add_option("--prefix", prefixArg, "whitespace-separated words");
  addCommon(prefixCmd, prefixC, true, true);

  auto* sentenceCmd = app.add_subcommand("sentence-prob", "sentence probability of a PCFG");
  sentenceCmd->add_option("--grammar", grammarPath, "PCFG file")->required();
  sentenceCmd->add_option("--sentence", sentenceArg, "whitespace-separated words");
  addCommon(sentenceCmd, sentenceC, true, true);

  auto* nextCmd = app.add_subcommand("next-symbol", "rank the likely next words");
  nextCmd->add_option("--grammar", grammarPath, "PCFG file")->required();
  nextCmd->add_option("--prefix", prefixArg, "whitespace-separated words")->required();
  addCommon(nextCmd, nextC, true, false);

  auto* planCmd = app.add_subcommand("plan-recognize", "rank plans for an action sequence");
  planCmd->add_option("--grammar", grammarPath, "plan PCFG file with plan declarations")
      ->required();
  planCmd->add_option("--actions", actionsArg, "whitespace-separated actions")->required();
  planCmd->add_flag("--normalize", normalize, "report posteriors instead of joints");
  addCommon(planCmd, planC, false, false);

  auto* plcgCmd = app.add_subcommand("plcg-prefix-prob", "prefix probability of a PLCG");
  plcgCmd->add_option("--grammar", grammarPath, "CFG file (no rule probabilities)")
      ->required();
  plcgCmd->add_option("--params", paramsPath, "switch parameter overrides");
  plcgCmd->add_option("--prefix", prefixArg, "whitespace-separated words");
  addCommon(plcgCmd, plcgC, false, true);

  auto* reachCmd = app.add_subcommand("reach", "reachability probability in a Markov chain");
  reachCmd->add_option("--chain", chainPath, "chain file")->required();
  reachCmd->add_option("--from", fromState, "source state")->required();
  reachCmd->add_option("--to", toState, "target state")->required();
  addCommon(reachCmd, reachC, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << '\n';
    return 1;
  }

  try {
    if (app.got_subcommand(prefixCmd) || app.got_subcommand(sentenceCmd) ||
        app.got_subcommand(nextCmd)) {
      bool isPrefix = app.got_subcommand(prefixCmd);
      bool isNext = app.got_subcommand(nextCmd);
      CommonOpts& c = isPrefix ? prefixC : (isNext ? nextC : sentenceC);
      auto grammar = std::make_shared<Grammar>(parse_pcfg(readFile(grammarPath, "grammar")));
      SolveOptions opts = toOptions(c);

      if (!c.batch.empty()) {
        return runBatch(c, isPrefix ? "prefix-prob" : "sentence-prob",
                        [&](const std::vector<std::string>& words) {
                          return isPrefix
                                     ? prefix_probability(grammar, words, startOf(c), opts)
                                     : sentence_probability(grammar, words, startOf(c), opts);
                        });
      }

      auto words = splitWords(isPrefix || isNext ? prefixArg : sentenceArg);
      auto engine = isPrefix || isNext
                        ? pcfg_prefix_engine(grammar, words, startOf(c))
                        : pcfg_sentence_engine(grammar, words, startOf(c));
      QueryArtifacts art = run_query(*engine, opts);
      maybeDump(c, art);
      std::optional<double> oracle;
      if (c.oracleBudget >= 0) {
        auto est = isPrefix || isNext
                       ? oracle_prefix_pcfg(*grammar, words, startOf(c), c.oracleBudget)
                       : oracle_sentence_pcfg(*grammar, words, startOf(c), c.oracleBudget);
        oracle = est.lowerBound;
      }
      std::string name = isPrefix ? "prefix-prob" : (isNext ? "next-symbol" : "sentence-prob");
      std::string query = name + "(" + (isPrefix || isNext ? prefixArg : sentenceArg) + ")";
      if (isNext) {
        auto ranking = conditional_next(grammar, words, startOf(c), opts);
        return rankedOutput(c, query, "next", ranking, art.result, oracle);
      }
      return finish(c, query, art.result, oracle);
    }

    if (app.got_subcommand(planCmd)) {
      auto model = std::make_shared<PlanModel>(parse_plan_model(readFile(grammarPath, "grammar")));
      SolveOptions opts = toOptions(planC);
      auto actions = splitWords(actionsArg);
      auto ranking = recognize_plan(model, actions, opts);
      if (normalize) {
        double sum = 0.0;
        for (const auto& [_, p] : ranking) sum += p;
        if (sum > 0.0)
          for (auto& [_, p] : ranking) p /= sum;
      }
      // headline metadata comes from the start-symbol prefix query, whose
      // graph also serves the dump flags
      auto engine = pcfg_prefix_engine(model->pcfgPtr(), actions, std::nullopt);
      QueryArtifacts art = run_query(*engine, opts);
      maybeDump(planC, art);
      std::optional<double> oracle;
      if (planC.oracleBudget >= 0)
        oracle = oracle_prefix_pcfg(model->pcfg(), actions, std::nullopt,
                                    planC.oracleBudget)
                     .lowerBound;
      return rankedOutput(planC, "plan-recognize(" + actionsArg + ")", "plan", ranking,
                          art.result, oracle);
    }

    if (app.got_subcommand(plcgCmd)) {
      Grammar cfg = parse_cfg(readFile(grammarPath, "grammar"));
      std::string params = paramsPath.empty() ? "" : readFile(paramsPath, "parameter");
      auto model = std::make_shared<PlcgModel>(make_plcg(cfg, params));
      SolveOptions opts = toOptions(plcgC);
      if (!plcgC.batch.empty()) {
        return runBatch(plcgC, "plcg-prefix-prob",
                        [&](const std::vector<std::string>& words) {
                          return plcg_prefix_probability(model, words, opts);
                        });
      }
      auto words = splitWords(prefixArg);
      auto engine = plcg_prefix_engine(model, words);
      QueryArtifacts art = run_query(*engine, opts);
      maybeDump(plcgC, art);
      std::optional<double> oracle;
      if (plcgC.oracleBudget >= 0)
        oracle = oracle_plcg_prefix(*model, words, plcgC.oracleBudget).lowerBound;
      return finish(plcgC, "plcg-prefix-prob(" + prefixArg + ")", art.result, oracle);
    }

    if (app.got_subcommand(reachCmd)) {
      auto chain = std::make_shared<MarkovChain>(parse_markov_chain(readFile(chainPath, "chain")));
      SolveOptions opts = toOptions(reachC);
      auto engine = markov_reach_engine(chain, fromState, toState);
      QueryArtifacts art = run_query(*engine, opts);
      maybeDump(reachC, art);
      std::optional<double> oracle;
      if (reachC.oracleBudget >= 0)
        oracle = oracle_reach(*chain, fromState, toState, reachC.oracleBudget).lowerBound;
      return finish(reachC, "reach(" + fromState + "," + toState + ")", art.result, oracle);
    }
  } catch (const ModelError& e) {
    std::cerr << "error[model]: " << e.what() << '\n';
    return 2;
  } catch (const QueryError& e) {
    std::cerr << "error[usage]: " << e.what() << '\n';
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "error[solver]: " << e.what() << '\n';
    return 3;
  } catch (const BudgetError& e) {
    std::cerr << "error[solver]: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error[usage]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
