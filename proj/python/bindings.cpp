#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cyclex/oracle.hpp"
#include "cyclex/queries.hpp"

namespace py = pybind11;
using namespace cyclex;

namespace {

SolveOptions makeOptions(const std::string& solver, double tol, std::uint64_t maxIter) {
  SolveOptions o;
  if (solver == "fixpoint")
    o.solver = SolveMethod::fixpoint;
  else if (solver == "stratified-linear")
    o.solver = SolveMethod::stratifiedLinear;
  else
    throw QueryError("unknown solver " + solver);
  o.tol = tol;
  o.maxIter = maxIter;
  return o;
}

std::optional<std::string_view> optStart(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  return std::string_view(*s);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "prefix, plan and reachability probabilities via cyclic explanation graphs";

  py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
  py::register_exception<QueryError>(m, "QueryError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_ArithmeticError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);

  py::class_<Grammar, std::shared_ptr<Grammar>>(m, "Grammar")
      .def_property_readonly("probabilistic", &Grammar::probabilistic)
      .def_property_readonly("start",
                             [](const Grammar& g) { return g.symbols().name(g.start()); })
      .def_property_readonly("terminals",
                             [](const Grammar& g) {
                               std::vector<std::string> out;
                               for (SymbolId t : g.terminals())
                                 out.push_back(g.symbols().name(t));
                               return out;
                             })
      .def("__repr__", [](const Grammar& g) {
        return "<Grammar with " + std::to_string(g.rules().size()) + " rules>";
      });

  py::class_<PlcgModel, std::shared_ptr<PlcgModel>>(m, "PlcgModel");
  py::class_<MarkovChain, std::shared_ptr<MarkovChain>>(m, "MarkovChain");
  py::class_<PlanModel, std::shared_ptr<PlanModel>>(m, "PlanModel")
      .def_property_readonly("plans", [](const PlanModel& p) {
        std::vector<std::string> out;
        for (SymbolId s : p.plans()) out.push_back(p.pcfg().symbols().name(s));
        return out;
      });

  py::class_<QueryResult>(m, "QueryResult")
      .def_readonly("probability", &QueryResult::probability)
      .def_readonly("provable", &QueryResult::provable)
      .def_readonly("cyclic", &QueryResult::cyclic)
      .def_readonly("scc_count", &QueryResult::sccCount)
      .def_readonly("converged", &QueryResult::converged)
      .def_readonly("linear", &QueryResult::linear)
      .def_property_readonly("iterations",
                             [](const QueryResult& r) -> py::object {
                               if (!r.iterations) return py::none();
                               return py::cast(*r.iterations);
                             })
      .def_property_readonly("solver",
                             [](const QueryResult& r) {
                               return r.solver == SolveMethod::fixpoint
                                          ? "fixpoint"
                                          : "stratified-linear";
                             })
      .def("__repr__", [](const QueryResult& r) {
        return "<QueryResult probability=" + std::to_string(r.probability) + ">";
      });

  m.def("parse_pcfg", [](const std::string& text) {
    return std::make_shared<Grammar>(parse_pcfg(text));
  });
  m.def("parse_cfg", [](const std::string& text) {
    return std::make_shared<Grammar>(parse_cfg(text));
  });
  m.def(
      "make_plcg",
      [](std::shared_ptr<Grammar> cfg, const std::string& params) {
        return std::make_shared<PlcgModel>(make_plcg(*cfg, params));
      },
      py::arg("cfg"), py::arg("params") = std::string());
  m.def("parse_markov_chain", [](const std::string& text) {
    return std::make_shared<MarkovChain>(parse_markov_chain(text));
  });
  m.def("parse_plan_model", [](const std::string& text) {
    return std::make_shared<PlanModel>(parse_plan_model(text));
  });

  m.def(
      "prefix_probability",
      [](std::shared_ptr<Grammar> g, const std::vector<std::string>& words,
         const std::optional<std::string>& start, const std::string& solver, double tol,
         std::uint64_t maxIter) {
        return prefix_probability(g, words, optStart(start),
                                  makeOptions(solver, tol, maxIter));
      },
      py::arg("pcfg"), py::arg("words"), py::arg("start") = std::nullopt,
      py::arg("solver") = "stratified-linear", py::arg("tol") = 1e-10,
      py::arg("max_iter") = 1'000'000);
  m.def(
      "sentence_probability",
      [](std::shared_ptr<Grammar> g, const std::vector<std::string>& words,
         const std::optional<std::string>& start, const std::string& solver, double tol,
         std::uint64_t maxIter) {
        return sentence_probability(g, words, optStart(start),
                                    makeOptions(solver, tol, maxIter));
      },
      py::arg("pcfg"), py::arg("words"), py::arg("start") = std::nullopt,
      py::arg("solver") = "stratified-linear", py::arg("tol") = 1e-10,
      py::arg("max_iter") = 1'000'000);
  m.def(
      "plcg_prefix_probability",
      [](std::shared_ptr<PlcgModel> p, const std::vector<std::string>& words,
         const std::string& solver, double tol, std::uint64_t maxIter) {
        return plcg_prefix_probability(p, words, makeOptions(solver, tol, maxIter));
      },
      py::arg("plcg"), py::arg("words"), py::arg("solver") = "stratified-linear",
      py::arg("tol") = 1e-10, py::arg("max_iter") = 1'000'000);
  m.def(
      "conditional_next",
      [](std::shared_ptr<Grammar> g, const std::vector<std::string>& words,
         const std::optional<std::string>& start) {
        return conditional_next(g, words, optStart(start));
      },
      py::arg("pcfg"), py::arg("words"), py::arg("start") = std::nullopt);
  m.def(
      "recognize_plan",
      [](std::shared_ptr<PlanModel> p, const std::vector<std::string>& actions) {
        return recognize_plan(p, actions);
      },
      py::arg("plan_model"), py::arg("actions"));
  m.def(
      "reach_probability",
      [](std::shared_ptr<MarkovChain> c, const std::string& from, const std::string& to,
         const std::string& solver, double tol, std::uint64_t maxIter) {
        return reach_probability(c, from, to, makeOptions(solver, tol, maxIter));
      },
      py::arg("chain"), py::arg("from_state"), py::arg("to_state"),
      py::arg("solver") = "stratified-linear", py::arg("tol") = 1e-10,
      py::arg("max_iter") = 1'000'000);

  m.def(
      "prefix_graph_dump",
      [](std::shared_ptr<Grammar> g, const std::vector<std::string>& words,
         const std::optional<std::string>& start) {
        auto engine = pcfg_prefix_engine(g, words, optStart(start));
        auto graph = build_graph(*engine);
        return graph ? dump_graph(*graph) : std::string();
      },
      py::arg("pcfg"), py::arg("words"), py::arg("start") = std::nullopt);
  m.def(
      "plcg_equations_dump",
      [](std::shared_ptr<PlcgModel> p, const std::vector<std::string>& words) {
        auto engine = plcg_prefix_engine(p, words);
        auto graph = build_graph(*engine);
        return graph ? dump_equations(assemble(*graph)) : std::string();
      },
      py::arg("plcg"), py::arg("words"));

  m.def(
      "oracle_prefix_pcfg",
      [](std::shared_ptr<Grammar> g, const std::vector<std::string>& words,
         const std::optional<std::string>& start, std::uint64_t budget) {
        return oracle_prefix_pcfg(*g, words, optStart(start), budget).lowerBound;
      },
      py::arg("pcfg"), py::arg("words"), py::arg("start") = std::nullopt,
      py::arg("budget") = 30);
  m.def(
      "oracle_plcg_prefix",
      [](std::shared_ptr<PlcgModel> p, const std::vector<std::string>& words,
         std::uint64_t budget) {
        return oracle_plcg_prefix(*p, words, budget).lowerBound;
      },
      py::arg("plcg"), py::arg("words"), py::arg("budget") = 30);
  m.def(
      "oracle_reach",
      [](std::shared_ptr<MarkovChain> c, const std::string& from, const std::string& to,
         std::uint64_t budget) {
        return oracle_reach(*c, from, to, budget).lowerBound;
      },
      py::arg("chain"), py::arg("from_state"), py::arg("to_state"),
      py::arg("budget") = 30);
}
