#include <doctest.h>

#include "cyclex/engines.hpp"
#include "testutil.hpp"

using namespace cyclex;
using namespace testutil;

namespace {

std::shared_ptr<const Grammar> g0() {
  static auto g = std::make_shared<const Grammar>(parse_pcfg(kG0));
  return g;
}

std::shared_ptr<const PlcgModel> g0plcg() {
  static auto m = std::make_shared<const PlcgModel>(make_plcg(parse_cfg(kG0Cfg)));
  return m;
}

}  // namespace

TEST_CASE("prefix graph for G0/[a] matches the four-goal shape") {
  auto engine = pcfg_prefix_engine(g0(), words("a"));
  auto graph = build_graph(*engine);
  REQUIRE(graph);
  CHECK(graph->size() == 4);
  CHECK(graph_closed(*graph));
  CHECK(all_provable(*graph));
  CHECK(is_cyclic(*graph));

  // the [s,s] span has two alternatives, one of them self-referential
  ParseGoal loop;
  loop.mode = ParseGoal::Mode::prefix;
  loop.form = ParseGoal::Form::span;
  SymbolId s = *graph->symbols().find("s");
  loop.symbols = {s, s};
  loop.begin = 0;
  loop.end = 1;
  auto idx = graph->indexOf(Goal{loop});
  REQUIRE(idx);
  const auto& formula = graph->formula(*idx);
  CHECK(formula.alternatives.size() == 2);
  bool selfRef = false;
  for (const auto& alt : formula.alternatives)
    for (const Goal& sub : alt.subgoals)
      if (sub == formula.head) selfRef = true;
  CHECK(selfRef);
}

TEST_CASE("plcg graph for [a b] has ten goals with the lc self-loop") {
  auto engine = plcg_prefix_engine(g0plcg(), words("a b"));
  auto graph = build_graph(*engine);
  REQUIRE(graph);
  CHECK(graph->size() == 10);
  CHECK(graph_closed(*graph));
  CHECK(all_provable(*graph));
  CHECK(is_cyclic(*graph));

  std::string dump = dump_graph(*graph);
  CHECK(dump.find("lc_call(s,s,2,2) <=>") != std::string::npos);
  // the self-loop goal appears in its own body
  auto headPos = dump.find("lc_call(s,s,2,2) <=>");
  auto line = dump.substr(headPos, dump.find('\n', headPos) - headPos);
  CHECK(line.find("lc_call(s,s,2,2)", 20) != std::string::npos);
  CHECK(dump.find("att_or_pro(s,att) <=> msw(att(s),att)") != std::string::npos);
  CHECK(dump.find("att_or_pro(s,pro) <=> msw(att(s),pro)") != std::string::npos);
}

TEST_CASE("unknown words make the root unprovable") {
  auto engine = pcfg_prefix_engine(g0(), words("c"));
  CHECK_FALSE(build_graph(*engine));
  auto engine2 = pcfg_prefix_engine(g0(), words("a c"));
  CHECK_FALSE(build_graph(*engine2));
}

TEST_CASE("sentence graph for G0/[a] is acyclic") {
  auto engine = pcfg_sentence_engine(g0(), words("a"));
  auto graph = build_graph(*engine);
  REQUIRE(graph);
  CHECK_FALSE(is_cyclic(*graph));
}

TEST_CASE("acyclic left-corner relation gives acyclic prefix graphs") {
  auto flat = std::make_shared<const Grammar>(parse_pcfg("s -> a b : 1.0\n"));
  auto engine = pcfg_prefix_engine(flat, words("a"));
  auto graph = build_graph(*engine);
  REQUIRE(graph);
  CHECK_FALSE(is_cyclic(*graph));
  CHECK(graph->size() == 3);
}

TEST_CASE("dumps print facts bare and are byte-deterministic") {
  auto engine = pcfg_prefix_engine(g0(), words("a"));
  auto graph = build_graph(*engine);
  REQUIRE(graph);
  std::string dump = dump_graph(*graph);
  CHECK(dump ==
        "pre_pcfg([a]) <=> pre_pcfg([s],0,1)\n"
        "pre_pcfg([s],0,1) <=> pre_pcfg([s,s],0,1) & msw(s,[s,s])"
        " v pre_pcfg([a],0,1) & msw(s,[a])\n"
        "pre_pcfg([s,s],0,1) <=> pre_pcfg([s,s],0,1) & msw(s,[s,s])"
        " v pre_pcfg([a],0,1) & msw(s,[a])\n"
        "pre_pcfg([a],0,1)\n");

  auto engine2 = pcfg_prefix_engine(g0(), words("a"));
  auto graph2 = build_graph(*engine2);
  REQUIRE(graph2);
  CHECK(dump_graph(*graph2) == dump);

  auto plcg1 = build_graph(*plcg_prefix_engine(g0plcg(), words("a b")));
  auto plcg2 = build_graph(*plcg_prefix_engine(g0plcg(), words("a b")));
  REQUIRE(plcg1);
  REQUIRE(plcg2);
  CHECK(dump_graph(*plcg1) == dump_graph(*plcg2));
}

TEST_CASE("goal budget turns runaway expansion into an error") {
  auto engine = pcfg_prefix_engine(g0(), words("a b a"));
  BuildOptions tiny;
  tiny.maxGoals = 3;
  CHECK_THROWS_AS(build_graph(*engine, tiny), BudgetError);
}

TEST_CASE("graphs stay closed and provable across random grammars") {
  std::mt19937_64 rng(5150);
  for (int i = 0; i < 30; ++i) {
    auto rg = random_pcfg(rng);
    auto prefix = sample_prefix(*rg.grammar, rng);
    auto engine = pcfg_prefix_engine(rg.grammar, prefix);
    auto graph = build_graph(*engine);
    REQUIRE(graph);  // in-language prefixes are provable
    CHECK(graph_closed(*graph));
    CHECK(all_provable(*graph));
  }
}
