#include <doctest.h>

#include "cyclex/model.hpp"
#include "testutil.hpp"

using namespace cyclex;
using namespace testutil;

namespace {

std::set<std::string> nameSet(const std::set<SymbolId>& ids, const SymbolTable& syms) {
  std::set<std::string> out;
  for (SymbolId id : ids) out.insert(syms.name(id));
  return out;
}

}  // namespace

TEST_CASE("parse_pcfg accepts the three-rule grammar") {
  Grammar g = parse_pcfg(kG0);
  CHECK(g.rules().size() == 3);
  CHECK(g.symbols().name(g.start()) == "s");
  CHECK(g.probabilistic());
  CHECK(g.terminals().size() == 2);
  CHECK(g.rulesFor(*g.symbols().find("s")).size() == 3);
}

TEST_CASE("parse_pcfg accepts a single deterministic rule") {
  Grammar g = parse_pcfg("s -> a : 1.0\n");
  CHECK(g.rules().size() == 1);
}

TEST_CASE("parse_pcfg reports probability sums without repairing them") {
  CHECK_THROWS_WITH_AS(parse_pcfg("s -> s s : 0.5\ns -> a : 0.3\n"),
                       doctest::Contains("sum to 0.8"), ModelError);
}

TEST_CASE("parse_pcfg rejects epsilon rules with a line number") {
  try {
    parse_pcfg("s -> a : 0.5\ns -> : 0.5\n");
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("epsilon") != std::string::npos);
  }
}

TEST_CASE("parse_pcfg rejects useless nonterminals and bad start symbols") {
  CHECK_THROWS_WITH_AS(parse_pcfg("s -> a : 1.0\nx -> x : 1.0\n"),
                       doctest::Contains("useless"), ModelError);
  CHECK_THROWS_WITH_AS(parse_pcfg("s -> a : 1.0\nx -> b : 1.0\n"),
                       doctest::Contains("useless"), ModelError);
  CHECK_THROWS_WITH_AS(parse_pcfg("start q\ns -> a : 1.0\n"),
                       doctest::Contains("not a nonterminal"), ModelError);
  CHECK_THROWS_AS(parse_pcfg("t -> a : 1.0\n"), ModelError);  // no "s" anywhere
}

TEST_CASE("parse_pcfg reports syntax errors with line numbers") {
  try {
    parse_pcfg("s -> a : 0.5\ns a : 0.5\n");
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    CHECK(e.line == 2);
  }
  CHECK_THROWS_AS(parse_pcfg("s -> a : x\n"), ModelError);
  CHECK_THROWS_AS(parse_pcfg("s -> a : 0\n"), ModelError);
  CHECK_THROWS_AS(parse_pcfg("s -> a : 1.5\n"), ModelError);
  CHECK_THROWS_AS(parse_pcfg("s -> a\ns -> b : 0.5\n"), ModelError);  // mixed
  CHECK_THROWS_AS(parse_pcfg("s -> a : 0.5\ns -> a : 0.5\n"), ModelError);  // dup
}

TEST_CASE("detect_useless on raw rule sets") {
  auto useless = [](const char* text) {
    GrammarFile f = parse_grammar_file(text);
    return nameSet(detect_useless(f.rules, f.start), *f.symbols);
  };
  CHECK(useless("s -> a : 1.0\n") == std::set<std::string>{});
  CHECK(useless("s -> a : 1.0\nx -> x : 1.0\n") == std::set<std::string>{"x"});
  CHECK(useless("s -> a : 1.0\nx -> b : 1.0\n") == std::set<std::string>{"x"});
  // a reachable-but-nonproductive companion poisons the rule that uses it
  CHECK(useless("s -> x y : 1.0\ns -> a : 1.0\nx -> b : 1.0\ny -> y : 1.0\n") ==
        std::set<std::string>{"x", "y"});
}

TEST_CASE("left_corner_closure is transitive and detects cycles") {
  GrammarFile g0 = parse_grammar_file(kG0);
  auto lc = left_corner_closure(g0.rules);
  SymbolId s = *g0.symbols->find("s");
  CHECK(lc.contains(s, s));
  CHECK(lc.cyclic());

  GrammarFile flat = parse_grammar_file("s -> a b\n");
  auto lcFlat = left_corner_closure(flat.rules);
  CHECK(lcFlat.contains(*flat.symbols->find("s"), *flat.symbols->find("a")));
  CHECK_FALSE(lcFlat.cyclic());
  CHECK(lcFlat.pairs().at(*flat.symbols->find("s")).size() == 1);

  GrammarFile plan = parse_grammar_file(kPlanGrammar);
  auto lcPlan = left_corner_closure(plan.rules);
  SymbolId pl = *plan.symbols->find("Pl");
  SymbolId cl = *plan.symbols->find("Cl");
  CHECK(lcPlan.contains(pl, cl));
  CHECK(lcPlan.contains(cl, pl));
  CHECK(lcPlan.cyclic());
}

TEST_CASE("left_corner_closure is idempotent under self-composition") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 25; ++i) {
    auto rg = random_pcfg(rng);
    auto lc = left_corner_closure(rg.grammar->rules());
    for (const auto& [x, ys] : lc.pairs())
      for (SymbolId y : ys)
        for (SymbolId z : lc.corners(y)) CHECK(lc.contains(x, z));
  }
}

TEST_CASE("first_sets collect the left-corner terminals") {
  GrammarFile g0 = parse_grammar_file(kG0);
  auto first = first_sets(g0.rules);
  CHECK(nameSet(first.at(*g0.symbols->find("s")), *g0.symbols) ==
        std::set<std::string>{"a", "b"});

  GrammarFile flat = parse_grammar_file("s -> a b\n");
  CHECK(nameSet(first_sets(flat.rules).at(*flat.symbols->find("s")), *flat.symbols) ==
        std::set<std::string>{"a"});

  GrammarFile plan = parse_grammar_file(kPlanGrammar);
  CHECK(nameSet(first_sets(plan.rules).at(*plan.symbols->find("S")), *plan.symbols) ==
        std::set<std::string>{"play", "study", "clean", "mow"});
}

TEST_CASE("first sets are exactly the terminal left corners") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 25; ++i) {
    auto rg = random_pcfg(rng);
    const Grammar& g = *rg.grammar;
    auto lc = left_corner_closure(g.rules());
    auto first = first_sets(g.rules());
    for (SymbolId nt : g.nonterminals()) {
      for (SymbolId t : g.terminals()) {
        bool inFirst = first.count(nt) && first.at(nt).count(t);
        CHECK(inFirst == lc.contains(nt, t));
      }
      if (first.count(nt))
        for (SymbolId t : first.at(nt)) CHECK_FALSE(g.isNonterminal(t));
    }
  }
}

TEST_CASE("make_plcg defaults are equiprobable over the switch supports") {
  Grammar cfg = parse_cfg(kG0Cfg);
  PlcgModel m = make_plcg(cfg);
  SymbolId s = *cfg.symbols().find("s");
  SymbolId a = *cfg.symbols().find("a");

  const auto& first = m.firstDist(s);
  REQUIRE(first.size() == 2);
  CHECK(first[0].second == doctest::Approx(0.5));
  CHECK(first[1].second == doctest::Approx(0.5));

  CHECK(m.hasAttDist(s));
  CHECK(m.attProb(s, true) == doctest::Approx(0.5));
  CHECK(m.attProb(s, false) == doctest::Approx(0.5));

  const auto& lcSA = m.lcDist(s, a);
  REQUIRE(lcSA.size() == 1);
  CHECK(lcSA[0].prob == doctest::Approx(1.0));
}

TEST_CASE("make_plcg forces attach without a self left corner") {
  Grammar cfg = parse_cfg("s -> a\n");
  PlcgModel m = make_plcg(cfg);
  SymbolId s = *cfg.symbols().find("s");
  CHECK_FALSE(m.hasAttDist(s));
  CHECK(m.attProb(s, true) == 1.0);
  CHECK(m.attProb(s, false) == 0.0);
}

TEST_CASE("make_plcg applies overrides without renormalizing") {
  Grammar cfg = parse_cfg(kG0Cfg);
  PlcgModel m = make_plcg(cfg, "att s att 0.7\natt s pro 0.3\n");
  SymbolId s = *cfg.symbols().find("s");
  CHECK(m.attProb(s, true) == doctest::Approx(0.7));
  CHECK(m.attProb(s, false) == doctest::Approx(0.3));

  CHECK_THROWS_WITH_AS(make_plcg(cfg, "att s att 0.7\n"),
                       doctest::Contains("sums to"), ModelError);
  CHECK_THROWS_WITH_AS(make_plcg(cfg, "first s c 0.5\n"),
                       doctest::Contains("not in first"), ModelError);
  CHECK_THROWS_WITH_AS(make_plcg(parse_cfg("s -> a\n"), "att s att 1.0\n"),
                       doctest::Contains("unknown switch"), ModelError);
  CHECK_THROWS_WITH_AS(make_plcg(cfg, "lc s a q -> a : 1.0\n"),
                       doctest::Contains("support"), ModelError);
}

TEST_CASE("make_plcg supports match first sets and left-corner rule sets") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    auto rg = random_pcfg(rng);
    const Grammar& g = *rg.grammar;
    PlcgModel m = make_plcg(g);
    auto first = first_sets(g.rules());
    auto lc = left_corner_closure(g.rules());
    for (SymbolId nt : g.nonterminals()) {
      REQUIRE(m.hasFirstDist(nt));
      CHECK(m.firstDist(nt).size() == first.at(nt).size());
      for (const auto& [t, p] : m.firstDist(nt)) {
        CHECK(first.at(nt).count(t) == 1);
        CHECK(p == doctest::Approx(1.0 / first.at(nt).size()));
      }
      for (SymbolId b : lc.corners(nt)) {
        REQUIRE(m.hasLcDist(nt, b));
        for (const auto& e : m.lcDist(nt, b)) {
          const Rule& r = g.rules()[e.rule];
          CHECK(r.rhs.front() == b);
          CHECK((r.lhs == nt || lc.contains(nt, r.lhs)));
        }
      }
      CHECK(m.hasAttDist(nt) == lc.contains(nt, nt));
    }
  }
}

TEST_CASE("parse_markov_chain validates per-state sums") {
  MarkovChain c = parse_markov_chain(kChain3);
  CHECK(c.stateCount() == 3);
  SymbolId s3 = *c.states().find("s3");
  SymbolId s4 = *c.states().find("s4");
  CHECK(c.transitions(s3).empty());  // absorbing
  CHECK(c.transitions(s4).empty());

  CHECK(parse_markov_chain("trans s0 s0 1.0\n").stateCount() == 1);
  CHECK_THROWS_WITH_AS(parse_markov_chain("trans s0 s1 0.6\n"),
                       doctest::Contains("sum to 0.6"), ModelError);
  CHECK_THROWS_AS(parse_markov_chain("trans s0 s1 0.5\ntrans s0 s1 0.5\n"), ModelError);
  CHECK_THROWS_AS(parse_markov_chain("hop s0 s1 1.0\n"), ModelError);
}

TEST_CASE("parse_plan_model checks the start rules and declarations") {
  PlanModel m = parse_plan_model(kPlanGrammar);
  CHECK(m.plans().size() == 4);
  SymbolId st = *m.pcfg().symbols().find("St");
  CHECK(m.planPrior(st) == doctest::Approx(0.4));

  CHECK_THROWS_WITH_AS(
      parse_plan_model("start S\nplan Pl\nS -> Pl : 0.5\nS -> a : 0.5\nPl -> go : 1.0\n"),
      doctest::Contains("unit rule"), ModelError);
  CHECK_THROWS_AS(parse_plan_model(kG0), ModelError);  // no plan declarations

  // declaring a subset of the start targets restricts the model
  PlanModel sub = parse_plan_model(
      "start S\nplan Pl\nS -> Pl : 0.5\nS -> St : 0.5\n"
      "Pl -> go : 1.0\nSt -> rest : 1.0\n");
  CHECK(sub.plans().size() == 1);
  CHECK(sub.pcfg().symbols().name(sub.plans()[0]) == "Pl");
}

TEST_CASE("accepted grammars never contain useless nonterminals") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 30; ++i) {
    auto rg = random_pcfg(rng);
    CHECK(detect_useless(rg.grammar->rules(), rg.grammar->start()).empty());
    for (SymbolId lhs : rg.grammar->nonterminals()) {
      double sum = 0.0;
      for (std::uint32_t r : rg.grammar->rulesFor(lhs)) sum += rg.grammar->rules()[r].prob;
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
  }
}
