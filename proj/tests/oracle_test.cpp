#include <doctest.h>

#include "cyclex/oracle.hpp"
#include "cyclex/queries.hpp"
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

TEST_CASE("oracle_prefix_pcfg sums leftmost derivations") {
  CHECK(oracle_prefix_pcfg(*g0(), words("a"), {}, 0).lowerBound == 0.0);
  MassEstimate one = oracle_prefix_pcfg(*g0(), words("a"), {}, 1);
  CHECK(one.lowerBound == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(one.runsCounted == 1);
  MassEstimate twenty = oracle_prefix_pcfg(*g0(), words("a"), {}, 20);
  CHECK(std::abs(twenty.lowerBound - 0.5) <= 1e-4);
}

TEST_CASE("oracle_sentence_pcfg is exact once the budget covers the derivation") {
  CHECK(oracle_sentence_pcfg(*g0(), words("a"), {}, 1).lowerBound ==
        doctest::Approx(0.3).epsilon(1e-15));
  CHECK(oracle_sentence_pcfg(*g0(), words("a b"), {}, 3).lowerBound ==
        doctest::Approx(0.036).epsilon(1e-15));
  CHECK(oracle_sentence_pcfg(*g0(), words("a"), {}, 0).lowerBound == 0.0);
}

TEST_CASE("oracle_plcg_prefix approaches the solver value") {
  CHECK(oracle_plcg_prefix(*g0plcg(), words("a b"), 0).lowerBound == 0.0);
  // geometric loop tail: budget 30 lands within 1e-3, budget 44 within 1e-4
  CHECK(std::abs(oracle_plcg_prefix(*g0plcg(), words("a b"), 30).lowerBound - 0.125) <=
        1e-3);
  CHECK(std::abs(oracle_plcg_prefix(*g0plcg(), words("a b"), 44).lowerBound - 0.125) <=
        1e-4);

  auto forced = std::make_shared<const PlcgModel>(make_plcg(parse_cfg("s -> a\n")));
  CHECK(oracle_plcg_prefix(*forced, words("a"), 5).lowerBound == 1.0);
}

TEST_CASE("oracle_reach follows first-hit paths") {
  MarkovChain chain = parse_markov_chain(kChain3);
  CHECK(oracle_reach(chain, "s0", "s3", 1).lowerBound ==
        doctest::Approx(0.3).epsilon(1e-15));
  CHECK(std::abs(oracle_reach(chain, "s0", "s3", 30).lowerBound - 0.6) <= 1e-6);
  CHECK(oracle_reach(chain, "s0", "s0", 0).lowerBound == 1.0);
  CHECK(oracle_reach(chain, "s3", "s3", 7).lowerBound == 1.0);
  CHECK_THROWS_AS(oracle_reach(chain, "s0", "nope", 1), QueryError);
}

TEST_CASE("estimates are monotone in budget and bounded by the solver") {
  double solver = prefix_probability(g0(), words("a")).probability;
  double prev = -1.0;
  for (std::uint64_t budget : {0, 1, 2, 4, 8, 16, 24}) {
    double est = oracle_prefix_pcfg(*g0(), words("a"), {}, budget).lowerBound;
    CHECK(est >= prev);
    CHECK(est <= solver + 1e-9);
    prev = est;
  }

  double plcgSolver = plcg_prefix_probability(g0plcg(), words("a b"), {}).probability;
  prev = -1.0;
  for (std::uint64_t budget : {0, 5, 10, 20, 30}) {
    double est = oracle_plcg_prefix(*g0plcg(), words("a b"), budget).lowerBound;
    CHECK(est >= prev);
    CHECK(est <= plcgSolver + 1e-9);
    prev = est;
  }
}

TEST_CASE("oracle lower-bounds the solver on random grammars") {
  std::mt19937_64 rng(606);
  for (int i = 0; i < 10; ++i) {
    auto rg = random_pcfg(rng);
    auto prefix = sample_prefix(*rg.grammar, rng, 4);
    double solver = prefix_probability(rg.grammar, prefix).probability;
    double prev = -1.0;
    for (std::uint64_t budget : {0, 4, 8, 12}) {
      double est = oracle_prefix_pcfg(*rg.grammar, prefix, {}, budget).lowerBound;
      CHECK(est >= prev);
      CHECK(est <= solver + 1e-9);
      prev = est;
    }
  }
}
