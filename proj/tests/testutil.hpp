#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cyclex/engines.hpp"
#include "cyclex/eqsolve.hpp"
#include "cyclex/model.hpp"
#include "cyclex/util.hpp"

namespace testutil {

using namespace cyclex;

inline constexpr const char* kG0 =
    "s -> s s : 0.4\n"
    "s -> a : 0.3\n"
    "s -> b : 0.3\n";

inline constexpr const char* kG0Cfg =
    "s -> s s\n"
    "s -> a\n"
    "s -> b\n";

inline constexpr const char* kPlanGrammar =
    "start S\n"
    "plan Pl\nplan St\nplan Cl\nplan Mo\n"
    "S -> Pl : 0.1\nS -> St : 0.4\nS -> Cl : 0.3\nS -> Mo : 0.2\n"
    "Pl -> play : 0.5\nPl -> play Pl : 0.3\nPl -> Cl : 0.1\nPl -> Mo : 0.1\n"
    "St -> study : 0.1\nSt -> study St : 0.3\nSt -> Pl St : 0.2\nSt -> Cl St : 0.4\n"
    "Cl -> clean : 0.4\nCl -> clean Cl : 0.5\nCl -> Pl Cl : 0.1\n"
    "Mo -> mow : 0.3\nMo -> mow Mo : 0.1\nMo -> Pl Mo : 0.4\nMo -> Cl Mo : 0.2\n";

inline constexpr const char* kChain3 =
    "trans s0 s0 0.5\n"
    "trans s0 s3 0.3\n"
    "trans s0 s4 0.2\n";

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

/// Every subgoal referenced anywhere has its own formula.
inline bool graph_closed(const ExplanationGraph& g) {
  for (std::size_t i = 0; i < g.size(); ++i)
    for (const auto& alt : g.formula(i).alternatives)
      for (const Goal& sub : alt.subgoals)
        if (!g.indexOf(sub)) return false;
  return true;
}

/// Recomputes the provability least fixpoint over the final graph; after
/// pruning every goal must come out provable.
inline bool all_provable(const ExplanationGraph& g) {
  std::vector<bool> proved(g.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (proved[i]) continue;
      for (const auto& alt : g.formula(i).alternatives) {
        bool all = true;
        for (const Goal& sub : alt.subgoals)
          if (!proved[*g.indexOf(sub)]) { all = false; break; }
        if (all) { proved[i] = true; changed = true; break; }
      }
    }
  }
  return std::all_of(proved.begin(), proved.end(), [](bool b) { return b; });
}

// ---------------------------------------------------------------------------
// Random subcritical PCFGs for the property suites. Subcriticality (spectral
// radius of the rule mean matrix below 0.9) makes the grammar consistent and
// keeps fixpoint iteration fast.

struct RandomPcfg {
  std::string text;
  std::shared_ptr<const Grammar> grammar;
};

inline std::optional<RandomPcfg> try_random_pcfg(std::mt19937_64& rng) {
  static const char* ntNames[] = {"s", "x1", "x2", "x3"};
  static const char* tNames[] = {"a", "b", "c"};
  const std::size_t nNt = 1 + rng() % 4;
  const std::size_t nT = 1 + rng() % 3;

  std::ostringstream text;
  std::vector<std::vector<std::vector<std::string>>> ruleRhs(nNt);
  for (std::size_t nt = 0; nt < nNt; ++nt) {
    const std::size_t nRules = 1 + rng() % 3;
    std::vector<double> weights;
    for (std::size_t r = 0; r < nRules; ++r) {
      std::vector<std::string> rhs;
      const std::size_t len = 1 + rng() % 3;
      for (std::size_t p = 0; p < len; ++p) {
        if (rng() % 2)
          rhs.push_back(tNames[rng() % nT]);
        else
          rhs.push_back(ntNames[rng() % nNt]);
      }
      // duplicate right-hand sides under one lhs are rejected by the parser
      for (const auto& seen : ruleRhs[nt])
        if (seen == rhs) return std::nullopt;
      ruleRhs[nt].push_back(rhs);
      weights.push_back(0.3 + static_cast<double>(rng() % 1000) / 1000.0);
    }
    double total = 0.0;
    for (double w : weights) total += w;
    for (std::size_t r = 0; r < nRules; ++r) {
      text << ntNames[nt] << " ->";
      for (const auto& sym : ruleRhs[nt][r]) text << ' ' << sym;
      text << " : " << fmt_double(weights[r] / total) << '\n';
    }
  }

  RandomPcfg out;
  out.text = text.str();
  try {
    out.grammar = std::make_shared<Grammar>(parse_pcfg(out.text));
  } catch (const ModelError&) {
    return std::nullopt;  // useless nonterminals, bad sums, ...
  }

  // mean matrix of the branching process; subcritical iff rho < 1
  const auto& g = *out.grammar;
  const auto& nts = g.nonterminals();
  std::vector<std::vector<double>> mean(nts.size(), std::vector<double>(nts.size(), 0.0));
  for (std::size_t i = 0; i < nts.size(); ++i) {
    for (std::uint32_t r : g.rulesFor(nts[i])) {
      const Rule& rule = g.rules()[r];
      for (SymbolId sym : rule.rhs) {
        auto it = std::find(nts.begin(), nts.end(), sym);
        if (it != nts.end()) mean[i][it - nts.begin()] += rule.prob;
      }
    }
  }
  if (spectral_radius_estimate(mean) >= 0.9) return std::nullopt;
  return out;
}

inline RandomPcfg random_pcfg(std::mt19937_64& rng) {
  for (;;) {
    if (auto g = try_random_pcfg(rng)) return *g;
  }
}

/// Leftmost random derivation of a full sentence; nullopt when the step cap
/// trips (possible but rare for subcritical grammars).
inline std::optional<std::vector<std::string>> sample_sentence(const Grammar& g,
                                                               std::mt19937_64& rng,
                                                               int maxSteps = 4000) {
  std::vector<SymbolId> stack{g.start()};
  std::vector<std::string> out;
  int steps = 0;
  while (!stack.empty()) {
    if (++steps > maxSteps) return std::nullopt;
    SymbolId head = stack.back();
    stack.pop_back();
    if (!g.isNonterminal(head)) {
      out.push_back(g.symbols().name(head));
      continue;
    }
    auto rules = g.rulesFor(head);
    double u = static_cast<double>(rng() % 1000000) / 1000000.0;
    std::uint32_t chosen = rules.back();
    double acc = 0.0;
    for (std::uint32_t r : rules) {
      acc += g.rules()[r].prob;
      if (u < acc) { chosen = r; break; }
    }
    const auto& rhs = g.rules()[chosen].rhs;
    for (auto it = rhs.rbegin(); it != rhs.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

/// In-language prefix of length <= maxLen.
inline std::vector<std::string> sample_prefix(const Grammar& g, std::mt19937_64& rng,
                                              std::size_t maxLen = 6) {
  for (;;) {
    auto sentence = sample_sentence(g, rng);
    if (!sentence || sentence->empty()) continue;
    std::size_t len = 1 + rng() % std::min(maxLen, sentence->size());
    sentence->resize(len);
    return *sentence;
  }
}

/// For a grammar whose left-corner relation is cyclic: a prefix w1..wm t
/// where s derives w1..wm X delta leftmost, X lies on a left-corner cycle
/// and t is in first(X). Parsing it makes the prefix graph cyclic.
inline std::optional<std::vector<std::string>> cyclic_witness_prefix(const Grammar& g) {
  auto lc = left_corner_closure(g.rules());
  std::optional<SymbolId> cycleNt;

  // shortest terminal yield per nonterminal
  std::map<SymbolId, std::vector<SymbolId>> yield;
  for (bool changed = true; changed;) {
    changed = false;
    for (const Rule& r : g.rules()) {
      std::vector<SymbolId> y;
      bool ok = true;
      for (SymbolId sym : r.rhs) {
        if (!g.isNonterminal(sym)) {
          y.push_back(sym);
        } else if (auto it = yield.find(sym); it != yield.end()) {
          y.insert(y.end(), it->second.begin(), it->second.end());
        } else {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      auto it = yield.find(r.lhs);
      if (it == yield.end() || y.size() < it->second.size()) {
        yield[r.lhs] = std::move(y);
        changed = true;
      }
    }
  }

  // terminal words that bring each nonterminal to the leftmost position
  std::map<SymbolId, std::vector<SymbolId>> reach;
  reach[g.start()] = {};
  for (bool changed = true; changed;) {
    changed = false;
    for (const Rule& r : g.rules()) {
      auto from = reach.find(r.lhs);
      if (from == reach.end()) continue;
      std::vector<SymbolId> prefix = from->second;
      bool ok = true;
      for (SymbolId sym : r.rhs) {
        if (g.isNonterminal(sym)) {
          if (!reach.count(sym)) {
            reach[sym] = prefix;
            changed = true;
          }
          auto it = yield.find(sym);
          if (it == yield.end()) { ok = false; break; }
          prefix.insert(prefix.end(), it->second.begin(), it->second.end());
        } else {
          prefix.push_back(sym);
        }
      }
      (void)ok;
    }
  }

  for (SymbolId nt : g.nonterminals())
    if (lc.contains(nt, nt) && reach.count(nt)) { cycleNt = nt; break; }
  if (!cycleNt) return std::nullopt;

  std::optional<SymbolId> t;
  for (SymbolId c : lc.corners(*cycleNt))
    if (!g.isNonterminal(c)) { t = c; break; }
  if (!t) return std::nullopt;

  std::vector<std::string> out;
  for (SymbolId w : reach[*cycleNt]) out.push_back(g.symbols().name(w));
  out.push_back(g.symbols().name(*t));
  return out;
}

}  // namespace testutil
