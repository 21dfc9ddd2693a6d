#include "cyclex/oracle.hpp"

#include <algorithm>
#include <functional>

#include "cyclex/errors.hpp"

namespace cyclex {

namespace {

constexpr SymbolId kUnknown = static_cast<SymbolId>(-1);

std::vector<SymbolId> lookupWords(const SymbolTable& syms,
                                  std::span<const std::string> words) {
  if (words.empty()) throw QueryError("empty word sequence");
  std::vector<SymbolId> ids;
  for (const auto& w : words) {
    auto id = syms.find(w);
    ids.push_back(id ? *id : kUnknown);  // unknown words simply never match
  }
  return ids;
}

SymbolId resolveStart(const Grammar& g, std::optional<std::string_view> start) {
  std::string name(start ? *start : g.symbols().name(g.start()));
  auto id = g.symbols().find(name);
  if (!id || !g.isNonterminal(*id))
    throw QueryError("start symbol " + name + " is not a nonterminal");
  return *id;
}

/// Leftmost-derivation enumerator. The pending sentential form is kept as a
/// stack with the leftmost symbol at the back; the budget counts rule
/// applications.
struct PcfgEnumerator {
  const Grammar& grammar;
  const std::vector<SymbolId>& words;
  bool pseudoSuccess;
  std::uint64_t budget;
  double sum = 0.0;
  std::uint64_t runs = 0;

  void go(std::vector<SymbolId>& stack, std::uint32_t pos, std::uint64_t used,
          double prob) {
    const auto n = static_cast<std::uint32_t>(words.size());
    if (pseudoSuccess) {
      if (pos == n) {
        sum += prob;
        ++runs;
        return;
      }
    } else if (pos == n) {
      if (stack.empty()) {
        sum += prob;
        ++runs;
      }
      return;  // no epsilon rules: pending symbols cannot vanish
    }
    if (stack.empty()) return;  // sentence ended before the input did

    SymbolId head = stack.back();
    stack.pop_back();
    if (!grammar.isNonterminal(head)) {
      if (head == words[pos]) go(stack, pos + 1, used, prob);
    } else if (used < budget) {
      for (std::uint32_t r : grammar.rulesFor(head)) {
        const Rule& rule = grammar.rules()[r];
        for (auto it = rule.rhs.rbegin(); it != rule.rhs.rend(); ++it)
          stack.push_back(*it);
        go(stack, pos, used + 1, prob * rule.prob);
        stack.resize(stack.size() - rule.rhs.size());
      }
    }
    stack.push_back(head);
  }
};

/// Direct interpreter of the left-corner parser in continuation-passing
/// style; the budget counts switch draws (first, lc and att choices).
struct PlcgEnumerator {
  const PlcgModel& model;
  std::vector<SymbolId> words;
  std::uint64_t budget;
  double sum = 0.0;
  std::uint64_t runs = 0;
  std::uint64_t used = 0;
  double prob = 1.0;

  using Cont = std::function<void(std::uint32_t)>;

  std::uint32_t n() const { return static_cast<std::uint32_t>(words.size()); }

  void draw(double p, const std::function<void()>& then) {
    if (used >= budget) return;
    double saved = prob;
    ++used;
    prob = saved * p;
    then();
    prob = saved;
    --used;
  }

  void runSeq(const std::vector<SymbolId>& syms, std::size_t idx, std::uint32_t i,
              const Cont& k) {
    if (idx == syms.size()) {
      k(i);
      return;
    }
    if (i >= n()) return;  // nonempty stack needs input
    SymbolId head = syms[idx];
    SymbolId wd = words[i];
    if (!model.cfg().isNonterminal(head)) {
      if (head != wd) return;
      std::uint32_t after = i + 1;
      if (after == n())
        k(n());  // input consumed: skip the rest of the stack
      else
        runSeq(syms, idx + 1, after, k);
      return;
    }
    if (!model.hasFirstDist(head)) return;
    const auto& dist = model.firstDist(head);
    auto it = std::find_if(dist.begin(), dist.end(),
                           [&](const auto& e) { return e.first == wd; });
    if (it == dist.end()) return;
    draw(it->second, [&] {
      runLc(head, wd, i + 1, [&](std::uint32_t k1) {
        if (k1 == n())
          k(n());
        else
          runSeq(syms, idx + 1, k1, k);
      });
    });
  }

  void runLc(SymbolId g, SymbolId b, std::uint32_t i, const Cont& k) {
    if (!model.hasLcDist(g, b)) return;
    for (const auto& entry : model.lcDist(g, b)) {
      const Rule& rule = model.cfg().rules()[entry.rule];
      SymbolId a = rule.lhs;
      std::vector<SymbolId> gamma(rule.rhs.begin() + 1, rule.rhs.end());
      draw(entry.prob, [&] {
        Cont afterBody = [&](std::uint32_t k1) {
          if (g == a) {
            runAttPro(a, [&] { k(k1); }, [&] { runLc(g, a, k1, k); });
          } else {
            runLc(g, a, k1, k);
          }
        };
        if (i == n())
          afterBody(n());
        else
          runSeq(gamma, 0, i, afterBody);
      });
    }
  }

  void runAttPro(SymbolId a, const std::function<void()>& attach,
                 const std::function<void()>& project) {
    if (model.hasAttDist(a)) {
      draw(model.attProb(a, true), attach);
      draw(model.attProb(a, false), project);
    } else {
      attach();  // forced
    }
  }
};

}  // namespace

MassEstimate oracle_prefix_pcfg(const Grammar& pcfg, std::span<const std::string> words,
                                std::optional<std::string_view> start,
                                std::uint64_t budget) {
  auto ids = lookupWords(pcfg.symbols(), words);
  SymbolId s = resolveStart(pcfg, start);
  PcfgEnumerator e{pcfg, ids, /*pseudoSuccess=*/true, budget};
  std::vector<SymbolId> stack{s};
  e.go(stack, 0, 0, 1.0);
  return {e.sum, budget, e.runs};
}

MassEstimate oracle_sentence_pcfg(const Grammar& pcfg,
                                  std::span<const std::string> words,
                                  std::optional<std::string_view> start,
                                  std::uint64_t budget) {
  auto ids = lookupWords(pcfg.symbols(), words);
  SymbolId s = resolveStart(pcfg, start);
  PcfgEnumerator e{pcfg, ids, /*pseudoSuccess=*/false, budget};
  std::vector<SymbolId> stack{s};
  e.go(stack, 0, 0, 1.0);
  return {e.sum, budget, e.runs};
}

MassEstimate oracle_plcg_prefix(const PlcgModel& plcg,
                                std::span<const std::string> words,
                                std::uint64_t budget) {
  PlcgEnumerator e{plcg, lookupWords(plcg.cfg().symbols(), words), budget};
  std::vector<SymbolId> top{plcg.cfg().start()};
  e.runSeq(top, 0, 0, [&](std::uint32_t j) {
    if (j == e.n()) {
      e.sum += e.prob;
      ++e.runs;
    }
  });
  return {e.sum, budget, e.runs};
}

MassEstimate oracle_reach(const MarkovChain& chain, std::string_view from,
                          std::string_view to, std::uint64_t budget) {
  auto f = chain.states().find(from);
  auto t = chain.states().find(to);
  if (!f) throw QueryError("unknown state " + std::string(from));
  if (!t) throw QueryError("unknown state " + std::string(to));

  MassEstimate out{0.0, budget, 0};
  std::function<void(SymbolId, std::uint64_t, double)> go =
      [&](SymbolId state, std::uint64_t steps, double prob) {
        if (state == *t) {  // first hit
          out.lowerBound += prob;
          ++out.runsCounted;
          return;
        }
        if (steps == budget) return;
        for (const auto& [next, p] : chain.transitions(state))
          go(next, steps + 1, prob * p);
      };
  go(*f, 0, 1.0);
  return out;
}

}  // namespace cyclex
