#include "cyclex/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cyclex/util.hpp"
#include "textlines.hpp"

namespace cyclex {

namespace {

constexpr double kSumTolerance = 1e-9;

std::vector<bool> lhsOccurrence(std::span<const Rule> rules) {
  SymbolId maxId = 0;
  for (const Rule& r : rules) {
    maxId = std::max(maxId, r.lhs);
    for (SymbolId s : r.rhs) maxId = std::max(maxId, s);
  }
  std::vector<bool> nt(rules.empty() ? 0 : maxId + 1, false);
  for (const Rule& r : rules) nt[r.lhs] = true;
  return nt;
}

}  // namespace

GrammarFile parse_grammar_file(std::string_view text) {
  GrammarFile file;
  file.symbols = std::make_shared<SymbolTable>();
  bool sawProb = false, sawBare = false;
  for (const auto& line : detail::tokenize_lines(text)) {
    const auto& t = line.tokens;
    if (t[0] == "start") {
      if (t.size() != 2) throw ModelError("expected 'start <nonterminal>'", line.number);
      if (file.startDeclared) throw ModelError("duplicate start declaration", line.number);
      file.start = file.symbols->intern(t[1]);
      file.startDeclared = true;
      continue;
    }
    if (t[0] == "plan") {
      if (t.size() != 2) throw ModelError("expected 'plan <nonterminal>'", line.number);
      SymbolId p = file.symbols->intern(t[1]);
      if (std::find(file.plans.begin(), file.plans.end(), p) == file.plans.end())
        file.plans.push_back(p);
      continue;
    }
    if (t.size() < 2 || t[1] != "->")
      throw ModelError("expected '<lhs> -> <sym> ... [: <prob>]'", line.number);
    Rule rule;
    rule.lhs = file.symbols->intern(t[0]);
    std::size_t end = t.size();
    if (end >= 2 && t[end - 2] == ":") {
      rule.prob = detail::parse_prob(t[end - 1], line.number);
      end -= 2;
      sawProb = true;
    } else {
      sawBare = true;
    }
    for (std::size_t i = 2; i < end; ++i) {
      if (t[i] == ":" || t[i] == "->")
        throw ModelError("misplaced '" + t[i] + "' in rule", line.number);
      rule.rhs.push_back(file.symbols->intern(t[i]));
    }
    if (rule.rhs.empty()) throw ModelError("epsilon rule for " + t[0], line.number);
    if (sawProb && sawBare)
      throw ModelError("rule lines must uniformly carry probabilities or omit them",
                       line.number);
    file.rules.push_back(std::move(rule));
  }
  file.hasProbabilities = sawProb;
  if (!file.startDeclared) {
    if (auto s = file.symbols->find("s")) file.start = *s;
    // leave startDeclared false; validate() reports a missing start symbol
  }
  return file;
}

std::span<const std::uint32_t> Grammar::rulesFor(SymbolId lhs) const {
  static const std::vector<std::uint32_t> empty;
  auto it = byLhs_.find(lhs);
  return it == byLhs_.end() ? std::span<const std::uint32_t>(empty)
                            : std::span<const std::uint32_t>(it->second);
}

Grammar Grammar::validate(GrammarFile file, bool probabilistic) {
  if (file.rules.empty()) throw ModelError("grammar has no rules");
  if (probabilistic && !file.hasProbabilities)
    throw ModelError("rule lines carry no probabilities");
  if (!probabilistic && file.hasProbabilities)
    throw ModelError("rule lines must not carry probabilities");

  Grammar g;
  g.probabilistic_ = probabilistic;
  g.rules_ = std::move(file.rules);
  g.nonterminal_ = lhsOccurrence(g.rules_);

  if (!file.startDeclared && !file.symbols->find("s"))
    throw ModelError("unknown start symbol 's'");
  g.start_ = file.start;
  if (!g.isNonterminal(g.start_))
    throw ModelError("start symbol " + file.symbols->name(g.start_) +
                     " is not a nonterminal");

  for (std::uint32_t i = 0; i < g.rules_.size(); ++i)
    g.byLhs_[g.rules_[i].lhs].push_back(i);

  // duplicate (lhs, rhs) pairs would make switch outcomes collide
  for (const auto& [lhs, idxs] : g.byLhs_) {
    for (std::size_t i = 0; i < idxs.size(); ++i)
      for (std::size_t j = i + 1; j < idxs.size(); ++j)
        if (g.rules_[idxs[i]].rhs == g.rules_[idxs[j]].rhs)
          throw ModelError("duplicate rule for " + file.symbols->name(lhs));
  }

  if (probabilistic) {
    for (const auto& [lhs, idxs] : g.byLhs_) {
      double sum = 0.0;
      for (std::uint32_t i : idxs) sum += g.rules_[i].prob;
      if (std::abs(sum - 1.0) > kSumTolerance)
        throw ModelError("probabilities for " + file.symbols->name(lhs) +
                         " sum to " + fmt_double(sum));
    }
  }

  auto useless = detect_useless(g.rules_, g.start_);
  if (!useless.empty()) {
    std::ostringstream msg;
    msg << "useless nonterminal(s):";
    for (SymbolId s : useless) msg << ' ' << file.symbols->name(s);
    throw ModelError(msg.str());
  }

  for (SymbolId s = 0; s < file.symbols->size(); ++s) {
    if (g.isNonterminal(s))
      g.nonterminals_.push_back(s);
    else
      g.terminals_.push_back(s);
  }
  g.symbols_ = std::move(file.symbols);
  return g;
}

Grammar parse_pcfg(std::string_view text) {
  return Grammar::validate(parse_grammar_file(text), /*probabilistic=*/true);
}

Grammar parse_cfg(std::string_view text) {
  return Grammar::validate(parse_grammar_file(text), /*probabilistic=*/false);
}

std::set<SymbolId> detect_useless(std::span<const Rule> rules, SymbolId start) {
  std::vector<bool> isNt = lhsOccurrence(rules);
  auto nonterminal = [&](SymbolId s) { return s < isNt.size() && isNt[s]; };

  std::set<SymbolId> productive;
  for (bool changed = true; changed;) {
    changed = false;
    for (const Rule& r : rules) {
      if (productive.count(r.lhs)) continue;
      bool all = true;
      for (SymbolId s : r.rhs)
        if (nonterminal(s) && !productive.count(s)) { all = false; break; }
      if (all) { productive.insert(r.lhs); changed = true; }
    }
  }

  // reachability through rules whose body is fully productive; a rule with a
  // non-productive symbol occurs in no sentence derivation
  std::set<SymbolId> reachable{start};
  for (bool changed = true; changed;) {
    changed = false;
    for (const Rule& r : rules) {
      if (!reachable.count(r.lhs)) continue;
      bool usable = true;
      for (SymbolId s : r.rhs)
        if (nonterminal(s) && !productive.count(s)) { usable = false; break; }
      if (!usable) continue;
      for (SymbolId s : r.rhs)
        if (nonterminal(s) && reachable.insert(s).second) changed = true;
    }
  }

  std::set<SymbolId> useless;
  for (SymbolId s = 0; s < isNt.size(); ++s)
    if (isNt[s] && (!productive.count(s) || !reachable.count(s))) useless.insert(s);
  return useless;
}

const std::set<SymbolId>& LeftCornerRelation::corners(SymbolId x) const {
  static const std::set<SymbolId> empty;
  auto it = pairs_.find(x);
  return it == pairs_.end() ? empty : it->second;
}

bool LeftCornerRelation::cyclic() const {
  for (const auto& [x, ys] : pairs_)
    if (ys.count(x)) return true;
  return false;
}

LeftCornerRelation left_corner_closure(std::span<const Rule> rules) {
  std::vector<bool> isNt = lhsOccurrence(rules);
  std::map<SymbolId, std::set<SymbolId>> pairs;
  for (const Rule& r : rules) pairs[r.lhs].insert(r.rhs.front());
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& [x, ys] : pairs) {
      std::set<SymbolId> add;
      for (SymbolId y : ys) {
        if (y < isNt.size() && isNt[y]) {
          auto it = pairs.find(y);
          if (it == pairs.end()) continue;
          for (SymbolId z : it->second)
            if (!ys.count(z)) add.insert(z);
        }
      }
      if (!add.empty()) { ys.insert(add.begin(), add.end()); changed = true; }
    }
  }
  return LeftCornerRelation(std::move(pairs));
}

std::map<SymbolId, std::set<SymbolId>> first_sets(std::span<const Rule> rules) {
  std::vector<bool> isNt = lhsOccurrence(rules);
  auto lc = left_corner_closure(rules);
  std::map<SymbolId, std::set<SymbolId>> first;
  for (const auto& [x, ys] : lc.pairs()) {
    auto& f = first[x];
    for (SymbolId y : ys)
      if (!(y < isNt.size() && isNt[y])) f.insert(y);
  }
  return first;
}

MarkovChain parse_markov_chain(std::string_view text) {
  auto states = std::make_shared<SymbolTable>();
  std::vector<std::vector<std::pair<SymbolId, double>>> trans;
  auto ensure = [&](SymbolId s) {
    if (trans.size() <= s) trans.resize(s + 1);
  };
  for (const auto& line : detail::tokenize_lines(text)) {
    const auto& t = line.tokens;
    if (t.size() != 4 || t[0] != "trans")
      throw ModelError("expected 'trans <from> <to> <prob>'", line.number);
    SymbolId from = states->intern(t[1]);
    SymbolId to = states->intern(t[2]);
    double p = detail::parse_prob(t[3], line.number);
    ensure(from);
    ensure(to);
    for (const auto& [existing, _] : trans[from])
      if (existing == to)
        throw ModelError("duplicate transition " + t[1] + " -> " + t[2], line.number);
    trans[from].emplace_back(to, p);
  }
  if (trans.empty()) throw ModelError("chain has no transitions");
  for (SymbolId s = 0; s < trans.size(); ++s) {
    if (trans[s].empty()) continue;  // absorbing
    double sum = 0.0;
    for (const auto& [_, p] : trans[s]) sum += p;
    if (std::abs(sum - 1.0) > kSumTolerance)
      throw ModelError("transitions from " + states->name(s) + " sum to " +
                       fmt_double(sum));
  }
  MarkovChain chain;
  chain.states_ = std::move(states);
  chain.trans_ = std::move(trans);
  return chain;
}

double PlanModel::planPrior(SymbolId plan) const {
  for (std::uint32_t i : pcfg_->rulesFor(pcfg_->start())) {
    const Rule& r = pcfg_->rules()[i];
    if (r.rhs.size() == 1 && r.rhs[0] == plan) return r.prob;
  }
  return 0.0;
}

PlanModel parse_plan_model(std::string_view text) {
  GrammarFile file = parse_grammar_file(text);
  std::vector<SymbolId> plans = file.plans;
  if (plans.empty()) throw ModelError("no plan declarations");
  auto grammar = std::make_shared<Grammar>(
      Grammar::validate(std::move(file), /*probabilistic=*/true));

  for (std::uint32_t i : grammar->rulesFor(grammar->start())) {
    const Rule& r = grammar->rules()[i];
    if (r.rhs.size() != 1 || !grammar->isNonterminal(r.rhs[0]))
      throw ModelError("start rule for " + grammar->symbols().name(r.lhs) +
                       " is not a unit rule to a nonterminal");
  }
  for (SymbolId p : plans) {
    if (!grammar->isNonterminal(p))
      throw ModelError("plan " + grammar->symbols().name(p) + " is not a nonterminal");
    bool hasRule = false;
    for (std::uint32_t i : grammar->rulesFor(grammar->start()))
      if (grammar->rules()[i].rhs == std::vector<SymbolId>{p}) hasRule = true;
    if (!hasRule)
      throw ModelError("no start rule for plan " + grammar->symbols().name(p));
  }

  PlanModel model;
  model.pcfg_ = std::move(grammar);
  model.plans_ = std::move(plans);
  return model;
}

}  // namespace cyclex
