#include "cyclex/engines.hpp"

#include <algorithm>

#include "cyclex/errors.hpp"

namespace cyclex {

namespace {

std::string symbolList(const std::vector<SymbolId>& ids, const SymbolTable& syms) {
  std::string out = "[";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += syms.name(ids[i]);
  }
  out += ']';
  return out;
}

void pushUnique(std::vector<Alternative>& alts, Alternative&& alt) {
  for (const auto& kept : alts)
    if (kept == alt) return;
  alts.push_back(std::move(alt));
}

/// Extends the model's symbol table with the query words so that goals can
/// reference (and print) words outside the terminal vocabulary; those yield
/// unprovable roots rather than errors.
std::pair<std::shared_ptr<SymbolTable>, std::vector<SymbolId>> internWords(
    const SymbolTable& base, std::span<const std::string> words) {
  if (words.empty()) throw QueryError("empty word sequence");
  auto syms = std::make_shared<SymbolTable>(base);
  std::vector<SymbolId> ids;
  ids.reserve(words.size());
  for (const auto& w : words) ids.push_back(syms->intern(w));
  return {std::move(syms), std::move(ids)};
}

/// Top-down parser of Fig-2 style: expand the leftmost stack symbol, with
/// pseudo success (prefix mode) cutting the continuation once the input is
/// consumed.
class PcfgParseEngine final : public DerivationEngine {
 public:
  PcfgParseEngine(std::shared_ptr<const Grammar> model,
                  std::span<const std::string> words,
                  std::optional<std::string_view> start, ParseGoal::Mode mode)
      : model_(std::move(model)), mode_(mode) {
    auto [syms, ids] = internWords(model_->symbols(), words);
    syms_ = std::move(syms);
    words_ = std::move(ids);
    std::string startName(start ? *start : model_->symbols().name(model_->start()));
    auto sid = model_->symbols().find(startName);
    if (!sid || !model_->isNonterminal(*sid))
      throw QueryError("start symbol " + startName + " is not a nonterminal");
    start_ = *sid;
  }

  Goal root() const override {
    ParseGoal g;
    g.mode = mode_;
    g.form = ParseGoal::Form::query;
    g.symbols = words_;
    g.begin = 0;
    g.end = n();
    return g;
  }

  std::shared_ptr<const SymbolTable> symbols() const override { return syms_; }

  std::vector<Alternative> expand(const Goal& goal) const override {
    const auto& g = std::get<ParseGoal>(goal);
    if (g.form == ParseGoal::Form::query)
      return {Alternative{{span({start_}, 0, n())}, {}}};

    if (g.symbols.empty())
      return g.begin == g.end ? std::vector<Alternative>{Alternative{}}
                              : std::vector<Alternative>{};
    const std::uint32_t i = g.begin, j = g.end;
    if (i >= n()) return {};  // sentence mode can create such dead ends

    SymbolId a = g.symbols.front();
    std::vector<SymbolId> rest(g.symbols.begin() + 1, g.symbols.end());
    std::vector<Alternative> alts;

    if (!model_->isNonterminal(a)) {
      if (a != words_[i]) return {};
      if (prefix() && i + 1 == n()) {
        if (j == n()) alts.push_back(Alternative{});
      } else {
        alts.push_back(Alternative{{span(std::move(rest), i + 1, j)}, {}});
      }
      return alts;
    }

    for (std::uint32_t r : model_->rulesFor(a)) {
      const Rule& rule = model_->rules()[r];
      SwitchChoice choice{model_->symbols().name(a),
                          symbolList(rule.rhs, model_->symbols()), rule.prob};
      for (std::uint32_t k = i + 1; k <= n(); ++k) {
        Alternative alt;
        alt.choices.push_back(choice);
        alt.subgoals.push_back(span(rule.rhs, i, k));
        if (prefix() && k == n()) {
          if (j != n()) continue;  // pseudo success skips the continuation
        } else {
          alt.subgoals.push_back(span(rest, k, j));
        }
        pushUnique(alts, std::move(alt));
      }
    }
    return alts;
  }

 private:
  std::uint32_t n() const { return static_cast<std::uint32_t>(words_.size()); }
  bool prefix() const { return mode_ == ParseGoal::Mode::prefix; }

  ParseGoal span(std::vector<SymbolId> symbols, std::uint32_t b, std::uint32_t e) const {
    ParseGoal g;
    g.mode = mode_;
    g.form = ParseGoal::Form::span;
    g.symbols = std::move(symbols);
    g.begin = b;
    g.end = e;
    return g;
  }

  std::shared_ptr<const Grammar> model_;
  ParseGoal::Mode mode_;
  std::shared_ptr<const SymbolTable> syms_;
  std::vector<SymbolId> words_;
  SymbolId start_ = 0;
};

/// Bottom-up left-corner parser of Fig-6 style: g_call shifts or starts a
/// left-corner chain, lc_call grows a B-tree into a G-tree by attach or
/// project, att_or_pro draws the choice (forced to attach when A is not a
/// left corner of itself).
class PlcgEngine final : public DerivationEngine {
 public:
  PlcgEngine(std::shared_ptr<const PlcgModel> model, std::span<const std::string> words)
      : model_(std::move(model)) {
    auto [syms, ids] = internWords(model_->cfg().symbols(), words);
    syms_ = std::move(syms);
    words_ = std::move(ids);
  }

  Goal root() const override {
    PlcgGoal g;
    g.kind = PlcgGoal::Kind::query;
    g.symbols = words_;
    g.end = n();
    return g;
  }

  std::shared_ptr<const SymbolTable> symbols() const override { return syms_; }

  std::vector<Alternative> expand(const Goal& goal) const override {
    const auto& g = std::get<PlcgGoal>(goal);
    switch (g.kind) {
      case PlcgGoal::Kind::query:
        return {Alternative{{gCall({model_->cfg().start()}, 0, n())}, {}}};
      case PlcgGoal::Kind::g_call:
        return expandG(g);
      case PlcgGoal::Kind::lc_call:
        return expandLc(g);
      case PlcgGoal::Kind::att_or_pro:
        return expandAtt(g);
    }
    return {};
  }

 private:
  std::uint32_t n() const { return static_cast<std::uint32_t>(words_.size()); }
  const SymbolTable& names() const { return model_->cfg().symbols(); }

  PlcgGoal gCall(std::vector<SymbolId> symbols, std::uint32_t b, std::uint32_t e) const {
    PlcgGoal g;
    g.kind = PlcgGoal::Kind::g_call;
    g.symbols = std::move(symbols);
    g.begin = b;
    g.end = e;
    return g;
  }

  PlcgGoal lcCall(SymbolId gs, SymbolId b, std::uint32_t from, std::uint32_t to) const {
    PlcgGoal g;
    g.kind = PlcgGoal::Kind::lc_call;
    g.g = gs;
    g.b = b;
    g.begin = from;
    g.end = to;
    return g;
  }

  PlcgGoal attOrPro(SymbolId a, bool attach) const {
    PlcgGoal g;
    g.kind = PlcgGoal::Kind::att_or_pro;
    g.a = a;
    g.attach = attach;
    return g;
  }

  std::vector<Alternative> expandG(const PlcgGoal& g) const {
    if (g.symbols.empty())
      return g.begin == g.end ? std::vector<Alternative>{Alternative{}}
                              : std::vector<Alternative>{};
    const std::uint32_t i = g.begin, j = g.end;
    if (i >= n()) return {};
    SymbolId head = g.symbols.front();
    std::vector<SymbolId> rest(g.symbols.begin() + 1, g.symbols.end());
    SymbolId wd = words_[i];
    std::vector<Alternative> alts;

    if (!model_->cfg().isNonterminal(head)) {
      if (head != wd) return {};
      std::uint32_t k = i + 1;
      if (k == n()) {
        if (j == n()) alts.push_back(Alternative{});
      } else {
        alts.push_back(Alternative{{gCall(std::move(rest), k, j)}, {}});
      }
      return alts;
    }

    if (!model_->hasFirstDist(head)) return {};
    const auto& dist = model_->firstDist(head);
    auto it = std::find_if(dist.begin(), dist.end(),
                           [&](const auto& e) { return e.first == wd; });
    if (it == dist.end()) return {};
    SwitchChoice choice{"first(" + names().name(head) + ")", names().name(wd),
                        it->second};
    for (std::uint32_t k = i + 1; k <= n(); ++k) {
      Alternative alt;
      alt.choices.push_back(choice);
      alt.subgoals.push_back(lcCall(head, wd, i + 1, k));
      if (k == n()) {
        if (j != n()) continue;
      } else {
        alt.subgoals.push_back(gCall(rest, k, j));
      }
      pushUnique(alts, std::move(alt));
    }
    return alts;
  }

  std::vector<Alternative> expandLc(const PlcgGoal& g) const {
    if (!model_->hasLcDist(g.g, g.b)) return {};
    const std::uint32_t i = g.begin, j = g.end;
    std::vector<Alternative> alts;
    for (const auto& entry : model_->lcDist(g.g, g.b)) {
      const Rule& rule = model_->cfg().rules()[entry.rule];
      SymbolId a = rule.lhs;
      std::vector<SymbolId> gamma(rule.rhs.begin() + 1, rule.rhs.end());
      SwitchChoice choice{
          "lc(" + names().name(g.g) + "," + names().name(g.b) + ")",
          "rule(" + names().name(a) + "," + symbolList(rule.rhs, names()) + ")",
          entry.prob};

      std::vector<std::uint32_t> splits;
      if (i == n())
        splits.push_back(n());  // input consumed: skip the body call
      else if (gamma.empty())
        splits.push_back(i);  // g_call([],L,L1) just unifies L1 = L
      else
        for (std::uint32_t k = i; k <= n(); ++k) splits.push_back(k);

      for (std::uint32_t k : splits) {
        Alternative base;
        base.choices.push_back(choice);
        if (i < n()) base.subgoals.push_back(gCall(gamma, i, k));
        if (g.g == a) {
          if (j == k) {
            Alternative att = base;
            att.subgoals.push_back(attOrPro(a, true));
            pushUnique(alts, std::move(att));
          }
          Alternative pro = base;
          pro.subgoals.push_back(attOrPro(a, false));
          pro.subgoals.push_back(lcCall(g.g, a, k, j));
          pushUnique(alts, std::move(pro));
        } else {
          Alternative proj = std::move(base);
          proj.subgoals.push_back(lcCall(g.g, a, k, j));
          pushUnique(alts, std::move(proj));
        }
      }
    }
    return alts;
  }

  std::vector<Alternative> expandAtt(const PlcgGoal& g) const {
    if (model_->hasAttDist(g.a)) {
      SwitchChoice choice{"att(" + names().name(g.a) + ")", g.attach ? "att" : "pro",
                          model_->attProb(g.a, g.attach)};
      Alternative alt;
      alt.choices.push_back(choice);
      return {alt};
    }
    // attach forced when A is not a left corner of itself
    return g.attach ? std::vector<Alternative>{Alternative{}}
                    : std::vector<Alternative>{};
  }

  std::shared_ptr<const PlcgModel> model_;
  std::shared_ptr<const SymbolTable> syms_;
  std::vector<SymbolId> words_;
};

class MarkovReachEngine final : public DerivationEngine {
 public:
  MarkovReachEngine(std::shared_ptr<const MarkovChain> chain, std::string_view from,
                    std::string_view to)
      : chain_(std::move(chain)) {
    auto f = chain_->states().find(from);
    auto t = chain_->states().find(to);
    if (!f) throw QueryError("unknown state " + std::string(from));
    if (!t) throw QueryError("unknown state " + std::string(to));
    from_ = *f;
    to_ = *t;
  }

  Goal root() const override { return ReachGoal{from_, to_}; }
  std::shared_ptr<const SymbolTable> symbols() const override {
    return chain_->statesPtr();
  }

  std::vector<Alternative> expand(const Goal& goal) const override {
    const auto& g = std::get<ReachGoal>(goal);
    if (g.from == g.to) return {Alternative{}};
    std::vector<Alternative> alts;
    for (const auto& [next, p] : chain_->transitions(g.from)) {
      Alternative alt;
      alt.choices.push_back(
          {"trans(" + chain_->states().name(g.from) + ")", chain_->states().name(next), p});
      alt.subgoals.push_back(ReachGoal{next, g.to});
      alts.push_back(std::move(alt));
    }
    return alts;
  }

 private:
  std::shared_ptr<const MarkovChain> chain_;
  SymbolId from_ = 0, to_ = 0;
};

}  // namespace

std::unique_ptr<DerivationEngine> pcfg_prefix_engine(
    std::shared_ptr<const Grammar> pcfg, std::span<const std::string> words,
    std::optional<std::string_view> start) {
  return std::make_unique<PcfgParseEngine>(std::move(pcfg), words, start,
                                           ParseGoal::Mode::prefix);
}

std::unique_ptr<DerivationEngine> pcfg_sentence_engine(
    std::shared_ptr<const Grammar> pcfg, std::span<const std::string> words,
    std::optional<std::string_view> start) {
  return std::make_unique<PcfgParseEngine>(std::move(pcfg), words, start,
                                           ParseGoal::Mode::sentence);
}

std::unique_ptr<DerivationEngine> plcg_prefix_engine(
    std::shared_ptr<const PlcgModel> plcg, std::span<const std::string> words) {
  return std::make_unique<PlcgEngine>(std::move(plcg), words);
}

std::unique_ptr<DerivationEngine> markov_reach_engine(
    std::shared_ptr<const MarkovChain> chain, std::string_view from,
    std::string_view to) {
  return std::make_unique<MarkovReachEngine>(std::move(chain), from, to);
}

}  // namespace cyclex
