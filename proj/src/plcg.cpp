#include <algorithm>
#include <cmath>

#include "cyclex/model.hpp"
#include "cyclex/util.hpp"
#include "textlines.hpp"

namespace cyclex {

namespace {

constexpr double kSumTolerance = 1e-9;

std::string switchName(const char* kind, const SymbolTable& syms, SymbolId a) {
  return std::string(kind) + "(" + syms.name(a) + ")";
}

}  // namespace

const std::vector<std::pair<SymbolId, double>>& PlcgModel::firstDist(SymbolId g) const {
  return firstDist_.at(g);
}

const std::vector<PlcgModel::LcEntry>& PlcgModel::lcDist(SymbolId g, SymbolId b) const {
  return lcDist_.at({g, b});
}

double PlcgModel::attProb(SymbolId a, bool attach) const {
  auto it = attDist_.find(a);
  if (it == attDist_.end()) return attach ? 1.0 : 0.0;
  return attach ? it->second.first : it->second.second;
}

PlcgModel make_plcg(const Grammar& cfg, std::string_view overridesText) {
  PlcgModel m;
  m.cfg_ = cfg;
  m.lc_ = left_corner_closure(cfg.rules());
  const SymbolTable& syms = cfg.symbols();

  auto first = first_sets(cfg.rules());
  for (const auto& [g, ts] : first) {
    auto& dist = m.firstDist_[g];
    for (SymbolId t : ts) dist.emplace_back(t, 1.0 / static_cast<double>(ts.size()));
  }

  for (const auto& [g, corners] : m.lc_.pairs()) {
    for (SymbolId b : corners) {
      std::vector<PlcgModel::LcEntry> support;
      for (std::uint32_t i = 0; i < cfg.rules().size(); ++i) {
        const Rule& r = cfg.rules()[i];
        if (r.rhs.front() != b) continue;
        if (r.lhs == g || m.lc_.contains(g, r.lhs)) support.push_back({i, 0.0});
      }
      if (support.empty()) continue;
      for (auto& e : support) e.prob = 1.0 / static_cast<double>(support.size());
      m.lcDist_[{g, b}] = std::move(support);
    }
  }

  for (SymbolId a : cfg.nonterminals())
    if (m.lc_.contains(a, a)) m.attDist_[a] = {0.5, 0.5};

  for (const auto& line : detail::tokenize_lines(overridesText)) {
    const auto& t = line.tokens;
    if (t[0] == "first") {
      if (t.size() != 4) throw ModelError("expected 'first <G> <terminal> <prob>'", line.number);
      auto g = syms.find(t[1]);
      auto w = syms.find(t[2]);
      if (!g || !m.firstDist_.count(*g))
        throw ModelError("unknown switch first(" + t[1] + ")", line.number);
      double p = detail::parse_prob(t[3], line.number);
      auto& dist = m.firstDist_[*g];
      auto it = w ? std::find_if(dist.begin(), dist.end(),
                                 [&](const auto& e) { return e.first == *w; })
                  : dist.end();
      if (it == dist.end())
        throw ModelError("outcome " + t[2] + " not in first(" + t[1] + ")", line.number);
      it->second = p;
    } else if (t[0] == "att") {
      if (t.size() != 4 || (t[2] != "att" && t[2] != "pro"))
        throw ModelError("expected 'att <G> att|pro <prob>'", line.number);
      auto g = syms.find(t[1]);
      if (!g || !m.attDist_.count(*g))
        throw ModelError("unknown switch att(" + t[1] + ")", line.number);
      double p = detail::parse_prob(t[3], line.number);
      if (t[2] == "att")
        m.attDist_[*g].first = p;
      else
        m.attDist_[*g].second = p;
    } else if (t[0] == "lc") {
      // lc <G> <b> <A> -> <sym> ... : <prob>
      if (t.size() < 8 || t[4] != "->" || t[t.size() - 2] != ":")
        throw ModelError("expected 'lc <G> <b> <A> -> <sym> ... : <prob>'", line.number);
      auto g = syms.find(t[1]);
      auto b = syms.find(t[2]);
      auto a = syms.find(t[3]);
      if (!g || !b || !m.lcDist_.count({*g, *b}))
        throw ModelError("unknown switch lc(" + t[1] + "," + t[2] + ")", line.number);
      double p = detail::parse_prob(t.back(), line.number);
      std::vector<SymbolId> rhs;
      bool known = a.has_value();
      for (std::size_t i = 5; i + 2 < t.size(); ++i) {
        auto s = syms.find(t[i]);
        if (!s) { known = false; break; }
        rhs.push_back(*s);
      }
      auto& dist = m.lcDist_[{*g, *b}];
      auto it = dist.end();
      if (known)
        it = std::find_if(dist.begin(), dist.end(), [&](const PlcgModel::LcEntry& e) {
          const Rule& r = cfg.rules()[e.rule];
          return r.lhs == *a && r.rhs == rhs;
        });
      if (it == dist.end())
        throw ModelError("rule not in lc(" + t[1] + "," + t[2] + ") support", line.number);
      it->prob = p;
    } else {
      throw ModelError("expected 'first', 'lc' or 'att' directive", line.number);
    }
  }

  for (const auto& [g, dist] : m.firstDist_) {
    double sum = 0.0;
    for (const auto& [_, p] : dist) sum += p;
    if (std::abs(sum - 1.0) > kSumTolerance)
      throw ModelError(switchName("first", syms, g) + " sums to " + fmt_double(sum));
  }
  for (const auto& [key, dist] : m.lcDist_) {
    double sum = 0.0;
    for (const auto& e : dist) sum += e.prob;
    if (std::abs(sum - 1.0) > kSumTolerance)
      throw ModelError("lc(" + syms.name(key.first) + "," + syms.name(key.second) +
                       ") sums to " + fmt_double(sum));
  }
  for (const auto& [a, d] : m.attDist_) {
    double sum = d.first + d.second;
    if (std::abs(sum - 1.0) > kSumTolerance)
      throw ModelError(switchName("att", syms, a) + " sums to " + fmt_double(sum));
  }
  return m;
}

}  // namespace cyclex
