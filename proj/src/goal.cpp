#include "cyclex/goal.hpp"

#include <sstream>

namespace cyclex {

namespace {

void hashCombine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

std::size_t hashIds(const std::vector<SymbolId>& ids) {
  std::size_t h = ids.size();
  for (SymbolId id : ids) hashCombine(h, id);
  return h;
}

void appendList(std::ostringstream& out, const std::vector<SymbolId>& ids,
                const SymbolTable& symbols) {
  out << '[';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out << ',';
    out << symbols.name(ids[i]);
  }
  out << ']';
}

}  // namespace

std::size_t GoalHash::operator()(const Goal& g) const {
  std::size_t h = g.index();
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ParseGoal>) {
          hashCombine(h, static_cast<std::size_t>(v.mode));
          hashCombine(h, static_cast<std::size_t>(v.form));
          hashCombine(h, hashIds(v.symbols));
          hashCombine(h, v.begin);
          hashCombine(h, v.end);
        } else if constexpr (std::is_same_v<T, PlcgGoal>) {
          hashCombine(h, static_cast<std::size_t>(v.kind));
          hashCombine(h, hashIds(v.symbols));
          hashCombine(h, v.g);
          hashCombine(h, v.b);
          hashCombine(h, v.a);
          hashCombine(h, v.attach ? 1u : 0u);
          hashCombine(h, v.begin);
          hashCombine(h, v.end);
        } else {
          hashCombine(h, v.from);
          hashCombine(h, v.to);
        }
      },
      g);
  return h;
}

std::string to_string(const Goal& goal, const SymbolTable& symbols) {
  std::ostringstream out;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ParseGoal>) {
          const char* functor =
              v.mode == ParseGoal::Mode::prefix ? "pre_pcfg" : "pcfg";
          out << functor << '(';
          appendList(out, v.symbols, symbols);
          if (v.form == ParseGoal::Form::span) out << ',' << v.begin << ',' << v.end;
          out << ')';
        } else if constexpr (std::is_same_v<T, PlcgGoal>) {
          switch (v.kind) {
            case PlcgGoal::Kind::query:
              out << "pre_plcg(";
              appendList(out, v.symbols, symbols);
              out << ')';
              break;
            case PlcgGoal::Kind::g_call:
              out << "g_call(";
              appendList(out, v.symbols, symbols);
              out << ',' << v.begin << ',' << v.end << ')';
              break;
            case PlcgGoal::Kind::lc_call:
              out << "lc_call(" << symbols.name(v.g) << ',' << symbols.name(v.b)
                  << ',' << v.begin << ',' << v.end << ')';
              break;
            case PlcgGoal::Kind::att_or_pro:
              out << "att_or_pro(" << symbols.name(v.a) << ','
                  << (v.attach ? "att" : "pro") << ')';
              break;
          }
        } else {
          out << "reach(" << symbols.name(v.from) << ',' << symbols.name(v.to)
              << ')';
        }
      },
      goal);
  return out.str();
}

}  // namespace cyclex
