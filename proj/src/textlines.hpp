#pragma once

#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "cyclex/errors.hpp"

namespace cyclex::detail {

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

/// Splits a document into whitespace-tokenized lines, dropping comments
/// ('#' to end of line) and blank lines. Line numbers are 1-based.
inline std::vector<Line> tokenize_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++number;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    Line l{number, {}};
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > start) l.tokens.emplace_back(line.substr(start, i - start));
    }
    if (!l.tokens.empty()) out.push_back(std::move(l));
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return out;
}

inline double parse_prob(const std::string& token, int line) {
  const char* begin = token.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + token.size())
    throw ModelError("bad probability literal '" + token + "'", line);
  if (!(v > 0.0) || v > 1.0)
    throw ModelError("probability " + token + " outside (0,1]", line);
  return v;
}

}  // namespace cyclex::detail
