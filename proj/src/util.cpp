#include "cyclex/util.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace cyclex {

std::string fmt_double(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace cyclex
