#pragma once

#include <string>

namespace cyclex {

/// Shortest decimal string that parses back to exactly `v`. Keeps dumps
/// deterministic and round-trippable without std::format.
std::string fmt_double(double v);

}  // namespace cyclex
