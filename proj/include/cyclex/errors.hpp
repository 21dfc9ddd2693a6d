#pragma once

#include <stdexcept>
#include <string>

namespace cyclex {

/// Base class of every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid model file (syntax, normalization, structure).
/// `line` is 1-based; 0 means the error is not tied to a single line.
struct ModelError : Error {
  explicit ModelError(const std::string& msg, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line(line) {}
  int line;
};

/// Invalid query argument (empty prefix, unknown state, bad start symbol, ...).
struct QueryError : Error {
  using Error::Error;
};

/// Numerical failure: singular stratum, value excursion, non-convergence
/// promoted to an error by a caller.
struct SolverError : Error {
  using Error::Error;
};

/// Goal-universe cap exceeded while exploring; signals a non-finite or
/// pathological expansion.
struct BudgetError : Error {
  using Error::Error;
};

}  // namespace cyclex
