#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cyclex/explgraph.hpp"

namespace cyclex {

/// One product: coef * X(vars[0]) * X(vars[1]) * ...; coef collects the
/// switch probabilities of the originating alternative.
struct Term {
  double coef = 1.0;
  std::vector<std::uint32_t> vars;
};

/// X_i = sum of terms. Facts have a single constant term.
struct Equation {
  std::vector<Term> terms;
};

/// One variable per goal, in graph discovery order; every variable on a
/// right-hand side has its own equation.
class EquationSystem {
 public:
  EquationSystem(std::vector<Equation> equations, std::vector<std::string> names,
                 std::uint32_t root);

  std::size_t size() const { return equations_.size(); }
  const Equation& equation(std::uint32_t i) const { return equations_.at(i); }
  const std::string& name(std::uint32_t i) const { return names_.at(i); }
  std::uint32_t root() const { return root_; }

 private:
  std::vector<Equation> equations_;
  std::vector<std::string> names_;
  std::uint32_t root_;
};

/// One equation per goal: X_H = sum over alternatives of
/// (product of switch probabilities) * (product of subgoal variables).
EquationSystem assemble(const ExplanationGraph& graph);

/// Strongly connected components of the variable dependency graph, in
/// topological order of the condensation: every reference from stratum i
/// lands in a stratum <= i.
struct SccDecomposition {
  std::vector<std::vector<std::uint32_t>> strata;  // members sorted ascending
  std::vector<std::uint32_t> sccOf;                // variable -> stratum index
  std::vector<bool> selfRecursive;  // size > 1 or an intra-stratum reference
};

SccDecomposition decompose_scc(const EquationSystem& system);

struct LinearityViolation {
  std::uint32_t variable;     // equation owning the offending term
  std::uint32_t termIndex;    // alternative index within the equation
  std::uint32_t firstVar;     // the two same-SCC subgoals
  std::uint32_t secondVar;
};

struct LinearityReport {
  bool ok = true;
  std::vector<LinearityViolation> violations;
};

/// ok iff no term multiplies two variables from one SCC.
LinearityReport check_linearity(const EquationSystem& system,
                                const SccDecomposition& decomposition);

enum class SolveMethod { stratifiedLinear, fixpoint };

struct StratumDiagnostic {
  std::uint32_t stratum;
  double spectralEstimate;
};

struct Solution {
  std::vector<double> values;  // per variable, in [0,1]
  SolveMethod method = SolveMethod::stratifiedLinear;
  std::uint64_t iterations = 0;
  bool converged = true;
  bool monotone = true;  // fixpoint: iterates never decreased
  bool bounded = true;   // fixpoint: iterates never exceeded 1 + 1e-9
  /// Power-iteration estimates for every stratum solved through a matrix.
  std::vector<StratumDiagnostic> spectra;
};

/// Solves stratum by stratum: lower-stratum values are substituted as
/// constants, each self-recursive stratum becomes (I - M) X = Y and is
/// solved by Gaussian elimination with partial pivoting (pivot threshold
/// 1e-12), plain singletons are evaluated directly. Values may exceed [0,1]
/// by at most 1e-9 (clamped); larger excursions raise SolverError, as do
/// singular strata. Requires check_linearity == ok.
Solution solve_stratified(const EquationSystem& system,
                          const SccDecomposition& decomposition);

struct FixpointOptions {
  double tol = 1e-10;
  std::uint64_t maxIter = 1'000'000;
};

/// Iterates X <- T(X) from X = 0 until the max-norm change drops below
/// tol. Monotone nondecreasing and bounded by 1 by construction; both are
/// checked each sweep and reported. Handles nonlinear systems. When maxIter
/// is reached the best iterate is returned flagged non-converged.
Solution solve_fixpoint(const EquationSystem& system,
                        const FixpointOptions& options = {});

/// Power-iteration estimate of the spectral radius (50 iterations from an
/// all-ones vector); exact for 1x1 matrices. Diagnostic only.
double spectral_radius_estimate(const std::vector<std::vector<double>>& m);

/// One line per equation, "X(<goal>) = <coef>*X(<goal>)*... + ...", in the
/// same order as the graph dump.
std::string dump_equations(const EquationSystem& system);

}  // namespace cyclex
