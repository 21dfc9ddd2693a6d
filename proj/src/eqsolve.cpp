#include "cyclex/eqsolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cyclex/errors.hpp"
#include "cyclex/util.hpp"

namespace cyclex {

namespace {

constexpr double kPivotThreshold = 1e-12;
constexpr double kClampSlack = 1e-9;

double evalTerm(const Term& t, const std::vector<double>& values) {
  double p = t.coef;
  for (std::uint32_t v : t.vars) p *= values[v];
  return p;
}

double evalEquation(const Equation& eq, const std::vector<double>& values) {
  double sum = 0.0;
  for (const Term& t : eq.terms) sum += evalTerm(t, values);
  return sum;
}

/// Clamp a solved value into [0,1]; excursions beyond the slack are
/// contract violations, not roundoff.
double clampValue(double v, const std::string& name) {
  if (v < -kClampSlack || v > 1.0 + kClampSlack)
    throw SolverError("value " + fmt_double(v) + " for " + name +
                      " outside [0,1] beyond slack");
  return std::min(1.0, std::max(0.0, v));
}

}  // namespace

EquationSystem::EquationSystem(std::vector<Equation> equations,
                               std::vector<std::string> names, std::uint32_t root)
    : equations_(std::move(equations)), names_(std::move(names)), root_(root) {
  for (const Equation& eq : equations_)
    for (const Term& t : eq.terms)
      for (std::uint32_t v : t.vars)
        if (v >= equations_.size())
          throw SolverError("variable " + std::to_string(v) + " has no equation");
}

EquationSystem assemble(const ExplanationGraph& graph) {
  std::vector<Equation> equations;
  std::vector<std::string> names;
  equations.reserve(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const DefiningFormula& f = graph.formula(i);
    Equation eq;
    for (const Alternative& alt : f.alternatives) {
      Term t;
      for (const SwitchChoice& c : alt.choices) t.coef *= c.prob;
      for (const Goal& sub : alt.subgoals) t.vars.push_back(*graph.indexOf(sub));
      eq.terms.push_back(std::move(t));
    }
    equations.push_back(std::move(eq));
    names.push_back(to_string(f.head, graph.symbols()));
  }
  return EquationSystem(std::move(equations), std::move(names), 0);
}

SccDecomposition decompose_scc(const EquationSystem& system) {
  const std::size_t n = system.size();
  std::vector<std::vector<std::uint32_t>> edges(n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (const Term& t : system.equation(i).terms)
      for (std::uint32_t v : t.vars) edges[i].push_back(v);

  // iterative Tarjan; SCCs pop in dependency order (referenced first)
  std::vector<std::uint32_t> index(n, 0), lowlink(n, 0);
  std::vector<bool> visited(n, false), onStack(n, false);
  std::vector<std::uint32_t> stack;
  std::uint32_t counter = 0;
  SccDecomposition out;
  out.sccOf.assign(n, 0);

  struct Frame {
    std::uint32_t node;
    std::size_t edge;
  };
  std::vector<Frame> frames;

  for (std::uint32_t start = 0; start < n; ++start) {
    if (visited[start]) continue;
    frames.push_back({start, 0});
    visited[start] = true;
    index[start] = lowlink[start] = counter++;
    stack.push_back(start);
    onStack[start] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.edge < edges[f.node].size()) {
        std::uint32_t w = edges[f.node][f.edge++];
        if (!visited[w]) {
          visited[w] = true;
          index[w] = lowlink[w] = counter++;
          stack.push_back(w);
          onStack[w] = true;
          frames.push_back({w, 0});
        } else if (onStack[w]) {
          lowlink[f.node] = std::min(lowlink[f.node], index[w]);
        }
      } else {
        std::uint32_t v = f.node;
        frames.pop_back();
        if (!frames.empty())
          lowlink[frames.back().node] = std::min(lowlink[frames.back().node], lowlink[v]);
        if (lowlink[v] == index[v]) {
          std::vector<std::uint32_t> members;
          std::uint32_t w;
          do {
            w = stack.back();
            stack.pop_back();
            onStack[w] = false;
            members.push_back(w);
          } while (w != v);
          std::sort(members.begin(), members.end());
          std::uint32_t id = static_cast<std::uint32_t>(out.strata.size());
          for (std::uint32_t m : members) out.sccOf[m] = id;
          out.strata.push_back(std::move(members));
        }
      }
    }
  }

  out.selfRecursive.assign(out.strata.size(), false);
  for (std::uint32_t s = 0; s < out.strata.size(); ++s) {
    if (out.strata[s].size() > 1) {
      out.selfRecursive[s] = true;
      continue;
    }
    std::uint32_t v = out.strata[s][0];
    for (const Term& t : system.equation(v).terms)
      for (std::uint32_t w : t.vars)
        if (w == v) out.selfRecursive[s] = true;
  }
  return out;
}

LinearityReport check_linearity(const EquationSystem& system,
                                const SccDecomposition& decomposition) {
  LinearityReport report;
  for (std::uint32_t i = 0; i < system.size(); ++i) {
    const Equation& eq = system.equation(i);
    for (std::uint32_t a = 0; a < eq.terms.size(); ++a) {
      const auto& vars = eq.terms[a].vars;
      for (std::size_t x = 0; x < vars.size(); ++x)
        for (std::size_t y = x + 1; y < vars.size(); ++y)
          if (decomposition.sccOf[vars[x]] == decomposition.sccOf[vars[y]]) {
            report.ok = false;
            report.violations.push_back({i, a, vars[x], vars[y]});
          }
    }
  }
  return report;
}

double spectral_radius_estimate(const std::vector<std::vector<double>>& m) {
  const std::size_t k = m.size();
  if (k == 0) return 0.0;
  if (k == 1) return std::abs(m[0][0]);
  std::vector<double> v(k, 1.0), w(k, 0.0);
  double ratio = 0.0;
  for (int iter = 0; iter < 50; ++iter) {
    double norm = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) acc += m[i][j] * v[j];
      w[i] = acc;
      norm = std::max(norm, std::abs(acc));
    }
    if (norm == 0.0) return 0.0;
    for (std::size_t i = 0; i < k; ++i) v[i] = w[i] / norm;
    ratio = norm;
  }
  return ratio;
}

Solution solve_stratified(const EquationSystem& system,
                          const SccDecomposition& decomposition) {
  const auto lin = check_linearity(system, decomposition);
  if (!lin.ok) {
    const auto& v = lin.violations.front();
    throw SolverError("nonlinear alternative in equation for " + system.name(v.variable));
  }

  Solution sol;
  sol.method = SolveMethod::stratifiedLinear;
  sol.values.assign(system.size(), 0.0);

  for (std::uint32_t s = 0; s < decomposition.strata.size(); ++s) {
    const auto& members = decomposition.strata[s];
    const std::size_t k = members.size();

    if (k == 1 && !decomposition.selfRecursive[s]) {
      std::uint32_t v = members[0];
      sol.values[v] = clampValue(evalEquation(system.equation(v), sol.values),
                                 system.name(v));
      continue;
    }

    // X = M X + Y over this stratum, lower strata substituted as constants
    std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
    std::vector<double> y(k, 0.0);
    std::vector<std::uint32_t> col(system.size(), 0);
    for (std::uint32_t c = 0; c < k; ++c) col[members[c]] = c;

    for (std::uint32_t r = 0; r < k; ++r) {
      const Equation& eq = system.equation(members[r]);
      for (const Term& t : eq.terms) {
        double coef = t.coef;
        std::int64_t inScc = -1;
        for (std::uint32_t v : t.vars) {
          if (decomposition.sccOf[v] == s)
            inScc = col[v];  // at most one by linearity
          else
            coef *= sol.values[v];
        }
        if (inScc < 0)
          y[r] += coef;
        else
          m[r][static_cast<std::size_t>(inScc)] += coef;
      }
    }

    sol.spectra.push_back({s, spectral_radius_estimate(m)});

    // Gaussian elimination with partial pivoting on (I - M) x = y
    std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) a[i][j] = (i == j ? 1.0 : 0.0) - m[i][j];
    std::vector<double> b = y;

    for (std::size_t pc = 0; pc < k; ++pc) {
      std::size_t pivot = pc;
      for (std::size_t r = pc + 1; r < k; ++r)
        if (std::abs(a[r][pc]) > std::abs(a[pivot][pc])) pivot = r;
      if (std::abs(a[pivot][pc]) < kPivotThreshold) {
        std::ostringstream msg;
        msg << "singular stratum (pivot " << fmt_double(a[pivot][pc])
            << ", spectral estimate " << fmt_double(sol.spectra.back().spectralEstimate)
            << "):";
        for (std::uint32_t v : members) msg << ' ' << system.name(v);
        throw SolverError(msg.str());
      }
      std::swap(a[pc], a[pivot]);
      std::swap(b[pc], b[pivot]);
      for (std::size_t r = pc + 1; r < k; ++r) {
        double f = a[r][pc] / a[pc][pc];
        if (f == 0.0) continue;
        for (std::size_t c = pc; c < k; ++c) a[r][c] -= f * a[pc][c];
        b[r] -= f * b[pc];
      }
    }
    std::vector<double> x(k, 0.0);
    for (std::size_t ri = k; ri-- > 0;) {
      double acc = b[ri];
      for (std::size_t c = ri + 1; c < k; ++c) acc -= a[ri][c] * x[c];
      x[ri] = acc / a[ri][ri];
    }
    for (std::size_t i = 0; i < k; ++i)
      sol.values[members[i]] = clampValue(x[i], system.name(members[i]));
  }
  return sol;
}

Solution solve_fixpoint(const EquationSystem& system, const FixpointOptions& options) {
  Solution sol;
  sol.method = SolveMethod::fixpoint;
  const std::size_t n = system.size();
  std::vector<double> x(n, 0.0), next(n, 0.0);
  sol.converged = false;
  for (std::uint64_t iter = 1; iter <= options.maxIter; ++iter) {
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = evalEquation(system.equation(i), x);
      delta = std::max(delta, std::abs(next[i] - x[i]));
      if (next[i] + 1e-12 < x[i]) sol.monotone = false;
      if (next[i] > 1.0 + kClampSlack) sol.bounded = false;
    }
    x.swap(next);
    sol.iterations = iter;
    if (delta < options.tol) {
      sol.converged = true;
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::min(1.0, std::max(0.0, x[i]));
  sol.values = std::move(x);
  return sol;
}

std::string dump_equations(const EquationSystem& system) {
  std::ostringstream out;
  for (std::uint32_t i = 0; i < system.size(); ++i) {
    out << "X(" << system.name(i) << ") =";
    const Equation& eq = system.equation(i);
    if (eq.terms.empty()) {
      out << " 0";  // unprovable goals never reach assemble, but stay total
    } else {
      for (std::size_t t = 0; t < eq.terms.size(); ++t) {
        out << (t ? " + " : " ") << fmt_double(eq.terms[t].coef);
        for (std::uint32_t v : eq.terms[t].vars) out << "*X(" << system.name(v) << ")";
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace cyclex
