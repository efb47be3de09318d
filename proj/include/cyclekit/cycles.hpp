#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cyclekit/averaging.hpp"

namespace cyclekit {

enum class Stability { Stable, Unstable, Degenerate };
enum class OriginNature { StableFocus, UnstableFocus, CenterType };
enum class ParityClass { EvenEven, EvenOdd, OddEven, OddOdd };

inline std::string to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "Stable";
    case Stability::Unstable: return "Unstable";
    case Stability::Degenerate: break;
  }
  return "Degenerate";
}

inline std::string to_string(OriginNature o) {
  switch (o) {
    case OriginNature::StableFocus: return "StableFocus";
    case OriginNature::UnstableFocus: return "UnstableFocus";
    case OriginNature::CenterType: break;
  }
  return "CenterType";
}

inline std::string to_string(ParityClass p) {
  switch (p) {
    case ParityClass::EvenEven: return "EvenEven";
    case ParityClass::EvenOdd: return "EvenOdd";
    case ParityClass::OddEven: return "OddEven";
    case ParityClass::OddOdd: break;
  }
  return "OddOdd";
}

struct RadialRoot {
  double rho = 0.0;
  // Set when a small rational is an exact root of the radial polynomial.
  std::optional<Rational> rho_exact;
  int multiplicity = 1;
  double condition = 1.0;

  double radius() const { return std::sqrt(rho); }
};

struct RadialRoots {
  std::vector<RadialRoot> roots;
  // Distinct roots off the positive axis, metadata only.
  int complex_pairs = 0;
  int nonpositive_real = 0;
  std::vector<std::string> warnings;
};

inline constexpr double kOriginRootTolerance = 1e-9;
inline constexpr double kIllConditioned = 1e8;

namespace detail {

inline std::vector<std::complex<double>> companion_eigenvalues(const UniPoly<Rational>& p) {
  const int d = p.degree();
  if (d < 1) return {};
  if (d == 1) return {std::complex<double>(to_double(-p.coeff(0) / p.coeff(1)), 0.0)};
  const UniPoly<Rational> monic = make_monic(p);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) C(i, d - 1) = -to_double(monic.coeff(i));
  Eigen::EigenSolver<Eigen::MatrixXd> solver(C, false);
  std::vector<std::complex<double>> out;
  for (int i = 0; i < d; ++i) out.push_back(solver.eigenvalues()(i));
  return out;
}

// Newton on the exact polynomial, rounding back to double after each step.
inline double polish_root(const UniPoly<Rational>& p, double x) {
  const UniPoly<Rational> dp = p.derivative();
  for (int iter = 0; iter < 6; ++iter) {
    const Rational xr = rational_from_double(x);
    const Rational fx = p.evaluate(xr);
    if (fx.is_zero()) break;
    const Rational dfx = dp.evaluate(xr);
    if (dfx.is_zero()) break;
    const double next = to_double(xr - fx / dfx);
    if (!std::isfinite(next) || next == x) break;
    x = next;
  }
  return x;
}

inline double root_condition(const UniPoly<Rational>& p, double x) {
  double sum = 0.0, xp = 1.0;
  for (int i = 0; i <= p.degree(); ++i) {
    sum += std::abs(to_double(p.coeff(i))) * xp;
    xp *= std::abs(x);
  }
  const double slope = std::abs(x * p.derivative().evaluate_double(x));
  return slope > 0.0 ? sum / slope : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Real roots rho > tol of the radial polynomial. Multiplicities come from an
/// exact square-free decomposition; each square-free factor's positive roots
/// are counted by a Sturm sequence, located as companion-matrix eigenvalues
/// and polished by Newton on the exact factor.
inline RadialRoots radial_roots(const AveragedDynamics& avg, double tol = kOriginRootTolerance) {
  const UniPoly<Rational>& R = avg.radial_reduced;
  if (R.is_zero()) {
    throw IdenticallyZero("radial polynomial vanishes identically; first-order averaging is "
                          "inconclusive (center-type)");
  }
  RadialRoots out;
  const Rational lower = rational_from_double(tol);
  const auto factors = squarefree_decomposition(R);
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const UniPoly<Rational>& f = factors[k];
    if (f.degree() < 1) continue;
    const int multiplicity = static_cast<int>(k) + 1;
    const int positive = count_real_roots_above(f, lower);
    const int real = count_real_roots(f);
    out.nonpositive_real += real - positive;
    out.complex_pairs += (f.degree() - real) / 2;
    if (positive == 0) continue;

    std::vector<std::complex<double>> candidates;
    for (const auto& z : detail::companion_eigenvalues(f)) {
      if (z.real() > tol) candidates.push_back(z);
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) { return std::abs(a.imag()) < std::abs(b.imag()); });
    if (static_cast<int>(candidates.size()) < positive) {
      out.warnings.push_back("eigenvalue solver resolved fewer positive roots than the Sturm count");
    }
    candidates.resize(std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(positive)));
    for (const auto& z : candidates) {
      RadialRoot root;
      root.multiplicity = multiplicity;
      if (f.degree() == 1) {
        root.rho_exact = -f.coeff(0) / f.coeff(1);
        root.rho = to_double(*root.rho_exact);
      } else {
        root.rho = detail::polish_root(f, z.real());
        if (const auto snap = best_rational(root.rho, 1000000);
            snap && f.evaluate(*snap).is_zero()) {
          root.rho_exact = snap;
          root.rho = to_double(*snap);
        }
      }
      root.condition = root.rho_exact ? 1.0 : detail::root_condition(f, root.rho);
      if (root.condition > kIllConditioned) {
        out.warnings.push_back("IllConditioned: root rho = " + std::to_string(root.rho) +
                               " has condition number " + std::to_string(root.condition));
      }
      out.roots.push_back(root);
    }
  }
  std::sort(out.roots.begin(), out.roots.end(),
            [](const RadialRoot& a, const RadialRoot& b) { return a.rho < b.rho; });
  return out;
}

struct ParityBound {
  int N = 0;
  int M = 0;
  ParityClass parity_class = ParityClass::EvenEven;
  int max_real_roots = 0;
  int max_cycles = 0;
};

/// Closed-form maximum number of cycles by the parities of N and M.
inline ParityBound parity_bound(int N, int M) {
  if (N < 1 || M < 1) throw InputError("parity_bound needs N >= 1 and M >= 1");
  ParityBound b;
  b.N = N;
  b.M = M;
  const bool n_even = N % 2 == 0, m_even = M % 2 == 0;
  if (n_even == m_even) {
    b.parity_class = n_even ? ParityClass::EvenEven : ParityClass::OddOdd;
    b.max_real_roots = N + M - 2;
  } else if (n_even) {
    b.parity_class = ParityClass::EvenOdd;
    b.max_real_roots = N + M - 1;
  } else {
    b.parity_class = ParityClass::OddEven;
    b.max_real_roots = N + M - 3;
  }
  b.max_cycles = b.max_real_roots / 2;
  return b;
}

struct DegreeBound {
  int oplus = 0;
  int R = 0;

  friend bool operator==(const DegreeBound&, const DegreeBound&) = default;
};

/// Degree of the radial polynomial of a fully generic (N, M) table, obtained
/// by running the averaging rule over every monomial of the table; R counts
/// the roots +-sqrt(rho) in r.
inline DegreeBound generic_degree_bound(int N, int M) {
  if (N < 1 || M < 1) throw InputError("generic_degree_bound needs N >= 1 and M >= 1");
  std::vector<std::pair<int, int>> support;
  for (int n = 0; n <= N; ++n) {
    for (int m = 0; m <= M; ++m) support.emplace_back(n, m);
  }
  int degree = 0;
  for (const auto& t : averaging_rule(support).radial) degree = std::max(degree, t.rho_power);
  return {N + M, 2 * degree};
}

using DegreeTable = std::vector<std::vector<DegreeBound>>;

/// Grid of generic_degree_bound for 1 <= N <= n_max (rows), 1 <= M <= m_max.
inline DegreeTable degree_bound_table(int n_max, int m_max) {
  if (n_max < 1 || m_max < 1) throw InputError("table bounds must be at least 1");
  DegreeTable grid(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    for (int m = 1; m <= m_max; ++m) grid[n - 1].push_back(generic_degree_bound(n, m));
  }
  return grid;
}

/// Aligned text, one row per N, cells "oplus,R".
inline std::string degree_table_text(const DegreeTable& grid) {
  std::size_t width = 0;
  for (const auto& row : grid) {
    for (const auto& c : row) {
      width = std::max(width, (std::to_string(c.oplus) + "," + std::to_string(c.R)).size());
    }
  }
  const std::size_t label = std::to_string(grid.size()).size();
  std::ostringstream os;
  os << std::string(label, ' ') << " | ";
  const std::size_t cols = grid.empty() ? 0 : grid.front().size();
  for (std::size_t m = 1; m <= cols; ++m) {
    const std::string h = "M=" + std::to_string(m);
    width = std::max(width, h.size());
  }
  for (std::size_t m = 1; m <= cols; ++m) {
    const std::string h = "M=" + std::to_string(m);
    os << (m > 1 ? " " : "") << std::string(width - h.size(), ' ') << h;
  }
  os << '\n' << std::string(label + 1, '-') << "+" << std::string(1 + cols * (width + 1), '-') << '\n';
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const std::string l = std::to_string(n + 1);
    os << std::string(label - l.size(), ' ') << l << " | ";
    for (std::size_t m = 0; m < grid[n].size(); ++m) {
      const std::string cell = std::to_string(grid[n][m].oplus) + "," + std::to_string(grid[n][m].R);
      os << (m > 0 ? " " : "") << std::string(width - cell.size(), ' ') << cell;
    }
    os << '\n';
  }
  return os.str();
}

/// Long-format CSV with header N,M,oplus,R.
inline std::string degree_table_csv(const DegreeTable& grid) {
  std::ostringstream os;
  os << "N,M,oplus,R\n";
  for (std::size_t n = 0; n < grid.size(); ++n) {
    for (std::size_t m = 0; m < grid[n].size(); ++m) {
      os << n + 1 << ',' << m + 1 << ',' << grid[n][m].oplus << ',' << grid[n][m].R << '\n';
    }
  }
  return os.str();
}

struct CycleEstimate {
  double radius = 0.0;
  double rho = 0.0;
  std::optional<Rational> rho_exact;
  int multiplicity = 1;
  Stability stability = Stability::Degenerate;
  // eps * Phi(rho*), the tau-time phase drift on the cycle.
  double freq_correction = 0.0;
  // omega (1 + eps Phi(rho*)), angular frequency in t-time.
  double corrected_frequency = 0.0;
};

struct CycleReport {
  OriginNature origin_nature = OriginNature::CenterType;
  std::vector<CycleEstimate> cycles;
  ParityBound bound;
  bool saturated = false;
  int complex_pairs = 0;
  int nonpositive_real = 0;
  std::vector<std::string> warnings;
};

namespace detail {

// Sign of the first nonvanishing derivative of order >= 1 at the root,
// together with its order.
inline std::pair<int, int> first_nonzero_derivative(const UniPoly<Rational>& p, const RadialRoot& r) {
  UniPoly<Rational> d = p;
  for (int order = 1; order <= std::max(1, p.degree()); ++order) {
    d = d.derivative();
    int s = 0;
    if (r.rho_exact) {
      s = d.evaluate(*r.rho_exact).sign();
    } else {
      if (order < r.multiplicity) continue;
      const double v = d.evaluate_double(r.rho);
      s = (v > 0) - (v < 0);
    }
    if (s != 0) return {order, s};
  }
  return {0, 0};
}

}  // namespace detail

/// Stability of each root from the sign change of r R(r^2) across it, origin
/// nature from sign(B01), and the first-order frequency correction.
inline CycleReport classify_cycles(const AveragedDynamics& avg, const RadialRoots& roots) {
  CycleReport rep;
  const int s0 = avg.radial_reduced.coeff(0).sign();
  rep.origin_nature = s0 > 0   ? OriginNature::UnstableFocus
                      : s0 < 0 ? OriginNature::StableFocus
                               : OriginNature::CenterType;
  rep.bound = parity_bound(std::max(1, avg.N), std::max(1, avg.M));
  rep.complex_pairs = roots.complex_pairs;
  rep.nonpositive_real = roots.nonpositive_real;
  rep.warnings = avg.warnings;
  rep.warnings.insert(rep.warnings.end(), roots.warnings.begin(), roots.warnings.end());
  const double eps = to_double(avg.eps);
  for (const auto& r : roots.roots) {
    CycleEstimate c;
    c.rho = r.rho;
    c.rho_exact = r.rho_exact;
    c.radius = r.radius();
    c.multiplicity = r.multiplicity;
    const auto [order, s] = detail::first_nonzero_derivative(avg.radial_reduced, r);
    if (order % 2 == 0) {
      c.stability = Stability::Degenerate;
    } else {
      c.stability = s < 0 ? Stability::Stable : Stability::Unstable;
    }
    c.freq_correction = eps * (r.rho_exact ? to_double(avg.phase.evaluate(*r.rho_exact))
                                           : avg.phase.evaluate_double(r.rho));
    c.corrected_frequency = avg.omega * (1.0 + c.freq_correction);
    rep.cycles.push_back(c);
  }
  rep.saturated = static_cast<int>(rep.cycles.size()) == rep.bound.max_cycles;
  if (static_cast<int>(rep.cycles.size()) > rep.bound.max_cycles) {
    rep.warnings.push_back("cycle count exceeds the parity bound");
  }
  return rep;
}

/// Cycle report of an averaged system; R identically zero yields an empty
/// center-type report instead of an error.
inline CycleReport count_cycles(const AveragedDynamics& avg) {
  if (avg.radial_reduced.is_zero()) {
    CycleReport rep = classify_cycles(avg, RadialRoots{});
    rep.warnings.push_back("radial polynomial is identically zero: center-type at first order");
    return rep;
  }
  return classify_cycles(avg, radial_roots(avg));
}

}  // namespace cyclekit
