#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "cyclekit/fixed_points.hpp"
#include "cyclekit/kinetic.hpp"
#include "cyclekit/lls.hpp"

namespace cyclekit {

/// Affine change of variables
///   s = beta0 + beta1 x + beta2 y,   u = s' = alpha0 + alpha1 x + alpha2 y
/// and its inverse  x = L(s, u) = c1 s + c2 u + cL,  y = K(s, u) = c3 s + c4 u + cK.
template <class S>
struct ReductionMap {
  S beta0{0}, beta1{0}, beta2{0};
  S alpha0{0}, alpha1{0}, alpha2{0};
  S c1{0}, c2{0}, c3{0}, c4{0}, cL{0}, cK{0};
  S det{0};
  // True for the normalized choice beta = (-mu, 1).
  bool normalized = true;

  BiPoly<S> L() const {
    BiPoly<S> p;
    p.add_term(c1, 1, 0);
    p.add_term(c2, 0, 1);
    p.add_term(cL, 0, 0);
    return p;
  }
  BiPoly<S> K() const {
    BiPoly<S> p;
    p.add_term(c3, 1, 0);
    p.add_term(c4, 0, 1);
    p.add_term(cK, 0, 0);
    return p;
  }

  /// (x, y) -> (s, u).
  std::pair<S, S> forward(const S& x, const S& y) const {
    return {beta0 + beta1 * x + beta2 * y, alpha0 + alpha1 * x + alpha2 * y};
  }
  /// (s, u) -> (x, y).
  std::pair<S, S> inverse(const S& s, const S& u) const {
    return {c1 * s + c2 * u + cL, c3 * s + c4 * u + cK};
  }
};

namespace detail {

template <class S>
ReductionMap<S> map_for_beta(const KineticSystem<S>& sys, const FixedPoint<S>& fp, const S& beta1,
                             const S& beta2) {
  ReductionMap<S> m;
  const auto& a = sys.a();
  const auto& b = sys.b();
  m.beta1 = beta1;
  m.beta2 = beta2;
  m.beta0 = -(beta1 * fp.x + beta2 * fp.y);
  // u = beta1 x' + beta2 y'; the f-part carries weight (beta1 + mu beta2),
  // which vanishes for the normalized beta and otherwise only multiplies an
  // affine f.
  const S w = beta1 + sys.mu() * beta2;
  m.alpha0 = beta1 * a[0] + beta2 * b[0] + w * sys.f().coeff(0, 0);
  m.alpha1 = beta1 * a[1] + beta2 * b[1] + w * sys.f().coeff(1, 0);
  m.alpha2 = beta1 * a[2] + beta2 * b[2] + w * sys.f().coeff(0, 1);
  m.det = m.alpha1 * m.beta2 - m.alpha2 * m.beta1;
  if (!detail::coeff_is_zero(m.det)) {
    const S inv = S(1) / m.det;
    m.c1 = -m.alpha2 * inv;
    m.c2 = m.beta2 * inv;
    m.cL = (m.alpha2 * m.beta0 - m.alpha0 * m.beta2) * inv;
    m.c3 = m.alpha1 * inv;
    m.c4 = -m.beta1 * inv;
    m.cK = (m.alpha0 * m.beta1 - m.alpha1 * m.beta0) * inv;
  }
  return m;
}

}  // namespace detail

/// Chooses beta = (-mu, 1), which removes f from u = s' so that u is affine
/// in (x, y), and builds the inverse map. For a system without nonlinearity
/// any beta works; a few fallbacks are tried if the normalized one is
/// degenerate.
template <class S>
ReductionMap<S> build_reduction_map(const KineticSystem<S>& sys, const FixedPoint<S>& fp) {
  ReductionMap<S> m = detail::map_for_beta(sys, fp, -sys.mu(), S(1));
  if (!detail::coeff_is_zero(m.det)) return m;
  if (sys.nonlinear()) {
    throw NotReducible(
        "alpha1*beta2 - alpha2*beta1 = 0 for beta = (-mu, 1), the only choice that keeps "
        "s' affine; the system cannot be brought to LLS form by an affine map");
  }
  const std::array<std::pair<int, int>, 3> fallbacks{{{1, 0}, {0, 1}, {1, 1}}};
  for (const auto& [b1, b2] : fallbacks) {
    m = detail::map_for_beta(sys, fp, S(b1), S(b2));
    if (!detail::coeff_is_zero(m.det)) {
      m.normalized = false;
      return m;
    }
  }
  throw DegenerateTransform("alpha1*beta2 - alpha2*beta1 = 0 for every candidate beta");
}

struct ReduceOptions {
  // Largest |A00| tolerated (and then dropped) when the fixed point is inexact.
  double a00_tolerance = 1e-12;
};

/// Coefficient table of s'' = A00 + A10 s + A01 s' + (alpha1 + mu alpha2) phi(s, s')
/// assembled term by term, where phi = f(L, K). Returns the raw table, A00
/// included.
template <class S>
BiPoly<S> assemble_table(const KineticSystem<S>& sys, const ReductionMap<S>& m) {
  const auto& a = sys.a();
  const auto& b = sys.b();
  const BiPoly<S> phi = compose(sys.f(), m.L(), m.K());
  const S weight = m.alpha1 + sys.mu() * m.alpha2;
  const S px = m.alpha1 * a[1] + m.alpha2 * b[1];
  const S py = m.alpha1 * a[2] + m.alpha2 * b[2];

  BiPoly<S> table = phi * weight;
  table.add_term(m.alpha1 * a[0] + m.alpha2 * b[0] + px * m.cL + py * m.cK, 0, 0);
  table.add_term(m.alpha1 * (a[1] * m.c1 + a[2] * m.c3) + m.alpha2 * (b[1] * m.c1 + b[2] * m.c3),
                 1, 0);
  table.add_term(m.alpha1 * (a[1] * m.c2 + a[2] * m.c4) + m.alpha2 * (b[1] * m.c2 + b[2] * m.c4),
                 0, 1);
  return table;
}

/// Same table by brute substitution: alpha1 x'(L, K) + alpha2 y'(L, K).
template <class S>
BiPoly<S> expand_second_derivative(const KineticSystem<S>& sys, const ReductionMap<S>& m) {
  const BiPoly<S> L = m.L();
  const BiPoly<S> K = m.K();
  return compose(sys.rhs_first(), L, K) * m.alpha1 + compose(sys.rhs_second(), L, K) * m.alpha2;
}

template <class S>
LLSSystem<S> reduce_to_lls(const KineticSystem<S>& sys, const FixedPoint<S>& fp,
                           const ReductionMap<S>& map, const ReduceOptions& opts = {}) {
  BiPoly<S> table = assemble_table(sys, map);
  const S a00 = table.coeff(0, 0);
  if (!detail::coeff_is_zero(a00)) {
    bool tolerated = false;
    if constexpr (std::is_same_v<S, Rational>) {
      tolerated = !fp.exact && std::abs(to_double(a00)) <= opts.a00_tolerance;
    }
    if (!tolerated) {
      throw FixedPointNotShifted("A00 does not vanish at the chosen point; it is not a fixed point");
    }
    table.set_term(S(0), 0, 0);
  }
  return LLSSystem<S>(std::move(table));
}

/// One-shot reduction at `fp`.
template <class S>
std::pair<ReductionMap<S>, LLSSystem<S>> reduce(const KineticSystem<S>& sys,
                                                const FixedPoint<S>& fp,
                                                const ReduceOptions& opts = {}) {
  auto map = build_reduction_map(sys, fp);
  auto lls = reduce_to_lls(sys, fp, map, opts);
  return {std::move(map), std::move(lls)};
}

/// Class tag plus the local limit-cycle precondition F(0,0) < 0.
struct LlsDiagnosis {
  LlsClass cls = LlsClass::GeneralLLS;
  Rational f00{0};
  int f00_sign = 0;
  // F(0,0) + 2 Re(lambda) from the fixed point's Jacobian, when known.
  std::optional<double> eigen_residual;
  std::string note;
};

inline LlsDiagnosis classify_lls(const LLSSystem<Rational>& lls,
                                 const std::optional<FixedPointInfo>& fp = std::nullopt) {
  LlsDiagnosis d;
  d.cls = lls.classification();
  d.f00 = lls.damping_at_origin();
  d.f00_sign = d.f00.sign();
  if (fp) {
    d.eigen_residual = to_double(d.f00) + (fp->lambda_plus + fp->lambda_minus).real();
  }
  if (d.f00_sign < 0) {
    d.note = "F(0,0) < 0: origin repels, a locally stable limit cycle is possible";
  } else if (d.f00_sign > 0) {
    d.note = "F(0,0) > 0: origin attracts; any innermost cycle is unstable";
  } else {
    d.note = "F(0,0) = 0: center-type linearization";
  }
  return d;
}

}  // namespace cyclekit
