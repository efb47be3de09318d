#pragma once

#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cyclekit/lls.hpp"

namespace cyclekit {

/// Mean of cos^(2a) t * sin^(2b) t over one period:
///   (2a)! (2b)! / (4^(a+b) a! b! (a+b)!).
inline Rational wallis(int a, int b) {
  if (a < 0 || b < 0) throw InputError("wallis: negative index");
  auto factorial = [](int n) {
    Integer f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  };
  Integer four_pow = 1;
  four_pow <<= 2 * (a + b);
  return Rational(factorial(2 * a) * factorial(2 * b),
                  four_pow * factorial(a) * factorial(b) * factorial(a + b));
}

/// One contribution  weight * omega^omega_power * B_nm * rho^rho_power  to an
/// averaged polynomial.
struct AveragingTerm {
  int rho_power = 0;
  int n = 0;
  int m = 0;
  int omega_power = 0;
  Rational weight;

  friend bool operator==(const AveragingTerm&, const AveragingTerm&) = default;
};

/// First-order averaging of the perturbation
///   h(Z, Z') = -sum B_nm omega^m Z^n Z'^m      over (n, m) != (0,0), (1,0)
/// on Z = r cos t, Z' = -r sin t, expressed term by term. `radial` holds the
/// terms of R(rho) with dr/dtau = eps r R(r^2); `phase` those of Phi(rho) with
/// dphi/dtau = eps Phi(r^2).
///
/// Only (n even, m odd) survive in R and only (n odd, m even) in Phi; every
/// other monomial averages to zero against sin t or cos t.
struct AveragingRule {
  std::vector<AveragingTerm> radial;
  std::vector<AveragingTerm> phase;
};

inline AveragingRule averaging_rule(const std::vector<std::pair<int, int>>& support) {
  AveragingRule rule;
  std::set<std::pair<int, int>> seen;
  for (const auto& [n, m] : support) {
    if (n < 0 || m < 0) throw InputError("averaging_rule: negative exponent");
    if ((n == 0 && m == 0) || (n == 1 && m == 0)) continue;
    if (!seen.insert({n, m}).second) continue;
    if (n % 2 == 0 && m % 2 == 1) {
      rule.radial.push_back({(n + m - 1) / 2, n, m, m, wallis(n / 2, (m + 1) / 2)});
    } else if (n % 2 == 1 && m % 2 == 0) {
      rule.phase.push_back({(n + m - 1) / 2, n, m, m, -wallis((n + 1) / 2, m / 2)});
    }
  }
  return rule;
}

/// LLS oscillator rescaled to  Z'' + eps h(Z, Z') + Z = 0  with tau = omega t,
/// sigma = |F(0,0)| (1 when F(0,0) = 0), omega^2 = -A10, eps = sigma/omega^2,
/// B = A/sigma.
struct RescaledOscillator {
  Rational sigma;
  Rational omega_sq;
  double omega = 0.0;
  Rational eps;
  BiPoly<Rational> B;
  int b01_sign = 0;
  bool sigma_fallback = false;
  int N = 0;
  int M = 0;
  std::vector<std::string> warnings;

  /// h = h_even + omega * h_odd, both exact: the terms with even m carry an
  /// even power of omega, the odd ones a single extra factor of omega.
  BiPoly<Rational> h_even() const { return h_part(0); }
  BiPoly<Rational> h_odd() const { return h_part(1); }

  BiPoly<double> h() const {
    BiPoly<double> out = h_even().to_double_poly();
    out += h_odd().to_double_poly() * omega;
    return out;
  }

 private:
  BiPoly<Rational> h_part(int parity) const {
    BiPoly<Rational> p;
    for (const auto& [e, c] : B.terms()) {
      const auto [n, m] = e;
      if (n == 1 && m == 0) continue;
      if (m % 2 != parity) continue;
      p.add_term(-c * ipow(omega_sq, static_cast<unsigned>(m / 2)), n, m);
    }
    return p;
  }
};

inline constexpr double kWeakNonlinearityLimit = 0.3;

inline RescaledOscillator rescale(const LLSSystem<Rational>& lls) {
  RescaledOscillator osc;
  osc.omega_sq = -lls.A(1, 0);
  if (osc.omega_sq.sign() <= 0) {
    throw NotOscillatory("-A10 = " + to_string(osc.omega_sq) +
                         " is not positive; there is no linear frequency to average around");
  }
  osc.omega = std::sqrt(to_double(osc.omega_sq));
  const Rational a01 = lls.A(0, 1);
  if (a01.is_zero()) {
    osc.sigma = 1;
    osc.sigma_fallback = true;
  } else {
    osc.sigma = abs(a01);
  }
  osc.eps = osc.sigma / osc.omega_sq;
  osc.B = lls.table() * (Rational(1) / osc.sigma);
  osc.b01_sign = osc.B.coeff(0, 1).sign();
  osc.N = lls.N();
  osc.M = lls.M();
  if (!osc.sigma_fallback && to_double(osc.eps) >= kWeakNonlinearityLimit) {
    osc.warnings.push_back("eps = " + std::to_string(to_double(osc.eps)) +
                           " is not small; first-order averaging is only heuristic here");
  }
  return osc;
}

/// Averaged amplitude/phase dynamics in tau-time:
///   dr/dtau = eps r R(r^2),   dphi/dtau = eps Phi(r^2),   R = omega * radial_reduced.
struct AveragedDynamics {
  UniPoly<Rational> radial_reduced;
  UniPoly<Rational> phase;
  Rational eps;
  Rational omega_sq;
  double omega = 0.0;
  int N = 0;
  int M = 0;
  std::vector<std::string> warnings;

  UniPoly<double> radial() const { return radial_reduced.to_double_poly() * omega; }

  double dr_dtau(double r) const {
    return to_double(eps) * r * omega * radial_reduced.evaluate_double(r * r);
  }
  double dphi_dtau(double r) const { return to_double(eps) * phase.evaluate_double(r * r); }
};

inline AveragedDynamics kb_average(const RescaledOscillator& osc) {
  std::vector<std::pair<int, int>> support;
  for (const auto& [e, c] : osc.B.terms()) support.push_back(e);
  const AveragingRule rule = averaging_rule(support);

  auto collect = [&](const std::vector<AveragingTerm>& terms, int omega_offset) {
    int top = -1;
    for (const auto& t : terms) top = std::max(top, t.rho_power);
    std::vector<Rational> coeffs(static_cast<std::size_t>(top + 1), Rational(0));
    for (const auto& t : terms) {
      const auto even_power = static_cast<unsigned>((t.omega_power - omega_offset) / 2);
      coeffs[static_cast<std::size_t>(t.rho_power)] +=
          t.weight * osc.B.coeff(t.n, t.m) * ipow(osc.omega_sq, even_power);
    }
    return UniPoly<Rational>(std::move(coeffs));
  };

  AveragedDynamics avg;
  avg.radial_reduced = collect(rule.radial, 1);
  avg.phase = collect(rule.phase, 0);
  avg.eps = osc.eps;
  avg.omega_sq = osc.omega_sq;
  avg.omega = osc.omega;
  avg.N = osc.N;
  avg.M = osc.M;
  avg.warnings = osc.warnings;
  return avg;
}

struct NumericAverage {
  double dr = 0.0;
  double dphi = 0.0;
};

/// Brute-force averages <eps h sin t> and <eps h cos t>/r at fixed amplitude r
/// by the trapezoid rule over one period; the integrand is smooth and
/// periodic so the rule converges spectrally.
inline NumericAverage numeric_average_oracle(const RescaledOscillator& osc, double r,
                                             int samples = 4096) {
  if (!(r > 0)) throw InputError("numeric_average_oracle: amplitude must be positive");
  const BiPoly<double> h = osc.h();
  const double eps = to_double(osc.eps);
  double s_sin = 0.0, s_cos = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = 2.0 * std::numbers::pi * k / samples;
    const double c = std::cos(t), s = std::sin(t);
    const double hv = h.evaluate(r * c, -r * s);
    s_sin += hv * s;
    s_cos += hv * c;
  }
  return {eps * s_sin / samples, eps * s_cos / samples / r};
}

}  // namespace cyclekit
