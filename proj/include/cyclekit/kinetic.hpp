#pragma once

#include <array>
#include <string>

#include "cyclekit/bipoly.hpp"

namespace cyclekit {

using State = std::array<double, 2>;
using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Planar polynomial vector field with double coefficients.
struct PolynomialField {
  BiPoly<double> first;
  BiPoly<double> second;

  State operator()(const State& s) const {
    return {first.evaluate(s[0], s[1]), second.evaluate(s[0], s[1])};
  }

  Matrix2 jacobian(const State& s) const {
    const auto d1u = first.derivative(Variable::First);
    const auto d1v = first.derivative(Variable::Second);
    const auto d2u = second.derivative(Variable::First);
    const auto d2v = second.derivative(Variable::Second);
    return {{{d1u.evaluate(s[0], s[1]), d1v.evaluate(s[0], s[1])},
             {d2u.evaluate(s[0], s[1]), d2v.evaluate(s[0], s[1])}}};
  }
};

template <class S>
struct FixedPoint {
  S x;
  S y;
  // False when the coordinates came from a floating-point root finder; the
  // reduction then tolerates a tiny residual constant term.
  bool exact = true;
};

/// dx/dt = a0 + a1 x + a2 y + f(x, y)
/// dy/dt = b0 + b1 x + b2 y + mu f(x, y)
///
/// The second nonlinearity is tied to the first through mu. By default f
/// carries no constant or linear part; `allow_affine_f` lifts that.
template <class S>
class KineticSystem {
 public:
  KineticSystem() = default;

  KineticSystem(std::array<S, 3> a, std::array<S, 3> b, S mu, BiPoly<S> f,
                bool allow_affine_f = false)
      : a_(std::move(a)), b_(std::move(b)), mu_(std::move(mu)), f_(std::move(f)) {
    if (!allow_affine_f) {
      for (const auto& [e, c] : f_.terms()) {
        if (e.first + e.second <= 1) {
          throw InputError(
              "f has a constant or linear term; move it into a/b or set allow_affine_f");
        }
      }
    }
  }

  /// Splits two full right-hand sides into the (a, b, mu, f) form. Rejects
  /// systems whose second nonlinearity is not a constant multiple of the
  /// first.
  static KineticSystem from_rhs(const BiPoly<S>& first, const BiPoly<S>& second) {
    BiPoly<S> fn, gn;
    std::array<S, 3> a{first.coeff(0, 0), first.coeff(1, 0), first.coeff(0, 1)};
    std::array<S, 3> b{second.coeff(0, 0), second.coeff(1, 0), second.coeff(0, 1)};
    for (const auto& [e, c] : first.terms()) {
      if (e.first + e.second >= 2) fn.add_term(c, e.first, e.second);
    }
    for (const auto& [e, c] : second.terms()) {
      if (e.first + e.second >= 2) gn.add_term(c, e.first, e.second);
    }
    if (fn.is_zero()) {
      if (!gn.is_zero()) {
        throw NotReducible(
            "nonlinearity appears only in the second equation (g != mu f for any mu); "
            "swap the two variables so that it sits in the first");
      }
      return KineticSystem(a, b, S(0), fn);
    }
    const auto& [lead_exp, lead_c] = *fn.terms().begin();
    const S mu = gn.coeff(lead_exp.first, lead_exp.second) / lead_c;
    if (gn != fn * mu) {
      throw NotReducible("second nonlinearity is not a constant multiple of the first (g != mu f)");
    }
    return KineticSystem(a, b, mu, fn);
  }

  const std::array<S, 3>& a() const { return a_; }
  const std::array<S, 3>& b() const { return b_; }
  const S& mu() const { return mu_; }
  const BiPoly<S>& f() const { return f_; }

  /// True when f has a term of total degree two or more.
  bool nonlinear() const { return f_.total_degree() >= 2; }

  BiPoly<S> rhs_first() const {
    BiPoly<S> p = f_;
    p.add_term(a_[0], 0, 0);
    p.add_term(a_[1], 1, 0);
    p.add_term(a_[2], 0, 1);
    return p;
  }
  BiPoly<S> rhs_second() const {
    BiPoly<S> p = f_ * mu_;
    p.add_term(b_[0], 0, 0);
    p.add_term(b_[1], 1, 0);
    p.add_term(b_[2], 0, 1);
    return p;
  }

  PolynomialField field() const {
    return {rhs_first().to_double_poly(), rhs_second().to_double_poly()};
  }

 private:
  std::array<S, 3> a_{S(0), S(0), S(0)};
  std::array<S, 3> b_{S(0), S(0), S(0)};
  S mu_{S(0)};
  BiPoly<S> f_;
};

}  // namespace cyclekit
