#pragma once

#include <ostream>
#include <utility>

#include "cyclekit/bipoly.hpp"

namespace cyclekit {

/// Quotient of two exact bivariate polynomials in a pair of symbolic
/// parameters. Used as the coefficient field when a reduction is carried out
/// with parameters left symbolic.
///
/// No gcd cancellation is attempted; equality is decided by cross
/// multiplication, which is exact without a canonical reduced form.
class RationalFunction {
 public:
  using Poly = BiPoly<Rational>;

  RationalFunction() : den_(Rational(1)) {}
  RationalFunction(int c) : num_(Rational(c)), den_(Rational(1)) {}  // NOLINT
  RationalFunction(const Rational& c) : num_(c), den_(Rational(1)) {}  // NOLINT
  RationalFunction(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw Error("rational function with zero denominator");
    normalize();
  }
  explicit RationalFunction(Poly num) : num_(std::move(num)), den_(Rational(1)) {}

  /// The symbolic parameter in slot `v` (first or second).
  static RationalFunction parameter(Variable v) {
    return RationalFunction(v == Variable::First ? Poly::first() : Poly::second());
  }

  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }

  Rational evaluate(const Rational& p, const Rational& q) const {
    return num_.evaluate(p, q) / den_.evaluate(p, q);
  }

  RationalFunction operator-() const { return RationalFunction(-num_, den_); }

  RationalFunction& operator+=(const RationalFunction& o) {
    if (den_ == o.den_) {
      num_ += o.num_;
    } else {
      num_ = num_ * o.den_ + o.num_ * den_;
      den_ = den_ * o.den_;
    }
    normalize();
    return *this;
  }
  RationalFunction& operator-=(const RationalFunction& o) { return *this += -o; }
  RationalFunction& operator*=(const RationalFunction& o) {
    num_ *= o.num_;
    den_ *= o.den_;
    normalize();
    return *this;
  }
  RationalFunction& operator/=(const RationalFunction& o) {
    if (o.num_.is_zero()) throw Error("rational function division by zero");
    num_ *= o.den_;
    den_ *= o.num_;
    normalize();
    return *this;
  }

  friend RationalFunction operator+(RationalFunction a, const RationalFunction& b) { return a += b; }
  friend RationalFunction operator-(RationalFunction a, const RationalFunction& b) { return a -= b; }
  friend RationalFunction operator*(RationalFunction a, const RationalFunction& b) { return a *= b; }
  friend RationalFunction operator/(RationalFunction a, const RationalFunction& b) { return a /= b; }

  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ * b.den_ == b.num_ * a.den_;
  }
  friend bool operator!=(const RationalFunction& a, const RationalFunction& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const RationalFunction& f) {
    os << "(" << f.num_.str("p", "q") << ")";
    if (f.den_ != Poly(Rational(1))) os << "/(" << f.den_.str("p", "q") << ")";
    return os;
  }

 private:
  // Folds a constant denominator into the numerator and makes the
  // denominator's leading term monic, which keeps expressions small.
  void normalize() {
    if (num_.is_zero()) {
      den_ = Poly(Rational(1));
      return;
    }
    const Rational lead = den_.terms().rbegin()->second;
    if (lead != 1) {
      const Rational inv = 1 / lead;
      num_ *= inv;
      den_ *= inv;
    }
  }

  Poly num_;
  Poly den_;
};

inline bool is_zero(const RationalFunction& f) { return f.numerator().is_zero(); }

}  // namespace cyclekit
