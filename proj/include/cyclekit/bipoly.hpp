#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cyclekit/rational.hpp"

namespace cyclekit {

enum class Variable { First, Second };

/// Bivariate polynomial sum c_ij * u^i * v^j kept in canonical form: exponent
/// pairs are unique and no zero coefficient is ever stored, so structural
/// equality is polynomial equality.
///
/// `S` is the coefficient field (Rational for the exact pipeline, double for
/// numerics, or a rational-function field for symbolic parameters). It needs
/// the field operators, construction from int, and an ADL-visible is_zero.
template <class S>
class BiPoly {
 public:
  using Scalar = S;
  using Exponent = std::pair<int, int>;
  using TermMap = std::map<Exponent, S>;

  BiPoly() = default;
  explicit BiPoly(const S& constant) { add_term(constant, 0, 0); }

  static BiPoly monomial(const S& c, int i, int j) {
    BiPoly p;
    p.add_term(c, i, j);
    return p;
  }
  static BiPoly first() { return monomial(S(1), 1, 0); }
  static BiPoly second() { return monomial(S(1), 0, 1); }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  S coeff(int i, int j) const {
    const auto it = terms_.find({i, j});
    return it == terms_.end() ? S(0) : it->second;
  }

  void add_term(const S& c, int i, int j) {
    if (i < 0 || j < 0) throw InputError("negative exponent in polynomial term");
    if (detail::coeff_is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace({i, j}, c);
    if (!inserted) {
      it->second += c;
      if (detail::coeff_is_zero(it->second)) terms_.erase(it);
    }
  }

  void set_term(const S& c, int i, int j) {
    terms_.erase({i, j});
    add_term(c, i, j);
  }

  // -1 for the zero polynomial.
  int degree_first() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.first);
    return d;
  }
  int degree_second() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.second);
    return d;
  }
  int total_degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.first + e.second);
    return d;
  }

  BiPoly operator-() const {
    BiPoly r;
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
  }

  BiPoly& operator+=(const BiPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(c, e.first, e.second);
    return *this;
  }
  BiPoly& operator-=(const BiPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(-c, e.first, e.second);
    return *this;
  }
  BiPoly& operator*=(const BiPoly& o) {
    *this = *this * o;
    return *this;
  }
  BiPoly& operator*=(const S& s) {
    if (detail::coeff_is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend BiPoly operator+(BiPoly a, const BiPoly& b) { return a += b; }
  friend BiPoly operator-(BiPoly a, const BiPoly& b) { return a -= b; }
  friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
    BiPoly r;
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        r.add_term(ca * cb, ea.first + eb.first, ea.second + eb.second);
      }
    }
    return r;
  }
  friend BiPoly operator*(BiPoly a, const S& s) { return a *= s; }
  friend BiPoly operator*(const S& s, BiPoly a) { return a *= s; }

  friend bool operator==(const BiPoly& a, const BiPoly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const BiPoly& a, const BiPoly& b) { return !(a == b); }

  BiPoly pow(unsigned e) const { return ipow(*this, e); }

  BiPoly derivative(Variable v) const {
    BiPoly r;
    for (const auto& [e, c] : terms_) {
      const int k = v == Variable::First ? e.first : e.second;
      if (k == 0) continue;
      if (v == Variable::First) {
        r.add_term(c * S(k), e.first - 1, e.second);
      } else {
        r.add_term(c * S(k), e.first, e.second - 1);
      }
    }
    return r;
  }

  S evaluate(const S& u, const S& v) const { return evaluate_as<S>(u, v); }

  /// Evaluates in another scalar type `T` (coefficients converted with
  /// T(coefficient) or to_double).
  template <class T>
  T evaluate_as(const T& u, const T& v) const {
    std::vector<T> upow{T(1)}, vpow{T(1)};
    const int du = degree_first(), dv = degree_second();
    for (int k = 1; k <= du; ++k) upow.push_back(upow.back() * u);
    for (int k = 1; k <= dv; ++k) vpow.push_back(vpow.back() * v);
    T acc(0);
    for (const auto& [e, c] : terms_) {
      acc += convert<T>(c) * upow[static_cast<std::size_t>(e.first)] *
             vpow[static_cast<std::size_t>(e.second)];
    }
    return acc;
  }

  template <class T, class Fn>
  BiPoly<T> map_coefficients(Fn&& fn) const {
    BiPoly<T> r;
    for (const auto& [e, c] : terms_) r.add_term(fn(c), e.first, e.second);
    return r;
  }

  BiPoly<double> to_double_poly() const {
    return map_coefficients<double>([](const S& c) { return to_double(c); });
  }

  /// Human-readable form, e.g. "-1/10*s^2*d + 1/10*d".
  std::string str(const std::string& first_name = "x",
                  const std::string& second_name = "y") const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool lead = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      if (!lead) os << " + ";
      lead = false;
      os << coefficient_text(c);
      if (e.first > 0) os << "*" << first_name << (e.first > 1 ? "^" + std::to_string(e.first) : "");
      if (e.second > 0) os << "*" << second_name << (e.second > 1 ? "^" + std::to_string(e.second) : "");
    }
    return os.str();
  }

 private:
  template <class T>
  static T convert(const S& c) {
    if constexpr (std::is_same_v<T, S>) {
      return c;
    } else {
      return static_cast<T>(to_double(c));
    }
  }

  static std::string coefficient_text(const S& c) {
    if constexpr (std::is_same_v<S, Rational>) {
      return to_string(c);
    } else {
      std::ostringstream os;
      os << c;
      return os.str();
    }
  }

  TermMap terms_;
};

/// p(first_sub, second_sub), expanded to canonical form. Powers of the
/// substitutions are cached so each is computed once.
template <class S>
BiPoly<S> compose(const BiPoly<S>& p, const BiPoly<S>& first_sub, const BiPoly<S>& second_sub) {
  const int du = p.degree_first();
  const int dv = p.degree_second();
  std::vector<BiPoly<S>> upow{BiPoly<S>(S(1))}, vpow{BiPoly<S>(S(1))};
  for (int k = 1; k <= du; ++k) upow.push_back(upow.back() * first_sub);
  for (int k = 1; k <= dv; ++k) vpow.push_back(vpow.back() * second_sub);
  BiPoly<S> result;
  for (const auto& [e, c] : p.terms()) {
    result += (upow[static_cast<std::size_t>(e.first)] *
               vpow[static_cast<std::size_t>(e.second)]) * c;
  }
  return result;
}

}  // namespace cyclekit
