#pragma once

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cyclekit/rational.hpp"

namespace cyclekit {

/// Dense univariate polynomial, coefficient k multiplies t^k. The leading
/// coefficient is nonzero unless the polynomial is identically zero (empty).
template <class S>
class UniPoly {
 public:
  using Scalar = S;

  UniPoly() = default;
  explicit UniPoly(std::vector<S> coefficients) : coeffs_(std::move(coefficients)) { trim(); }
  UniPoly(std::initializer_list<S> coefficients) : coeffs_(coefficients) { trim(); }

  static UniPoly constant(const S& c) { return UniPoly(std::vector<S>{c}); }
  static UniPoly monomial(const S& c, int k) {
    std::vector<S> v(static_cast<std::size_t>(k) + 1, S(0));
    v.back() = c;
    return UniPoly(std::move(v));
  }

  const std::vector<S>& coefficients() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }

  S coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(coeffs_.size())) return S(0);
    return coeffs_[static_cast<std::size_t>(k)];
  }
  const S& leading() const { return coeffs_.back(); }

  UniPoly operator-() const {
    UniPoly r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }
  UniPoly& operator+=(const UniPoly& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), S(0));
    for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    trim();
    return *this;
  }
  UniPoly& operator-=(const UniPoly& o) { return *this += -o; }
  UniPoly& operator*=(const S& s) {
    for (auto& c : coeffs_) c *= s;
    trim();
    return *this;
  }

  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
  friend UniPoly operator*(UniPoly a, const S& s) { return a *= s; }
  friend UniPoly operator*(const S& s, UniPoly a) { return a *= s; }
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<S> v(a.coeffs_.size() + b.coeffs_.size() - 1, S(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return UniPoly(std::move(v));
  }
  friend bool operator==(const UniPoly& a, const UniPoly& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator!=(const UniPoly& a, const UniPoly& b) { return !(a == b); }

  UniPoly derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<S> v(coeffs_.size() - 1, S(0));
    for (std::size_t k = 1; k < coeffs_.size(); ++k) v[k - 1] = coeffs_[k] * S(static_cast<int>(k));
    return UniPoly(std::move(v));
  }

  S evaluate(const S& t) const {
    S acc(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  double evaluate_double(double t) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + to_double(*it);
    return acc;
  }

  template <class T, class Fn>
  UniPoly<T> map_coefficients(Fn&& fn) const {
    std::vector<T> v;
    v.reserve(coeffs_.size());
    for (const auto& c : coeffs_) v.push_back(fn(c));
    return UniPoly<T>(std::move(v));
  }

  UniPoly<double> to_double_poly() const {
    return map_coefficients<double>([](const S& c) { return to_double(c); });
  }

  std::string str(const std::string& var = "t") const {
    if (coeffs_.empty()) return "0";
    std::ostringstream os;
    bool lead = true;
    for (int k = degree(); k >= 0; --k) {
      const S& c = coeffs_[static_cast<std::size_t>(k)];
      if (detail::coeff_is_zero(c)) continue;
      if (!lead) os << " + ";
      lead = false;
      if constexpr (std::is_same_v<S, Rational>) {
        os << to_string(c);
      } else {
        os << c;
      }
      if (k > 0) os << "*" << var << (k > 1 ? "^" + std::to_string(k) : "");
    }
    return os.str();
  }

 private:
  void trim() {
    while (!coeffs_.empty() && detail::coeff_is_zero(coeffs_.back())) coeffs_.pop_back();
  }

  std::vector<S> coeffs_;
};

/// Euclidean division over a field: a = q*b + r with deg r < deg b.
template <class S>
std::pair<UniPoly<S>, UniPoly<S>> divmod(const UniPoly<S>& a, const UniPoly<S>& b) {
  if (b.is_zero()) throw Error("polynomial division by zero");
  std::vector<S> rem = a.coefficients();
  const int db = b.degree();
  const int da = a.degree();
  if (da < db) return {UniPoly<S>{}, a};
  std::vector<S> quot(static_cast<std::size_t>(da - db + 1), S(0));
  const S lead = b.leading();
  for (int k = da; k >= db; --k) {
    const S q = rem[static_cast<std::size_t>(k)] / lead;
    quot[static_cast<std::size_t>(k - db)] = q;
    if (detail::coeff_is_zero(q)) continue;
    for (int j = 0; j <= db; ++j) {
      rem[static_cast<std::size_t>(k - db + j)] -= q * b.coeff(j);
    }
  }
  rem.resize(static_cast<std::size_t>(db));
  return {UniPoly<S>(std::move(quot)), UniPoly<S>(std::move(rem))};
}

template <class S>
UniPoly<S> make_monic(const UniPoly<S>& p) {
  if (p.is_zero()) return p;
  return p * (S(1) / p.leading());
}

/// Monic greatest common divisor.
template <class S>
UniPoly<S> gcd(UniPoly<S> a, UniPoly<S> b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return make_monic(a);
}

/// Yun's square-free decomposition: p = c * prod_k f_k^k with every f_k
/// square-free, monic and pairwise coprime. Entry k-1 holds f_k (possibly 1).
template <class S>
std::vector<UniPoly<S>> squarefree_decomposition(const UniPoly<S>& p) {
  std::vector<UniPoly<S>> factors;
  if (p.degree() < 1) return factors;
  const UniPoly<S> dp = p.derivative();
  UniPoly<S> a = gcd(p, dp);
  UniPoly<S> b = divmod(p, a).first;
  UniPoly<S> c = divmod(dp, a).first;
  UniPoly<S> d = c - b.derivative();
  while (b.degree() >= 1) {
    const UniPoly<S> f = gcd(b, d);
    factors.push_back(make_monic(f));
    b = divmod(b, f).first;
    c = divmod(d, f).first;
    d = c - b.derivative();
  }
  while (!factors.empty() && factors.back().degree() < 1) factors.pop_back();
  return factors;
}

/// Number of distinct real roots of a square-free `p` in the open interval
/// (lower, +inf), from Sturm's theorem.
inline int count_real_roots_above(const UniPoly<Rational>& p, const Rational& lower,
                                  bool lower_is_minus_inf = false) {
  if (p.degree() < 1) return 0;
  std::vector<UniPoly<Rational>> chain{p, p.derivative()};
  while (!chain.back().is_zero()) {
    auto r = divmod(chain[chain.size() - 2], chain.back()).second;
    if (r.is_zero()) break;
    chain.push_back(-r);
  }
  auto variations = [](const std::vector<int>& signs) {
    int v = 0, last = 0;
    for (const int s : signs) {
      if (s == 0) continue;
      if (last != 0 && s != last) ++v;
      last = s;
    }
    return v;
  };
  std::vector<int> at_lower, at_inf;
  for (const auto& q : chain) {
    at_lower.push_back(lower_is_minus_inf ? (q.degree() % 2 == 0 ? 1 : -1) * q.leading().sign()
                                          : q.evaluate(lower).sign());
    at_inf.push_back(q.leading().sign());
  }
  return variations(at_lower) - variations(at_inf);
}

/// Number of distinct real roots of a square-free `p`.
inline int count_real_roots(const UniPoly<Rational>& p) {
  return count_real_roots_above(p, Rational(0), true);
}

}  // namespace cyclekit
