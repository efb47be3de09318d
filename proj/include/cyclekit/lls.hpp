#pragma once

#include <string>

#include "cyclekit/bipoly.hpp"
#include "cyclekit/unipoly.hpp"

namespace cyclekit {

enum class LlsClass { GeneralLLS, Rayleigh, Lienard };

inline std::string to_string(LlsClass c) {
  switch (c) {
    case LlsClass::Rayleigh: return "Rayleigh";
    case LlsClass::Lienard: return "Lienard";
    case LlsClass::GeneralLLS: break;
  }
  return "GeneralLLS";
}

/// Second-order oscillator  s'' = sum A_nm s^n (s')^m,  equivalently
///   s'' + F(s, s') s' + G(s) = 0
/// with
///   F = -sum_{m>=1} A_nm s^n (s')^(m-1),   G = -sum_{n>=1} A_n0 s^n.
/// The coefficient table A is held as a polynomial in (s, s'); A00 is zero.
template <class S>
class LLSSystem {
 public:
  LLSSystem() = default;

  explicit LLSSystem(BiPoly<S> table) : table_(std::move(table)) {
    if (!detail::coeff_is_zero(table_.coeff(0, 0))) {
      throw InputError("LLS table has a nonzero A00; the fixed point is not at the origin");
    }
  }

  /// Builds the table from damping F(s, s') and restoring force G(s).
  static LLSSystem from_damping_restoring(const BiPoly<S>& damping, const UniPoly<S>& restoring) {
    BiPoly<S> table;
    for (const auto& [e, c] : damping.terms()) table.add_term(-c, e.first, e.second + 1);
    for (int n = 0; n <= restoring.degree(); ++n) table.add_term(-restoring.coeff(n), n, 0);
    return LLSSystem(std::move(table));
  }

  const BiPoly<S>& table() const { return table_; }
  S A(int n, int m) const { return table_.coeff(n, m); }

  /// Highest power of s and of s' in the table.
  int N() const { return std::max(0, table_.degree_first()); }
  int M() const { return std::max(0, table_.degree_second()); }

  BiPoly<S> damping() const {
    BiPoly<S> F;
    for (const auto& [e, c] : table_.terms()) {
      if (e.second >= 1) F.add_term(-c, e.first, e.second - 1);
    }
    return F;
  }

  UniPoly<S> restoring() const {
    std::vector<S> g(static_cast<std::size_t>(N()) + 1, S(0));
    for (const auto& [e, c] : table_.terms()) {
      if (e.second == 0) g[static_cast<std::size_t>(e.first)] = -c;
    }
    return UniPoly<S>(std::move(g));
  }

  /// F(0,0) = -A01.
  S damping_at_origin() const { return -A(0, 1); }

  /// Rayleigh when no A_nm with n >= 2 survives, Lienard when no A_nm with
  /// m >= 2 survives. A table matching both patterns is reported as Lienard.
  LlsClass classification() const {
    bool rayleigh = true, lienard = true;
    for (const auto& [e, c] : table_.terms()) {
      if (e.first >= 2) rayleigh = false;
      if (e.second >= 2) lienard = false;
    }
    if (lienard) return LlsClass::Lienard;
    if (rayleigh) return LlsClass::Rayleigh;
    return LlsClass::GeneralLLS;
  }

  friend bool operator==(const LLSSystem& a, const LLSSystem& b) { return a.table_ == b.table_; }

 private:
  BiPoly<S> table_;
};

}  // namespace cyclekit
