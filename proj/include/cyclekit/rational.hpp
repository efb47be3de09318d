#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "cyclekit/errors.hpp"

namespace cyclekit {

// Expression templates are off so that `auto` and template deduction see
// plain values.
using Integer = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                              boost::multiprecision::et_off>;

/// Exact rational number; always stored in lowest terms with a positive
/// denominator.
using Rational = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

inline Rational make_rational(long long num, long long den = 1) {
  if (den == 0) throw InputError("rational with zero denominator");
  return Rational(Integer(num), Integer(den));
}

inline bool is_zero(const Rational& r) { return r.is_zero(); }
inline bool is_zero(double d) { return d == 0.0; }

inline int sign(const Rational& r) { return r.sign(); }

inline double to_double(const Rational& r) {
  return r.convert_to<double>();
}
inline double to_double(double d) { return d; }

inline Integer numerator_of(const Rational& r) {
  return boost::multiprecision::numerator(r);
}
inline Integer denominator_of(const Rational& r) {
  return boost::multiprecision::denominator(r);
}

/// "p/q" when the denominator is not one, otherwise "p".
inline std::string to_string(const Rational& r) {
  const Integer den = denominator_of(r);
  if (den == 1) return numerator_of(r).str();
  return numerator_of(r).str() + "/" + den.str();
}

namespace detail {

inline Integer parse_integer(std::string_view text, std::string_view whole) {
  if (text.empty()) {
    throw InputError("cannot parse rational from \"" + std::string(whole) + "\"");
  }
  std::size_t pos = 0;
  bool negative = false;
  if (text[0] == '+' || text[0] == '-') {
    negative = text[0] == '-';
    pos = 1;
  }
  if (pos == text.size()) {
    throw InputError("cannot parse rational from \"" + std::string(whole) + "\"");
  }
  Integer value = 0;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c < '0' || c > '9') {
      throw InputError("cannot parse rational from \"" + std::string(whole) + "\"");
    }
    value = value * 10 + (c - '0');
  }
  return negative ? Integer(-value) : value;
}

inline Integer pow10(long long e) {
  Integer p = 1;
  for (long long i = 0; i < e; ++i) p *= 10;
  return p;
}

// Decimal with optional fraction and exponent: -12.5e-3.
inline Rational parse_decimal(std::string_view text, std::string_view whole) {
  std::string_view mantissa = text;
  long long exponent = 0;
  if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    const std::string_view exp_text = text.substr(e + 1);
    const Integer exp_value = parse_integer(exp_text, whole);
    if (exp_value > 4000 || exp_value < -4000) {
      throw InputError("exponent out of range in \"" + std::string(whole) + "\"");
    }
    exponent = exp_value.convert_to<long long>();
  }
  std::string digits;
  long long frac_digits = 0;
  if (const auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    digits = std::string(mantissa.substr(0, dot));
    const std::string_view frac = mantissa.substr(dot + 1);
    if (frac.find_first_of("+-") != std::string_view::npos) {
      throw InputError("cannot parse rational from \"" + std::string(whole) + "\"");
    }
    digits += frac;
    frac_digits = static_cast<long long>(frac.size());
    if (digits.empty() || digits == "-" || digits == "+") {
      throw InputError("cannot parse rational from \"" + std::string(whole) + "\"");
    }
  } else {
    digits = std::string(mantissa);
  }
  Rational value(parse_integer(digits, whole));
  const long long shift = exponent - frac_digits;
  if (shift > 0) value *= Rational(pow10(shift));
  if (shift < 0) value /= Rational(pow10(-shift));
  return value;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Parses "p/q", an integer, or a decimal literal ("0.144", "1e-2") into an
/// exact rational. Decimal literals are taken at face value: "0.1" is 1/10.
inline Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  text = detail::trim(text);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational num = detail::parse_decimal(detail::trim(text.substr(0, slash)), whole);
    const Rational den = detail::parse_decimal(detail::trim(text.substr(slash + 1)), whole);
    if (den.is_zero()) {
      throw InputError("zero denominator in \"" + std::string(whole) + "\"");
    }
    return num / den;
  }
  return detail::parse_decimal(text, whole);
}

/// Exact binary value of a double.
inline Rational rational_from_double(double d) {
  if (!std::isfinite(d)) throw InputError("non-finite value cannot be made exact");
  if (d == 0.0) return Rational(0);
  int exp = 0;
  const double mant = std::frexp(d, &exp);
  // 53 significant bits fit in a long long.
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rational r(scaled);
  exp -= 53;
  Integer p2 = 1;
  p2 <<= std::abs(exp);
  if (exp >= 0) return r * Rational(p2);
  return r / Rational(p2);
}

/// Rational of the shortest decimal that round-trips to `d`, so a JSON
/// literal 0.1 becomes 1/10 rather than its binary approximation.
inline Rational rational_from_decimal_double(double d) {
  if (!std::isfinite(d)) throw InputError("non-finite value cannot be made exact");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), d);
  if (res.ec != std::errc()) throw InputError("cannot format double");
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions).
inline std::optional<Rational> best_rational(double x, long long max_den) {
  if (!std::isfinite(x)) return std::nullopt;
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double v = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_d = std::floor(v);
    if (std::abs(a_d) > 9e15) break;
    const auto a = static_cast<long long>(a_d);
    const long long h2 = a * h1 + h0;
    const long long k2 = a * k1 + k0;
    if (k2 > max_den || k2 <= 0) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    const double frac = v - a_d;
    if (frac < 1e-15) break;
    v = 1.0 / frac;
  }
  if (k1 == 0) return std::nullopt;
  return make_rational(h1, k1);
}

namespace detail {

// Unqualified call so coefficient types in other headers are found by ADL.
template <class S>
bool coeff_is_zero(const S& c) {
  return is_zero(c);
}

}  // namespace detail

/// Integer power for any ring-like scalar.
template <class S>
S ipow(S base, unsigned e) {
  S result(1);
  while (e) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e) base *= base;
  }
  return result;
}

}  // namespace cyclekit
