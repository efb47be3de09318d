#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cyclekit/averaging.hpp"
#include "cyclekit/cycles.hpp"
#include "cyclekit/kinetic.hpp"
#include "cyclekit/lls.hpp"
#include "cyclekit/ratfunc.hpp"

namespace cyclekit {

using Params = std::map<std::string, Rational>;

/// What a model is known to do. Radii and stabilities are filled only at
/// parameter points where they are established.
struct ExpectedOutcome {
  int N = 0;
  int M = 0;
  LlsClass cls = LlsClass::GeneralLLS;
  std::optional<OriginNature> origin;
  std::optional<int> cycle_count;
  std::vector<double> radii;
  std::vector<Stability> stabilities;
  // "published" for values stated in the literature, "derived" for values
  // computed here by independent means.
  std::string source;
};

struct ModelInstance {
  std::string name;
  Params params;
  // Every model is available as a kinetic system with a closed-form fixed
  // point; LLS-native models use the state (s', s).
  KineticSystem<Rational> kinetic;
  FixedPoint<Rational> fixed_point;
  // Table the reduction must reproduce: the defining table of an LLS-native
  // model, or the literature LLS form of a kinetic model.
  std::optional<LLSSystem<Rational>> reference_lls;
  ExpectedOutcome expected;
  std::vector<std::string> notes;
};

struct ModelEntry {
  std::string name;
  std::string description;
  Params defaults;
  std::function<bool(const std::string&)> accepts_extra;
  std::function<ModelInstance(const Params&)> build;
};

namespace detail {

inline void require(bool ok, const std::string& constraint) {
  if (!ok) throw ParameterOutOfRange("parameter constraint violated: " + constraint);
}

inline int integer_param(const Params& p, const std::string& key) {
  const Rational& v = p.at(key);
  if (denominator_of(v) != 1) throw ParameterOutOfRange(key + " must be an integer");
  return static_cast<int>(numerator_of(v));
}

/// x' = sum A_nm y^n x^m, y' = x: an LLS table as a kinetic system in
/// (velocity, position), reducible with beta = (0, 1).
inline KineticSystem<Rational> kinetic_from_lls(const LLSSystem<Rational>& lls) {
  BiPoly<Rational> f;
  for (const auto& [e, c] : lls.table().terms()) {
    if (e.first + e.second >= 2) f.add_term(c, e.second, e.first);
  }
  return KineticSystem<Rational>({Rational(0), lls.A(0, 1), lls.A(1, 0)},
                                 {Rational(0), Rational(1), Rational(0)}, Rational(0), f);
}

inline ModelInstance from_lls(std::string name, const Params& p, const LLSSystem<Rational>& lls) {
  ModelInstance m;
  m.name = std::move(name);
  m.params = p;
  m.kinetic = kinetic_from_lls(lls);
  m.fixed_point = {Rational(0), Rational(0), true};
  m.reference_lls = lls;
  m.expected.N = lls.N();
  m.expected.M = lls.M();
  m.expected.cls = lls.classification();
  m.notes.push_back("kinetic state is (velocity, position); the LLS coordinate is the position");
  return m;
}

// Coefficients of (-1)^k prod_{i=1..k} (rho - i^2), lowest power first.
inline std::vector<Rational> alternating_square_roots_poly(int k) {
  UniPoly<Rational> p = UniPoly<Rational>::constant(Rational(k % 2 == 0 ? 1 : -1));
  for (int i = 1; i <= k; ++i) p = p * UniPoly<Rational>{Rational(-i * i), Rational(1)};
  std::vector<Rational> c = p.coefficients();
  c.resize(static_cast<std::size_t>(k) + 1, Rational(0));
  return c;
}

inline std::vector<double> integer_radii(int k) {
  std::vector<double> r;
  for (int i = 1; i <= k; ++i) r.push_back(i);
  return r;
}

inline std::vector<Stability> alternating(int count, Stability first) {
  std::vector<Stability> s;
  Stability cur = first;
  for (int i = 0; i < count; ++i) {
    s.push_back(cur);
    cur = cur == Stability::Stable ? Stability::Unstable : Stability::Stable;
  }
  return s;
}

inline ModelInstance van_der_pol(const Params& p) {
  const Rational eps = p.at("eps");
  require(eps > 0, "eps > 0");
  BiPoly<Rational> A;
  A.add_term(Rational(-1), 1, 0);
  A.add_term(eps, 0, 1);
  A.add_term(-eps, 2, 1);
  ModelInstance m = from_lls("van_der_pol", p, LLSSystem<Rational>(A));
  m.expected.origin = OriginNature::UnstableFocus;
  m.expected.cycle_count = 1;
  m.expected.radii = {2.0};
  m.expected.stabilities = {Stability::Stable};
  m.expected.source = "published";
  return m;
}

inline ModelInstance glycolytic(const Params& p) {
  const Rational a = p.at("a"), b = p.at("b");
  require(a > 0 && b > 0, "a > 0 and b > 0");
  ModelInstance m;
  m.name = "glycolytic";
  m.params = p;
  // x' = -x + a y + x^2 y,  y' = b - a y - x^2 y.
  BiPoly<Rational> f;
  f.add_term(Rational(1), 2, 1);
  m.kinetic = KineticSystem<Rational>({Rational(0), Rational(-1), a}, {b, Rational(0), -a},
                                      Rational(-1), f);
  m.fixed_point = {b, b / (a + b * b), true};
  const Rational k = b + b / (a + b * b);
  // Literature form s'' + F s' + G = 0 with
  //   F = (1 + a + 3b^2) - 2b s - 2b k - 3b s' + s s' + k s' + s'^2,  G = (a + b^2) s.
  BiPoly<Rational> F;
  F.add_term(1 + a + 3 * b * b - 2 * b * k, 0, 0);
  F.add_term(-2 * b, 1, 0);
  F.add_term(k - 3 * b, 0, 1);
  F.add_term(Rational(1), 1, 1);
  F.add_term(Rational(1), 0, 2);
  m.reference_lls = LLSSystem<Rational>::from_damping_restoring(
      F, UniPoly<Rational>{Rational(0), a + b * b});
  m.expected.N = 1;
  m.expected.M = 3;
  // Only n <= 1 appears, so the zero pattern is the Rayleigh one.
  m.expected.cls = LlsClass::Rayleigh;
  if (F.coeff(0, 0) < 0) {
    m.expected.origin = OriginNature::UnstableFocus;
    m.expected.cycle_count = 1;
    m.expected.stabilities = {Stability::Stable};
    m.expected.source = "published";
  } else {
    m.notes.push_back("F(0,0) >= 0: outside the single stable cycle regime");
  }
  return m;
}

inline ModelInstance modified_brusselator(const Params& p) {
  const Rational a1 = p.at("a1"), b = p.at("b"), alpha = p.at("alpha");
  require(a1 > 0 && b > 0 && alpha > 0, "a1 > 0, b > 0 and alpha > 0");
  ModelInstance m;
  m.name = "modified_brusselator";
  m.params = p;
  // x' = a1 - (b + alpha) x + x^2 y,  y' = b x - x^2 y.
  BiPoly<Rational> f;
  f.add_term(Rational(1), 2, 1);
  m.kinetic = KineticSystem<Rational>({a1, -(b + alpha), Rational(0)},
                                      {Rational(0), b, Rational(0)}, Rational(-1), f);
  m.fixed_point = {a1 / alpha, b * alpha / a1, true};
  // F = -2 a1 s/alpha - b + a1^2/alpha^2 + alpha - 2 a1 s'/alpha^2 + b s'/a1
  //     + s'^2/alpha^2 + s s'/alpha,   G = a1^2 s / alpha.
  BiPoly<Rational> F;
  F.add_term(a1 * a1 / (alpha * alpha) + alpha - b, 0, 0);
  F.add_term(-2 * a1 / alpha, 1, 0);
  F.add_term(b / a1 - 2 * a1 / (alpha * alpha), 0, 1);
  F.add_term(1 / (alpha * alpha), 0, 2);
  F.add_term(1 / alpha, 1, 1);
  m.reference_lls = LLSSystem<Rational>::from_damping_restoring(
      F, UniPoly<Rational>{Rational(0), a1 * a1 / alpha});
  m.expected.N = 1;
  m.expected.M = 3;
  // Only n <= 1 appears, so the zero pattern is the Rayleigh one.
  m.expected.cls = LlsClass::Rayleigh;
  if (F.coeff(0, 0) < 0) {
    m.expected.origin = OriginNature::UnstableFocus;
    m.expected.cycle_count = 1;
    m.expected.stabilities = {Stability::Stable};
    m.expected.source = "published";
  } else {
    m.notes.push_back("F(0,0) >= 0: outside the single stable cycle regime");
  }
  return m;
}

inline ModelInstance rychkov(const Params& p) {
  const Rational a1 = p.at("a1"), a3 = p.at("a3"), a5 = p.at("a5");
  require(a5 != 0, "a5 != 0");
  // x'' + F'(x) x' + x = 0 with F(x) = a1 x + a3 x^3 + a5 x^5.
  BiPoly<Rational> A;
  A.add_term(Rational(-1), 1, 0);
  A.add_term(-a1, 0, 1);
  A.add_term(-3 * a3, 2, 1);
  A.add_term(-5 * a5, 4, 1);
  ModelInstance m = from_lls("rychkov", p, LLSSystem<Rational>(A));
  if (a1 == make_rational(4, 5) && a3 == make_rational(-4, 3) && a5 == make_rational(8, 25)) {
    m.expected.origin = OriginNature::StableFocus;
    m.expected.cycle_count = 2;
    m.expected.radii = {1.0, 2.0};
    m.expected.stabilities = {Stability::Unstable, Stability::Stable};
    m.expected.source = "published";
  }
  return m;
}

inline ModelInstance kaiser(const Params& p) {
  const Rational alpha = p.at("alpha"), beta = p.at("beta"), mu = p.at("mu");
  require(alpha > 0 && beta >= 0 && mu > 0, "alpha > 0, beta >= 0 and mu > 0");
  // x'' - mu (1 - x^2 + alpha x^4 - beta x^6) x' + x = 0, undriven.
  BiPoly<Rational> A;
  A.add_term(Rational(-1), 1, 0);
  A.add_term(mu, 0, 1);
  A.add_term(-mu, 2, 1);
  A.add_term(mu * alpha, 4, 1);
  A.add_term(-mu * beta, 6, 1);
  ModelInstance m = from_lls("kaiser", p, LLSSystem<Rational>(A));
  m.expected.origin = OriginNature::UnstableFocus;
  if (alpha == make_rational(144, 1000) && beta == make_rational(5, 1000)) {
    m.expected.cycle_count = 3;
    m.expected.radii = {2.6390, 3.9616, 4.8395};
    m.expected.stabilities = {Stability::Stable, Stability::Unstable, Stability::Stable};
    m.expected.source = "derived";
  } else if (alpha == make_rational(1, 10) && beta == 0) {
    m.expected.cycle_count = 2;
    m.expected.radii = {std::sqrt(10.0 - std::sqrt(20.0)), std::sqrt(10.0 + std::sqrt(20.0))};
    m.expected.stabilities = {Stability::Stable, Stability::Unstable};
    m.expected.source = "published";
  }
  return m;
}

inline bool gaiko_extra(const std::string& key) {
  if (key == "mu") return true;
  if (key.size() < 3 || key.compare(0, 2, "mu") != 0) return false;
  return std::all_of(key.begin() + 2, key.end(), [](unsigned char c) { return std::isdigit(c); });
}

inline ModelInstance gaiko(const Params& p) {
  const int k = integer_param(p, "k");
  require(k >= 1 && k <= 10, "1 <= k <= 10");
  const Rational eps = p.at("eps");
  require(eps > 0, "eps > 0");
  const int top = 2 * k + 1;
  // Default odd coefficients put the averaged cycles at radii 1..k with
  // mu1 = eps; even coefficients default to zero.
  std::vector<Rational> mu(static_cast<std::size_t>(top) + 1, Rational(0));
  const auto c = alternating_square_roots_poly(k);
  const Rational scale = eps / (2 * c[0]);
  for (int j = 0; j <= k; ++j) mu[2 * j + 1] = scale * c[j] / wallis(0, j + 1);
  bool overridden = false;
  for (const auto& [key, v] : p) {
    if (!gaiko_extra(key)) continue;
    const int idx = key == "mu" ? 1 : std::stoi(key.substr(2));
    require(idx >= 1 && idx <= top, key + " must have index 1.." + std::to_string(top));
    mu[idx] = v;
    overridden = true;
  }
  // x'' - (mu1 + mu2 x' + ... + mu_{2k+1} x'^{2k}) x' + x = 0.
  BiPoly<Rational> A;
  A.add_term(Rational(-1), 1, 0);
  for (int i = 1; i <= top; ++i) A.add_term(mu[i], 0, i);
  ModelInstance m = from_lls("gaiko", p, LLSSystem<Rational>(A));
  m.expected.N = 1;
  m.expected.M = top;
  m.expected.cls = LlsClass::Rayleigh;
  if (mu[1] <= 0) {
    m.notes.push_back("requires mu1>0: the bound of k cycles holds only for mu1 > 0");
  } else {
    m.expected.origin = OriginNature::UnstableFocus;
  }
  if (!overridden) {
    m.expected.cycle_count = k;
    m.expected.radii = integer_radii(k);
    m.expected.stabilities = alternating(k, Stability::Stable);
    m.expected.source = "derived";
  }
  return m;
}

inline ModelInstance blows_lloyd(const Params& p) {
  const int k = integer_param(p, "k");
  require(k >= 1 && k <= 10, "1 <= k <= 10");
  const Rational eps = p.at("eps");
  require(eps != 0, "eps != 0");
  // x'' + F'(x) x' + x = 0 with F' = -eps sum c_j x^(2j); the c_j put the
  // averaged cycles at radii 1..k. For k = 3 this is
  // F = -eps (72 x - 392/3 x^3 + 224/5 x^5 - 128/35 x^7).
  const auto c = alternating_square_roots_poly(k);
  BiPoly<Rational> A;
  A.add_term(Rational(-1), 1, 0);
  for (int j = 0; j <= k; ++j) A.add_term(eps * c[j] / wallis(j, 1), 2 * j, 1);
  ModelInstance m = from_lls("blows_lloyd", p, LLSSystem<Rational>(A));
  m.expected.cycle_count = k;
  m.expected.radii = integer_radii(k);
  const bool stable_first = eps > 0;
  m.expected.origin = stable_first ? OriginNature::UnstableFocus : OriginNature::StableFocus;
  m.expected.stabilities =
      alternating(k, stable_first ? Stability::Stable : Stability::Unstable);
  m.expected.source = "published";
  return m;
}

inline ModelInstance lotka_volterra(const Params& p) {
  const Rational alpha = p.at("alpha"), beta = p.at("beta"), gamma = p.at("gamma"),
                 delta = p.at("delta");
  require(alpha > 0 && beta > 0 && gamma > 0 && delta > 0, "alpha, beta, gamma, delta > 0");
  ModelInstance m;
  m.name = "lotka_volterra";
  m.params = p;
  // x' = alpha x - beta x y,  y' = delta x y - gamma y.
  BiPoly<Rational> f;
  f.add_term(-beta, 1, 1);
  m.kinetic = KineticSystem<Rational>({Rational(0), alpha, Rational(0)},
                                      {Rational(0), Rational(0), -gamma}, -delta / beta, f);
  m.fixed_point = {gamma / delta, alpha / beta, true};
  m.expected.N = 2;
  m.expected.M = 2;
  m.expected.cls = LlsClass::GeneralLLS;
  m.expected.origin = OriginNature::CenterType;
  m.expected.cycle_count = 0;
  m.expected.source = "published";
  m.notes.push_back("the origin of the kinetic system is a saddle; the reduction uses the "
                    "interior fixed point");
  return m;
}

}  // namespace detail

inline const std::vector<ModelEntry>& zoo() {
  static const std::vector<ModelEntry> entries = [] {
    auto none = [](const std::string&) { return false; };
    std::vector<ModelEntry> e;
    e.push_back({"van_der_pol", "x'' + eps (x^2 - 1) x' + x = 0",
                 {{"eps", make_rational(1, 10)}}, none, detail::van_der_pol});
    e.push_back({"glycolytic", "x' = -x + a y + x^2 y, y' = b - a y - x^2 y",
                 {{"a", make_rational(1, 10)}, {"b", make_rational(1, 2)}}, none,
                 detail::glycolytic});
    e.push_back({"modified_brusselator", "x' = a1 - (b + alpha) x + x^2 y, y' = b x - x^2 y",
                 {{"a1", Rational(1)}, {"b", make_rational(11, 5)}, {"alpha", Rational(1)}},
                 none, detail::modified_brusselator});
    e.push_back({"rychkov", "x'' + F'(x) x' + x = 0, F = a1 x + a3 x^3 + a5 x^5",
                 {{"a1", make_rational(4, 5)}, {"a3", make_rational(-4, 3)},
                  {"a5", make_rational(8, 25)}},
                 none, detail::rychkov});
    e.push_back({"kaiser", "x'' - mu (1 - x^2 + alpha x^4 - beta x^6) x' + x = 0",
                 {{"alpha", make_rational(144, 1000)},
                  {"beta", make_rational(5, 1000)},
                  {"mu", make_rational(1, 100)}},
                 none, detail::kaiser});
    e.push_back({"gaiko", "x'' - (mu1 + mu2 x' + ... + mu_{2k+1} x'^{2k}) x' + x = 0",
                 {{"k", Rational(2)}, {"eps", make_rational(1, 100)}}, detail::gaiko_extra,
                 detail::gaiko});
    e.push_back({"blows_lloyd", "x'' + F'(x) x' + x = 0, F odd of degree 2k+1",
                 {{"k", Rational(3)}, {"eps", make_rational(1, 100)}}, none,
                 detail::blows_lloyd});
    e.push_back({"lotka_volterra", "x' = alpha x - beta x y, y' = delta x y - gamma y",
                 {{"alpha", Rational(2)},
                  {"beta", Rational(1)},
                  {"gamma", Rational(1)},
                  {"delta", Rational(1)}},
                 none, detail::lotka_volterra});
    return e;
  }();
  return entries;
}

inline const ModelEntry& find_model(const std::string& name) {
  for (const auto& e : zoo()) {
    if (e.name == name) return e;
  }
  std::string known;
  for (const auto& e : zoo()) known += (known.empty() ? "" : ", ") + e.name;
  throw InputError("unknown model '" + name + "' (known: " + known + ")");
}

/// Builds a model with `overrides` applied on top of its defaults.
inline ModelInstance build_model(const std::string& name, const Params& overrides = {}) {
  const ModelEntry& entry = find_model(name);
  Params p = entry.defaults;
  for (const auto& [key, v] : overrides) {
    if (!entry.defaults.count(key) && !(entry.accepts_extra && entry.accepts_extra(key))) {
      throw InputError("model '" + name + "' has no parameter '" + key + "'");
    }
    p[key] = v;
  }
  return entry.build(p);
}

/// Lotka-Volterra with symbolic alpha (first parameter) and gamma (second
/// parameter), beta = delta = 1, and its interior fixed point (gamma, alpha).
inline std::pair<KineticSystem<RationalFunction>, FixedPoint<RationalFunction>>
lotka_volterra_symbolic() {
  const RationalFunction alpha = RationalFunction::parameter(Variable::First);
  const RationalFunction gamma = RationalFunction::parameter(Variable::Second);
  BiPoly<RationalFunction> f;
  f.add_term(RationalFunction(-1), 1, 1);
  KineticSystem<RationalFunction> sys({RationalFunction(0), alpha, RationalFunction(0)},
                                      {RationalFunction(0), RationalFunction(0), -gamma},
                                      RationalFunction(-1), f);
  return {sys, FixedPoint<RationalFunction>{gamma, alpha, true}};
}

}  // namespace cyclekit
