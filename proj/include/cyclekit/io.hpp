#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cyclekit/averaging.hpp"
#include "cyclekit/cycles.hpp"
#include "cyclekit/fixed_points.hpp"
#include "cyclekit/reduction.hpp"
#include "cyclekit/verify.hpp"

namespace cyclekit::io {

using json = nlohmann::json;

/// Parsed system file: either a kinetic system (optionally with a fixed
/// point) or an LLS table.
struct SystemInput {
  std::string kind;
  std::optional<KineticSystem<Rational>> kinetic;
  std::optional<FixedPoint<Rational>> fixed_point;
  std::optional<LLSSystem<Rational>> lls;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
  throw InputError("schema: " + path + ": " + what);
}

inline Rational number(const json& v, const std::string& path) {
  if (v.is_number_integer()) {
    return v.is_number_unsigned() ? Rational(Integer(v.get<unsigned long long>()))
                                  : Rational(Integer(v.get<long long>()));
  }
  if (v.is_number_float()) return rational_from_decimal_double(v.get<double>());
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const InputError& e) {
      schema_error(path, e.what());
    }
  }
  schema_error(path, "expected a number or a \"p/q\" string");
}

inline int exponent(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) schema_error(path, std::string("missing \"") + key + "\"");
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 1000) {
    schema_error(path + "/" + key, "expected a non-negative integer exponent");
  }
  return static_cast<int>(v.get<long long>());
}

inline std::array<Rational, 3> triple(const json& doc, const char* key) {
  const std::string path = std::string("/") + key;
  if (!doc.contains(key)) schema_error(path, "missing");
  const json& v = doc.at(key);
  if (!v.is_array() || v.size() != 3) schema_error(path, "expected an array of three numbers");
  return {number(v[0], path + "/0"), number(v[1], path + "/1"), number(v[2], path + "/2")};
}

inline BiPoly<Rational> term_list(const json& arr, const char* e1, const char* e2,
                                  const std::string& path) {
  if (!arr.is_array()) schema_error(path, "expected an array of terms");
  BiPoly<Rational> p;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string tp = path + "/" + std::to_string(k);
    const json& t = arr[k];
    if (!t.is_object()) schema_error(tp, "expected an object");
    if (!t.contains("c")) schema_error(tp, "missing \"c\"");
    p.add_term(number(t.at("c"), tp + "/c"), exponent(t, e1, tp), exponent(t, e2, tp));
  }
  return p;
}

}  // namespace detail

/// Parses and validates a system document. Malformed JSON is reported with
/// line and column.
inline SystemInput parse_system(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte);
    throw InputError("malformed JSON at line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": " + e.what());
  }
  if (!doc.is_object()) detail::schema_error("/", "expected an object");
  if (!doc.contains("kind") || !doc.at("kind").is_string()) {
    detail::schema_error("/kind", "missing or not a string");
  }
  SystemInput in;
  in.kind = doc.at("kind").get<std::string>();
  if (in.kind == "lls") {
    if (!doc.contains("A")) detail::schema_error("/A", "missing");
    BiPoly<Rational> table = detail::term_list(doc.at("A"), "n", "m", "/A");
    if (!table.coeff(0, 0).is_zero()) detail::schema_error("/A", "A00 must be zero");
    in.lls = LLSSystem<Rational>(std::move(table));
  } else if (in.kind == "kinetic") {
    const auto a = detail::triple(doc, "a");
    const auto b = detail::triple(doc, "b");
    if (!doc.contains("mu")) detail::schema_error("/mu", "missing");
    const Rational mu = detail::number(doc.at("mu"), "/mu");
    if (!doc.contains("f") || !doc.at("f").is_object() || !doc.at("f").contains("terms")) {
      detail::schema_error("/f", "expected {\"terms\": [...]}");
    }
    BiPoly<Rational> f = detail::term_list(doc.at("f").at("terms"), "i", "j", "/f/terms");
    bool allow_affine = false;
    if (doc.contains("allow_affine_f")) {
      if (!doc.at("allow_affine_f").is_boolean()) {
        detail::schema_error("/allow_affine_f", "expected a boolean");
      }
      allow_affine = doc.at("allow_affine_f").get<bool>();
    }
    in.kinetic = KineticSystem<Rational>(a, b, mu, std::move(f), allow_affine);
    if (doc.contains("fixed_point")) {
      const json& fp = doc.at("fixed_point");
      if (!fp.is_array() || fp.size() != 2) {
        detail::schema_error("/fixed_point", "expected [x, y]");
      }
      in.fixed_point = FixedPoint<Rational>{detail::number(fp[0], "/fixed_point/0"),
                                            detail::number(fp[1], "/fixed_point/1"), true};
    }
  } else {
    detail::schema_error("/kind", "expected \"kinetic\" or \"lls\", got \"" + in.kind + "\"");
  }
  return in;
}

// ---------------------------------------------------------------------------
// Report fragments. Every numeric value is wrapped with its provenance.

inline json exact(const Rational& r) {
  return {{"value", to_string(r)}, {"approx", to_double(r)}, {"provenance", "exact"}};
}
inline json exact(long long n) { return {{"value", n}, {"provenance", "exact"}}; }
inline json floating(double d) { return {{"value", d}, {"provenance", "float"}}; }
inline json simulated(double d) { return {{"value", d}, {"provenance", "simulated"}}; }

inline json terms_json(const BiPoly<Rational>& p, const char* e1, const char* e2) {
  json arr = json::array();
  for (const auto& [e, c] : p.terms()) arr.push_back({{e1, e.first}, {e2, e.second}, {"c", to_string(c)}});
  return arr;
}

inline json kinetic_json(const KineticSystem<Rational>& sys) {
  json a = json::array(), b = json::array();
  for (const auto& v : sys.a()) a.push_back(to_string(v));
  for (const auto& v : sys.b()) b.push_back(to_string(v));
  return {{"kind", "kinetic"},
          {"a", a},
          {"b", b},
          {"mu", to_string(sys.mu())},
          {"f", {{"terms", terms_json(sys.f(), "i", "j")}}}};
}

inline json fixed_point_json(const FixedPointInfo& fp) {
  auto complex_json = [](std::complex<double> z) {
    return json{{"re", z.real()}, {"im", z.imag()}, {"provenance", "float"}};
  };
  json out{{"x", fp.exact.exact ? exact(fp.exact.x) : floating(fp.xs)},
           {"y", fp.exact.exact ? exact(fp.exact.y) : floating(fp.ys)},
           {"kind", to_string(fp.kind)},
           {"trace", floating(fp.trace)},
           {"determinant", floating(fp.determinant)},
           {"lambda_plus", complex_json(fp.lambda_plus)},
           {"lambda_minus", complex_json(fp.lambda_minus)},
           {"singular", fp.singular}};
  return out;
}

inline json map_json(const ReductionMap<Rational>& m) {
  return {{"beta", {exact(m.beta0), exact(m.beta1), exact(m.beta2)}},
          {"alpha", {exact(m.alpha0), exact(m.alpha1), exact(m.alpha2)}},
          {"c", {{"c1", exact(m.c1)}, {"c2", exact(m.c2)}, {"c3", exact(m.c3)},
                 {"c4", exact(m.c4)}, {"cL", exact(m.cL)}, {"cK", exact(m.cK)}}},
          {"det", exact(m.det)},
          {"normalized", m.normalized},
          {"scale_note",
           m.normalized ? "beta = (-mu, 1); another overall scale of beta rescales radii linearly"
                        : "linear system: fallback beta used"}};
}

/// LLS section. The top-level keys "kind" and "A" of a reduce report come
/// from here, so the report itself is a valid "lls" system file.
inline json lls_json(const LLSSystem<Rational>& lls, const LlsDiagnosis& d) {
  json F = json::array(), G = json::array();
  const BiPoly<Rational> damping = lls.damping();
  for (const auto& [e, c] : damping.terms()) {
    F.push_back({{"n", e.first}, {"m", e.second}, {"c", exact(c)}});
  }
  const auto g = lls.restoring();
  for (int n = 0; n <= g.degree(); ++n) {
    if (!g.coeff(n).is_zero()) G.push_back({{"n", n}, {"c", exact(g.coeff(n))}});
  }
  json out{{"class", to_string(d.cls)},
           {"N", exact(lls.N())},
           {"M", exact(lls.M())},
           {"F", F},
           {"G", G},
           {"F00", exact(d.f00)},
           {"F00_sign", exact(d.f00_sign)},
           {"note", d.note}};
  if (d.eigen_residual) out["F00_plus_2Re_lambda"] = floating(*d.eigen_residual);
  return out;
}

inline json averaging_json(const RescaledOscillator& osc, const AveragedDynamics& avg,
                           bool t_time) {
  // tau-time: R = omega * radial_reduced, Phi = phase.
  // t-time multiplies both by omega: omega^2 * radial_reduced is exact.
  json radial = json::array(), phase = json::array();
  for (int k = 0; k <= avg.radial_reduced.degree(); ++k) {
    const Rational c = avg.radial_reduced.coeff(k);
    if (c.is_zero()) continue;
    const Rational v = t_time ? c * avg.omega_sq : c;
    const int wpow = t_time ? 0 : 1;
    radial.push_back({{"power", k},
                      {"value", to_string(v)},
                      {"omega_power", wpow},
                      {"approx", to_double(v) * (wpow ? avg.omega : 1.0)},
                      {"provenance", "exact"}});
  }
  for (int k = 0; k <= avg.phase.degree(); ++k) {
    const Rational c = avg.phase.coeff(k);
    if (c.is_zero()) continue;
    const int wpow = t_time ? 1 : 0;
    phase.push_back({{"power", k},
                     {"value", to_string(c)},
                     {"omega_power", wpow},
                     {"approx", to_double(c) * (wpow ? avg.omega : 1.0)},
                     {"provenance", "exact"}});
  }
  json B = json::array();
  for (const auto& [e, c] : osc.B.terms()) B.push_back({{"n", e.first}, {"m", e.second}, {"c", exact(c)}});
  return {{"sigma", exact(osc.sigma)},
          {"sigma_fallback", osc.sigma_fallback},
          {"omega_sq", exact(osc.omega_sq)},
          {"omega", floating(osc.omega)},
          {"eps", exact(osc.eps)},
          {"b01_sign", exact(osc.b01_sign)},
          {"B", B},
          {"time", t_time ? "t" : "tau"},
          {"radial",
           {{"variable", "rho = r^2"},
            {"form", t_time ? "dr/dt = eps r R(r^2)" : "dr/dtau = eps r R(r^2)"},
            {"coefficients", radial}}},
          {"phase",
           {{"variable", "rho = r^2"},
            {"form", t_time ? "dphi/dt = eps Phi(r^2)" : "dphi/dtau = eps Phi(r^2)"},
            {"coefficients", phase}}}};
}

inline json bound_json(const ParityBound& b) {
  return {{"N", exact(b.N)},
          {"M", exact(b.M)},
          {"parity_class", to_string(b.parity_class)},
          {"max_real_roots", exact(b.max_real_roots)},
          {"max_cycles", exact(b.max_cycles)}};
}

inline json cycles_json(const CycleReport& rep) {
  json cycles = json::array();
  for (const auto& c : rep.cycles) {
    cycles.push_back({{"radius", floating(c.radius)},
                      {"rho", c.rho_exact ? exact(*c.rho_exact) : floating(c.rho)},
                      {"multiplicity", exact(c.multiplicity)},
                      {"stability", to_string(c.stability)},
                      {"freq_correction", floating(c.freq_correction)},
                      {"corrected_frequency", floating(c.corrected_frequency)}});
  }
  return {{"origin_nature", to_string(rep.origin_nature)},
          {"count", exact(static_cast<long long>(rep.cycles.size()))},
          {"cycles", cycles},
          {"bound", bound_json(rep.bound)},
          {"saturated", rep.saturated},
          {"complex_pairs", exact(rep.complex_pairs)},
          {"nonpositive_real_roots", exact(rep.nonpositive_real)}};
}

inline json detection_json(const DetectionResult& det) {
  json cycles = json::array(), outcomes = json::array();
  for (const auto& c : det.cycles) {
    cycles.push_back({{"amplitude", simulated(c.amplitude)},
                      {"crossing_amplitude", simulated(c.crossing_amplitude)},
                      {"radius_proxy", simulated(c.radius_proxy)},
                      {"period", simulated(c.period)},
                      {"multiplier", simulated(c.multiplier)},
                      {"stability", to_string(c.stability)},
                      {"converged", c.converged},
                      {"seed", floating(c.seed)}});
  }
  for (const auto& o : det.outcomes) {
    json j{{"seed", floating(o.seed)},
           {"direction", to_string(o.direction)},
           {"status", to_string(o.status)},
           {"crossings", exact(o.crossings)}};
    if (o.crossings > 0) j["last_crossing_amplitude"] = simulated(o.crossing_amplitude);
    if (o.status == SeedStatus::Converged) j["amplitude"] = simulated(o.amplitude);
    if (!o.message.empty()) j["message"] = o.message;
    outcomes.push_back(j);
  }
  return {{"cycles", cycles}, {"seeds", outcomes}};
}

inline json comparison_json(const Comparison& cmp) {
  json matches = json::array(), up = json::array(), ud = json::array();
  for (const auto& m : cmp.matches) {
    matches.push_back({{"predicted_radius", floating(m.predicted_radius)},
                       {"predicted_stability", to_string(m.predicted_stability)},
                       {"detected_amplitude", simulated(m.detected_amplitude)},
                       {"detected_stability", to_string(m.detected_stability)},
                       {"rel_error", simulated(m.rel_error)},
                       {"agree", m.agree},
                       {"stability_agrees", m.stability_agrees}});
  }
  for (const auto& c : cmp.unmatched_predicted) up.push_back(floating(c.radius));
  for (const auto& c : cmp.unmatched_detected) ud.push_back(simulated(c.amplitude));
  return {{"tolerance", floating(cmp.tolerance)},
          {"matches", matches},
          {"unmatched_predicted", up},
          {"unmatched_detected", ud},
          {"all_agree", cmp.all_agree}};
}

inline json table_json(const DegreeTable& grid) {
  json rows = json::array();
  for (const auto& row : grid) {
    json r = json::array();
    for (const auto& c : row) r.push_back({{"oplus", exact(c.oplus)}, {"R", exact(c.R)}});
    rows.push_back(r);
  }
  return rows;
}

/// CSV time series: t followed by the state columns.
inline std::string trajectory_csv(const std::vector<std::array<double, 3>>& samples,
                                  const std::string& c1, const std::string& c2) {
  std::ostringstream os;
  os.precision(17);
  os << "t," << c1 << ',' << c2 << '\n';
  for (const auto& s : samples) os << s[0] << ',' << s[1] << ',' << s[2] << '\n';
  return os.str();
}

}  // namespace cyclekit::io
