#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cyclekit/kinetic.hpp"

namespace cyclekit {

enum class FixedPointKind {
  Saddle,
  StableNode,
  UnstableNode,
  StableFocus,
  UnstableFocus,
  CenterType,
  Degenerate
};

inline std::string to_string(FixedPointKind k) {
  switch (k) {
    case FixedPointKind::Saddle: return "saddle";
    case FixedPointKind::StableNode: return "stable node";
    case FixedPointKind::UnstableNode: return "unstable node";
    case FixedPointKind::StableFocus: return "stable focus";
    case FixedPointKind::UnstableFocus: return "unstable focus";
    case FixedPointKind::CenterType: return "center-type";
    case FixedPointKind::Degenerate: break;
  }
  return "degenerate";
}

struct SearchBox {
  double x_min = -10.0;
  double x_max = 10.0;
  double y_min = -10.0;
  double y_max = 10.0;
};

struct FixedPointInfo {
  double xs = 0.0;
  double ys = 0.0;
  Matrix2 jacobian{};
  std::complex<double> lambda_plus;
  std::complex<double> lambda_minus;
  double trace = 0.0;
  double determinant = 0.0;
  bool singular = false;
  FixedPointKind kind = FixedPointKind::Degenerate;
  double residual = 0.0;
  // Exact coordinates: the closed form, a small rational that zeroes the
  // right-hand sides exactly, or the binary value of the double.
  FixedPoint<Rational> exact{Rational(0), Rational(0), false};
};

/// Jacobian, eigenvalues and type of the field at (x, y).
inline FixedPointInfo analyze_point(const PolynomialField& field, double x, double y) {
  FixedPointInfo info;
  info.xs = x;
  info.ys = y;
  info.jacobian = field.jacobian({x, y});
  const auto& J = info.jacobian;
  info.trace = J[0][0] + J[1][1];
  info.determinant = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  const std::complex<double> disc =
      std::sqrt(std::complex<double>(info.trace * info.trace - 4.0 * info.determinant));
  info.lambda_plus = 0.5 * (info.trace + disc);
  info.lambda_minus = 0.5 * (info.trace - disc);
  const State r = field({x, y});
  info.residual = std::hypot(r[0], r[1]);

  const double scale = std::abs(J[0][0]) + std::abs(J[0][1]) + std::abs(J[1][0]) + std::abs(J[1][1]);
  const double tiny = 1e-12 * std::max(1.0, scale);
  info.singular = std::abs(info.determinant) <= 1e-12 * std::max(1.0, scale * scale);
  if (info.singular) {
    info.kind = FixedPointKind::Degenerate;
  } else if (info.determinant < 0) {
    info.kind = FixedPointKind::Saddle;
  } else if (std::abs(info.trace) <= tiny) {
    info.kind = FixedPointKind::CenterType;
  } else if (info.trace * info.trace < 4.0 * info.determinant) {
    info.kind = info.trace < 0 ? FixedPointKind::StableFocus : FixedPointKind::UnstableFocus;
  } else {
    info.kind = info.trace < 0 ? FixedPointKind::StableNode : FixedPointKind::UnstableNode;
  }
  return info;
}

/// Analysis at a known exact fixed point (closed forms from the model zoo or
/// a user-supplied point).
inline FixedPointInfo describe_fixed_point(const KineticSystem<Rational>& sys,
                                           const FixedPoint<Rational>& fp) {
  FixedPointInfo info = analyze_point(sys.field(), to_double(fp.x), to_double(fp.y));
  info.exact = fp;
  return info;
}

namespace detail {

struct NewtonResult {
  bool converged = false;
  State point{};
};

// Damped Newton with backtracking on the residual norm.
inline NewtonResult damped_newton(const PolynomialField& field, State z) {
  auto norm = [](const State& v) { return std::hypot(v[0], v[1]); };
  State r = field(z);
  double rn = norm(r);
  for (int iter = 0; iter < 100; ++iter) {
    if (!std::isfinite(rn)) return {};
    if (rn < 1e-13 * (1.0 + norm(z))) return {true, z};
    const Matrix2 J = field.jacobian(z);
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (det == 0.0 || !std::isfinite(det)) return {};
    const State step{(J[1][1] * r[0] - J[0][1] * r[1]) / det,
                     (-J[1][0] * r[0] + J[0][0] * r[1]) / det};
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k) {
      const State trial{z[0] - lambda * step[0], z[1] - lambda * step[1]};
      const State rt = field(trial);
      const double rtn = norm(rt);
      if (std::isfinite(rtn) && rtn < rn) {
        z = trial;
        r = rt;
        rn = rtn;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      return {rn < 1e-10 * (1.0 + norm(z)), z};
    }
    if (lambda * norm(step) < 1e-15 * (1.0 + norm(z))) {
      return {rn < 1e-10 * (1.0 + norm(z)), z};
    }
  }
  return {rn < 1e-10 * (1.0 + norm(z)), z};
}

inline std::vector<State> newton_from_grid(const PolynomialField& field, const SearchBox& box,
                                           int seeds_per_axis,
                                           std::optional<std::uint64_t> jitter_seed) {
  if (seeds_per_axis < 2) throw InputError("seeds_per_axis must be at least 2");
  if (!(box.x_max > box.x_min) || !(box.y_max > box.y_min)) {
    throw InputError("search box is empty");
  }
  const double hx = (box.x_max - box.x_min) / (seeds_per_axis - 1);
  const double hy = (box.y_max - box.y_min) / (seeds_per_axis - 1);
  std::optional<std::mt19937_64> rng;
  if (jitter_seed) rng.emplace(*jitter_seed);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);

  const double mx = 0.05 * (box.x_max - box.x_min);
  const double my = 0.05 * (box.y_max - box.y_min);
  std::vector<State> found;
  for (int i = 0; i < seeds_per_axis; ++i) {
    for (int j = 0; j < seeds_per_axis; ++j) {
      State seed{box.x_min + i * hx, box.y_min + j * hy};
      if (rng) {
        seed[0] += jitter(*rng) * hx;
        seed[1] += jitter(*rng) * hy;
      }
      const auto res = damped_newton(field, seed);
      if (!res.converged) continue;
      const State& p = res.point;
      if (p[0] < box.x_min - mx || p[0] > box.x_max + mx || p[1] < box.y_min - my ||
          p[1] > box.y_max + my) {
        continue;
      }
      const bool duplicate = std::any_of(found.begin(), found.end(), [&](const State& q) {
        return std::hypot(p[0] - q[0], p[1] - q[1]) <= 1e-7 * (1.0 + std::hypot(q[0], q[1]));
      });
      if (!duplicate) found.push_back(p);
    }
  }
  if (found.empty()) throw NoFixedPointFound("no Newton run from the seed grid converged");
  std::sort(found.begin(), found.end());
  return found;
}

}  // namespace detail

/// Fixed points of a polynomial field inside `box`, by damped Newton from a
/// seeds_per_axis x seeds_per_axis grid. Optional jitter of the seeds is
/// driven by `jitter_seed` so runs are reproducible.
inline std::vector<FixedPointInfo> find_fixed_points(const PolynomialField& field,
                                                     const SearchBox& box,
                                                     int seeds_per_axis = 9,
                                                     std::optional<std::uint64_t> jitter_seed = {}) {
  std::vector<FixedPointInfo> out;
  for (const State& p : detail::newton_from_grid(field, box, seeds_per_axis, jitter_seed)) {
    FixedPointInfo info = analyze_point(field, p[0], p[1]);
    info.exact = {rational_from_double(p[0]), rational_from_double(p[1]), false};
    out.push_back(info);
  }
  return out;
}

/// As above for an exact kinetic system; each root is snapped to a nearby
/// small rational when that rational zeroes both right-hand sides exactly.
inline std::vector<FixedPointInfo> find_fixed_points(const KineticSystem<Rational>& sys,
                                                     const SearchBox& box,
                                                     int seeds_per_axis = 9,
                                                     std::optional<std::uint64_t> jitter_seed = {}) {
  const PolynomialField field = sys.field();
  const BiPoly<Rational> p1 = sys.rhs_first();
  const BiPoly<Rational> p2 = sys.rhs_second();
  std::vector<FixedPointInfo> out;
  for (const State& p : detail::newton_from_grid(field, box, seeds_per_axis, jitter_seed)) {
    FixedPointInfo info = analyze_point(field, p[0], p[1]);
    info.exact = {rational_from_double(p[0]), rational_from_double(p[1]), false};
    const auto sx = best_rational(p[0], 1000000);
    const auto sy = best_rational(p[1], 1000000);
    if (sx && sy && p1.evaluate(*sx, *sy).is_zero() && p2.evaluate(*sx, *sy).is_zero()) {
      info.exact = {*sx, *sy, true};
    }
    out.push_back(info);
  }
  return out;
}

}  // namespace cyclekit
