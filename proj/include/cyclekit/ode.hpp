#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "cyclekit/kinetic.hpp"
#include "cyclekit/lls.hpp"

namespace cyclekit {

enum class Direction { Forward, TimeReversed };

inline std::string to_string(Direction d) {
  return d == Direction::Forward ? "Forward" : "TimeReversed";
}

using VectorField = std::function<State(const State&)>;

/// (s, s') -> (s', sum A_nm s^n s'^m).
inline VectorField lls_field(const LLSSystem<Rational>& lls) {
  BiPoly<double> accel = lls.table().to_double_poly();
  return [accel = std::move(accel)](const State& z) -> State {
    return {z[1], accel.evaluate(z[0], z[1])};
  };
}

inline VectorField kinetic_field(const KineticSystem<Rational>& sys) {
  return [field = sys.field()](const State& z) { return field(z); };
}

inline VectorField oriented(VectorField f, Direction d) {
  if (d == Direction::Forward) return f;
  return [f = std::move(f)](const State& z) -> State {
    const State v = f(z);
    return {-v[0], -v[1]};
  };
}

struct SimSpec {
  VectorField field;
  State initial{};
  double t_max = 0.0;
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  Direction direction = Direction::Forward;
  // Largest step the controller may take; 0 leaves it unbounded.
  double max_step = 0.0;
};

/// Thin wrapper over the dopri5 dense-output stepper: one accepted step at a
/// time, with interpolation anywhere inside the last step.
class DenseIntegrator {
 public:
  using Stepper = boost::numeric::odeint::runge_kutta_dopri5<State>;
  using Dense = boost::numeric::odeint::result_of::make_dense_output<Stepper>::type;

  DenseIntegrator(VectorField field, const State& x0, double rel_tol, double abs_tol,
                  double max_step, double t_scale)
      : field_(std::move(field)),
        dense_(max_step > 0 ? boost::numeric::odeint::make_dense_output(abs_tol, rel_tol, max_step,
                                                                         Stepper())
                            : boost::numeric::odeint::make_dense_output(abs_tol, rel_tol,
                                                                         Stepper())),
        min_step_(1e-14 * t_scale) {
    if (!(rel_tol > 0 && rel_tol <= 1e-2) || !(abs_tol > 0 && abs_tol <= 1e-2)) {
      throw InputError("integration tolerances must lie in (0, 1e-2]");
    }
    check_finite(x0);
    const double dt0 = max_step > 0 ? std::min(1e-3, max_step) : 1e-3;
    dense_.initialize(x0, 0.0, dt0);
  }

  /// Advances one accepted step; returns (t_before, t_after).
  std::pair<double, double> step() {
    auto sys = [this](const State& x, State& dxdt, double) { dxdt = field_(x); };
    std::pair<double, double> span;
    try {
      span = dense_.do_step(sys);
    } catch (const boost::numeric::odeint::step_adjustment_error& e) {
      throw StepUnderflow(std::string("step size control failed: ") + e.what());
    }
    check_finite(dense_.current_state());
    if (span.second - span.first < min_step_) {
      throw StepUnderflow("step size fell below 1e-14 * t_max at t = " +
                          std::to_string(span.second));
    }
    return span;
  }

  double time() const { return dense_.current_time(); }
  const State& state() const { return dense_.current_state(); }

  /// Interpolated state inside the last step.
  State at(double t) const {
    State x{};
    dense_.calc_state(t, x);
    return x;
  }

  State derivative(const State& x) const { return field_(x); }

 private:
  static void check_finite(const State& x) {
    if (!std::isfinite(x[0]) || !std::isfinite(x[1])) {
      throw NonFiniteState("state left the finite range");
    }
  }

  VectorField field_;
  mutable Dense dense_;
  double min_step_;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<State> x;
  // Field values at the samples, for cubic Hermite interpolation.
  std::vector<State> dx;

  /// Hermite interpolant between stored samples (clamped to the ends).
  State at(double time) const {
    if (t.empty()) throw InputError("empty trajectory");
    if (time <= t.front()) return x.front();
    if (time >= t.back()) return x.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
    const double h = t[i + 1] - t[i];
    const double s = (time - t[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    State out{};
    for (int k = 0; k < 2; ++k) {
      out[k] = h00 * x[i][k] + h10 * h * dx[i][k] + h01 * x[i + 1][k] + h11 * h * dx[i + 1][k];
    }
    return out;
  }
};

/// Adaptive dopri5 integration over [0, t_max], one sample per accepted step.
/// TimeReversed integrates the negated field.
inline Trajectory integrate(const SimSpec& spec) {
  if (!(spec.t_max > 0)) throw InputError("t_max must be positive");
  if (!spec.field) throw InputError("SimSpec has no vector field");
  const VectorField f = oriented(spec.field, spec.direction);
  DenseIntegrator stepper(f, spec.initial, spec.rel_tol, spec.abs_tol, spec.max_step, spec.t_max);
  Trajectory traj;
  traj.t.push_back(0.0);
  traj.x.push_back(spec.initial);
  traj.dx.push_back(f(spec.initial));
  while (stepper.time() < spec.t_max) {
    const auto [t0, t1] = stepper.step();
    if (t1 >= spec.t_max) {
      const State xe = stepper.at(spec.t_max);
      traj.t.push_back(spec.t_max);
      traj.x.push_back(xe);
      traj.dx.push_back(f(xe));
      break;
    }
    traj.t.push_back(t1);
    traj.x.push_back(stepper.state());
    traj.dx.push_back(f(stepper.state()));
  }
  return traj;
}

}  // namespace cyclekit
