#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cyclekit/cycles.hpp"
#include "cyclekit/ode.hpp"
#include "cyclekit/reduction.hpp"

namespace cyclekit {

/// A planar system seen through the section coordinates (s, s'): the
/// Poincare half-line is {s' = 0, s > 0}.
struct SectionSystem {
  VectorField field;
  // Native state on the section at s = r, s' = 0.
  std::function<State(double)> seed_state;
  // Native state -> (s, s').
  std::function<State(const State&)> to_section;
  // Linear frequency, used for the radius proxy and the default step bound.
  double omega = 1.0;
};

inline SectionSystem section_system(const LLSSystem<Rational>& lls) {
  SectionSystem sys;
  sys.field = lls_field(lls);
  sys.seed_state = [](double r) { return State{r, 0.0}; };
  sys.to_section = [](const State& z) { return z; };
  const Rational w2 = -lls.A(1, 0);
  sys.omega = w2.sign() > 0 ? std::sqrt(to_double(w2)) : 1.0;
  return sys;
}

/// The original kinetic system, observed through the affine reduction map.
inline SectionSystem section_system(const KineticSystem<Rational>& kin,
                                    const ReductionMap<Rational>& map,
                                    const LLSSystem<Rational>& lls) {
  SectionSystem sys = section_system(lls);
  sys.field = kinetic_field(kin);
  const double c1 = to_double(map.c1), c3 = to_double(map.c3);
  const double cL = to_double(map.cL), cK = to_double(map.cK);
  const double b0 = to_double(map.beta0), b1 = to_double(map.beta1), b2 = to_double(map.beta2);
  const double a0 = to_double(map.alpha0), a1 = to_double(map.alpha1), a2 = to_double(map.alpha2);
  sys.seed_state = [=](double r) { return State{c1 * r + cL, c3 * r + cK}; };
  sys.to_section = [=](const State& z) {
    return State{b0 + b1 * z[0] + b2 * z[1], a0 + a1 * z[0] + a2 * z[1]};
  };
  return sys;
}

enum class SeedStatus { Converged, CollapsedToFixedPoint, Escaped, NoConvergence, Neutral };

inline std::string to_string(SeedStatus s) {
  switch (s) {
    case SeedStatus::Converged: return "Converged";
    case SeedStatus::CollapsedToFixedPoint: return "CollapsedToFixedPoint";
    case SeedStatus::Escaped: return "Escaped";
    case SeedStatus::Neutral: return "NoConvergence (neutral orbits)";
    case SeedStatus::NoConvergence: break;
  }
  return "NoConvergence";
}

struct DetectSettings {
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  int window = 5;
  int max_crossings = 2000;
  // The detector integrates more tightly than the generic SimSpec defaults
  // so that crossing differences resolve rel_tol.
  double integrator_rel_tol = 1e-10;
  double integrator_abs_tol = 1e-12;
  // 0 picks 1/20 of the linear period.
  double max_step = 0.0;
  // 0 means no time limit beyond max_crossings.
  double t_max = 0.0;
  double escape_radius = 1e3;
  double collapse_amplitude = 1e-6;
  double event_tol = 1e-10;
  // Relative offset for the isolation test on a converged orbit, and the
  // minimal contraction over `window` returns that counts as isolated.
  double isolation_offset = 1e-3;
  double min_contraction = 1e-4;
  bool both_directions = true;
  unsigned threads = 1;
};

struct SeedOutcome {
  double seed = 0.0;
  Direction direction = Direction::Forward;
  SeedStatus status = SeedStatus::NoConvergence;
  int crossings = 0;
  double crossing_amplitude = 0.0;
  double amplitude = 0.0;
  double radius_proxy = 0.0;
  double period = 0.0;
  double multiplier = 0.0;
  std::string message;
  // Section samples (t, s, s') when trajectories are recorded.
  std::vector<std::array<double, 3>> samples;
};

struct DetectedCycle {
  // max |s| over one period.
  double amplitude = 0.0;
  double crossing_amplitude = 0.0;
  // Mean of sqrt(s^2 + s'^2/omega^2) over one period.
  double radius_proxy = 0.0;
  double period = 0.0;
  Stability stability = Stability::Stable;
  bool converged = true;
  double multiplier = 0.0;
  double seed = 0.0;
};

struct DetectionResult {
  std::vector<DetectedCycle> cycles;
  std::vector<SeedOutcome> outcomes;
  std::vector<std::string> warnings;
};

namespace detail {

struct Crossing {
  double t = 0.0;
  double amplitude = 0.0;
  State native{};
};

// Follows one orbit from section crossing to section crossing. Throws
// StepUnderflow / NonFiniteState.
class SectionTracker {
 public:
  SectionTracker(const SectionSystem& sys, Direction dir, const State& start,
                 const DetectSettings& st, double max_step, double t_scale)
      : sys_(sys),
        st_(st),
        integ_(oriented(sys.field, dir), start, st.integrator_rel_tol, st.integrator_abs_tol,
               max_step, t_scale),
        prev_(sys.to_section(start)) {}

  double time() const { return integ_.time(); }
  const State& native() const { return integ_.state(); }

  /// Steps until the next crossing of {s' = 0, s > 0} (in either rotation
  /// sense) and returns it; nullopt when the orbit escapes.
  std::optional<Crossing> next(std::vector<std::array<double, 3>>* samples) {
    for (;;) {
      const auto [t0, t1] = integ_.step();
      const State q = sys_.to_section(integ_.state());
      if (samples) samples->push_back({t1, q[0], q[1]});
      if (std::hypot(q[0], q[1]) > st_.escape_radius) return std::nullopt;
      const State p = prev_;
      prev_ = q;
      if (p[1] == 0.0) continue;
      if (q[1] == 0.0) {
        if (q[0] > 0.0) return Crossing{t1, q[0], integ_.state()};
        continue;
      }
      if ((p[1] > 0) == (q[1] > 0)) continue;
      const Crossing c = locate(t0, t1, p[1]);
      if (c.amplitude > 0.0) return c;
    }
  }

  /// Accumulates max |s| and the time integral of the radius proxy over
  /// [t0, t1] inside the last step.
  void observe(double t0, double t1, double& max_s, double& proxy_sum, double& proxy_time) const {
    constexpr int kSub = 8;
    double prev_val = proxy(integ_.at(t0));
    for (int k = 1; k <= kSub; ++k) {
      const double t = t0 + (t1 - t0) * k / kSub;
      const State q = sys_.to_section(integ_.at(t));
      max_s = std::max(max_s, std::abs(q[0]));
      const double val = std::hypot(q[0], q[1] / sys_.omega);
      proxy_sum += 0.5 * (prev_val + val) * (t1 - t0) / kSub;
      prev_val = val;
    }
    proxy_time += t1 - t0;
  }

  std::pair<double, double> step() {
    const auto span = integ_.step();
    prev_ = sys_.to_section(integ_.state());
    return span;
  }

 private:
  double proxy(const State& native) const {
    const State q = sys_.to_section(native);
    return std::hypot(q[0], q[1] / sys_.omega);
  }

  Crossing locate(double a, double b, double fa_sign_ref) const {
    // Bisection on s'(t); the sign at `a` is that of fa_sign_ref.
    const bool pos_at_a = fa_sign_ref > 0;
    double lo = a, hi = b;
    while (hi - lo > st_.event_tol) {
      const double mid = 0.5 * (lo + hi);
      const double v = sys_.to_section(integ_.at(mid))[1];
      if (v == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((v > 0) == pos_at_a) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double t = 0.5 * (lo + hi);
    const State x = integ_.at(t);
    return {t, sys_.to_section(x)[0], x};
  }

  const SectionSystem& sys_;
  const DetectSettings& st_;
  DenseIntegrator integ_;
  State prev_;
};

inline double default_max_step(const SectionSystem& sys, const DetectSettings& st) {
  if (st.max_step > 0) return st.max_step;
  return 2.0 * std::numbers::pi / sys.omega / 20.0;
}

inline double time_scale(const SectionSystem& sys, const DetectSettings& st) {
  if (st.t_max > 0) return st.t_max;
  return 2.0 * std::numbers::pi / sys.omega;
}

// P^k(a): the k-th return of the orbit started on the section at amplitude a,
// or nullopt if it escapes, collapses or fails.
inline std::optional<double> returns(const SectionSystem& sys, Direction dir, double a, int k,
                                     const DetectSettings& st) {
  try {
    SectionTracker tr(sys, dir, sys.seed_state(a), st, default_max_step(sys, st),
                      time_scale(sys, st));
    double last = a;
    for (int i = 0; i < k; ++i) {
      const auto c = tr.next(nullptr);
      if (!c) return std::nullopt;
      last = c->amplitude;
    }
    return last;
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline SeedOutcome run_seed(const SectionSystem& sys, double r0, Direction dir,
                            const DetectSettings& st, bool record) {
  SeedOutcome out;
  out.seed = r0;
  out.direction = dir;
  std::vector<std::array<double, 3>>* samples = record ? &out.samples : nullptr;
  try {
    SectionTracker tr(sys, dir, sys.seed_state(r0), st, default_max_step(sys, st),
                      time_scale(sys, st));
    std::vector<Crossing> hits;
    for (;;) {
      if (st.t_max > 0 && tr.time() > st.t_max) {
        out.status = SeedStatus::NoConvergence;
        out.message = "t_max reached";
        break;
      }
      const auto c = tr.next(samples);
      if (!c) {
        out.status = SeedStatus::Escaped;
        out.message = "left the escape radius";
        break;
      }
      hits.push_back(*c);
      out.crossings = static_cast<int>(hits.size());
      out.crossing_amplitude = c->amplitude;
      if (c->amplitude < st.collapse_amplitude) {
        out.status = SeedStatus::CollapsedToFixedPoint;
        break;
      }
      if (out.crossings >= st.max_crossings) {
        out.status = SeedStatus::NoConvergence;
        out.message = "crossing cap reached";
        break;
      }
      if (out.crossings <= st.window) continue;
      bool settled = true;
      for (int i = 0; i < st.window && settled; ++i) {
        const double a1 = hits[hits.size() - 1 - i].amplitude;
        const double a0 = hits[hits.size() - 2 - i].amplitude;
        settled = std::abs(a1 - a0) < st.rel_tol * std::abs(a1) + st.abs_tol;
      }
      if (!settled) continue;

      const double a_star = c->amplitude;
      out.period = c->t - hits[hits.size() - 2].t;

      // One more period for amplitude statistics.
      double max_s = 0.0, proxy_sum = 0.0, proxy_time = 0.0;
      SectionTracker obs(sys, dir, c->native, st, default_max_step(sys, st), time_scale(sys, st));
      while (obs.time() < out.period) {
        const auto [t0, t1] = obs.step();
        obs.observe(t0, std::min(t1, out.period), max_s, proxy_sum, proxy_time);
      }
      out.amplitude = max_s;
      out.radius_proxy = proxy_time > 0 ? proxy_sum / proxy_time : a_star;

      // Isolation: an attracting cycle contracts a small offset noticeably
      // over `window` returns; a neutral (center-type) orbit does not.
      const double d = st.isolation_offset * a_star;
      const auto pk = returns(sys, dir, a_star + d, st.window, st);
      if (!pk) {
        out.status = SeedStatus::NoConvergence;
        out.message = "isolation test orbit failed";
        break;
      }
      const double contraction = (*pk - a_star) / d;
      out.multiplier = contraction > 0 ? std::pow(contraction, 1.0 / st.window) : contraction;
      out.status = contraction < 1.0 - st.min_contraction ? SeedStatus::Converged
                                                          : SeedStatus::Neutral;
      if (out.status == SeedStatus::Neutral) out.message = "returns do not contract: neutral orbits";
      break;
    }
  } catch (const StepUnderflow& e) {
    out.status = SeedStatus::Escaped;
    out.message = e.what();
  } catch (const NonFiniteState& e) {
    out.status = SeedStatus::Escaped;
    out.message = e.what();
  }
  return out;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

/// Runs every seed Forward (stable cycles) and, if enabled, TimeReversed
/// (unstable cycles), then merges converged runs of equal amplitude.
/// Outcomes are ordered by seed, then direction, regardless of threading.
inline DetectionResult detect_limit_cycles(const SectionSystem& sys,
                                           const std::vector<double>& seed_radii,
                                           const DetectSettings& st = {},
                                           bool record_samples = false) {
  for (const double r : seed_radii) {
    if (!(r > 0) || !std::isfinite(r)) throw InputError("seed radii must be positive");
  }
  std::vector<std::pair<double, Direction>> jobs;
  for (const double r : seed_radii) {
    jobs.emplace_back(r, Direction::Forward);
    if (st.both_directions) jobs.emplace_back(r, Direction::TimeReversed);
  }
  DetectionResult res;
  res.outcomes.resize(jobs.size());
  detail::parallel_for(jobs.size(), st.threads, [&](std::size_t i) {
    res.outcomes[i] = detail::run_seed(sys, jobs[i].first, jobs[i].second, st, record_samples);
  });
  for (const auto& o : res.outcomes) {
    if (o.status == SeedStatus::NoConvergence || o.status == SeedStatus::Neutral) {
      res.warnings.push_back("seed " + std::to_string(o.seed) + " " + to_string(o.direction) +
                             ": " + to_string(o.status) +
                             (o.message.empty() ? "" : " (" + o.message + ")"));
    }
    if (o.status != SeedStatus::Converged) continue;
    const Stability stab =
        o.direction == Direction::Forward ? Stability::Stable : Stability::Unstable;
    const bool dup = std::any_of(res.cycles.begin(), res.cycles.end(), [&](const DetectedCycle& c) {
      return c.stability == stab &&
             std::abs(c.crossing_amplitude - o.crossing_amplitude) <=
                 1e-4 * std::max(c.crossing_amplitude, o.crossing_amplitude);
    });
    if (dup) continue;
    DetectedCycle c;
    c.amplitude = o.amplitude;
    c.crossing_amplitude = o.crossing_amplitude;
    c.radius_proxy = o.radius_proxy;
    c.period = o.period;
    c.stability = stab;
    c.multiplier = o.multiplier;
    c.seed = o.seed;
    res.cycles.push_back(c);
  }
  std::sort(res.cycles.begin(), res.cycles.end(),
            [](const DetectedCycle& a, const DetectedCycle& b) { return a.amplitude < b.amplitude; });
  return res;
}

/// Seeds halfway between consecutive predicted radii, plus one inside the
/// first and one beyond the last.
inline std::vector<double> default_seeds(const CycleReport& rep) {
  std::vector<double> radii;
  for (const auto& c : rep.cycles) radii.push_back(c.radius);
  if (radii.empty()) return {0.5, 1.0, 2.0};
  std::vector<double> seeds{0.5 * radii.front()};
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) seeds.push_back(0.5 * (radii[i] + radii[i + 1]));
  seeds.push_back(radii.back() + 0.5 * (radii.size() > 1 ? radii.back() - radii[radii.size() - 2]
                                                         : radii.back()));
  return seeds;
}

struct CycleMatch {
  double predicted_radius = 0.0;
  Stability predicted_stability = Stability::Stable;
  double detected_amplitude = 0.0;
  Stability detected_stability = Stability::Stable;
  double rel_error = 0.0;
  bool agree = false;
  bool stability_agrees = false;
};

struct Comparison {
  std::vector<CycleMatch> matches;
  std::vector<CycleEstimate> unmatched_predicted;
  std::vector<DetectedCycle> unmatched_detected;
  double tolerance = 0.0;
  bool all_agree = false;
};

/// Greedy pairing by proximity of predicted radius and detected amplitude.
inline Comparison compare_with_kb(const CycleReport& rep, const std::vector<DetectedCycle>& detected,
                                  double eps) {
  Comparison cmp;
  cmp.tolerance = std::max(5.0 * std::abs(eps), 0.05);
  struct Pair {
    double dist;
    std::size_t p, d;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < rep.cycles.size(); ++i) {
    for (std::size_t j = 0; j < detected.size(); ++j) {
      pairs.push_back({std::abs(rep.cycles[i].radius - detected[j].amplitude), i, j});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.dist < b.dist; });
  std::vector<bool> used_p(rep.cycles.size()), used_d(detected.size());
  for (const auto& pr : pairs) {
    if (used_p[pr.p] || used_d[pr.d]) continue;
    used_p[pr.p] = used_d[pr.d] = true;
    CycleMatch m;
    m.predicted_radius = rep.cycles[pr.p].radius;
    m.predicted_stability = rep.cycles[pr.p].stability;
    m.detected_amplitude = detected[pr.d].amplitude;
    m.detected_stability = detected[pr.d].stability;
    m.rel_error = pr.dist / m.predicted_radius;
    m.agree = m.rel_error < cmp.tolerance;
    m.stability_agrees = m.predicted_stability == m.detected_stability;
    cmp.matches.push_back(m);
  }
  std::sort(cmp.matches.begin(), cmp.matches.end(), [](const CycleMatch& a, const CycleMatch& b) {
    return a.predicted_radius < b.predicted_radius;
  });
  for (std::size_t i = 0; i < rep.cycles.size(); ++i) {
    if (!used_p[i]) cmp.unmatched_predicted.push_back(rep.cycles[i]);
  }
  for (std::size_t j = 0; j < detected.size(); ++j) {
    if (!used_d[j]) cmp.unmatched_detected.push_back(detected[j]);
  }
  cmp.all_agree = cmp.unmatched_predicted.empty() && cmp.unmatched_detected.empty() &&
                  std::all_of(cmp.matches.begin(), cmp.matches.end(),
                              [](const CycleMatch& m) { return m.agree && m.stability_agrees; });
  return cmp;
}

}  // namespace cyclekit
