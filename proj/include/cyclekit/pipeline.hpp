#pragma once

#include <optional>

#include "cyclekit/averaging.hpp"
#include "cyclekit/cycles.hpp"
#include "cyclekit/fixed_points.hpp"
#include "cyclekit/reduction.hpp"

namespace cyclekit {

/// Everything the symbolic pipeline derives for one system.
struct Analysis {
  std::optional<KineticSystem<Rational>> kinetic;
  std::optional<FixedPointInfo> fixed_point;
  std::optional<ReductionMap<Rational>> map;
  LLSSystem<Rational> lls;
  LlsDiagnosis diagnosis;
};

struct OscillatorAnalysis {
  RescaledOscillator oscillator;
  AveragedDynamics averaged;
  CycleReport report;
};

inline Analysis analyze_lls(const LLSSystem<Rational>& lls) {
  Analysis a;
  a.lls = lls;
  a.diagnosis = classify_lls(lls);
  return a;
}

inline Analysis analyze_kinetic(const KineticSystem<Rational>& sys, const FixedPoint<Rational>& fp,
                                const ReduceOptions& opts = {}) {
  Analysis a;
  a.kinetic = sys;
  a.fixed_point = describe_fixed_point(sys, fp);
  auto [map, lls] = reduce(sys, fp, opts);
  a.map = std::move(map);
  a.lls = std::move(lls);
  a.diagnosis = classify_lls(a.lls, a.fixed_point);
  return a;
}

/// Rescaling, averaging and cycle classification. Throws NotOscillatory.
inline OscillatorAnalysis analyze_oscillator(const LLSSystem<Rational>& lls) {
  OscillatorAnalysis o{rescale(lls), {}, {}};
  o.averaged = kb_average(o.oscillator);
  o.report = count_cycles(o.averaged);
  return o;
}

}  // namespace cyclekit
