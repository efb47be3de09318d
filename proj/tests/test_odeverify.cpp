#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cyclekit/cyclekit.hpp"

using namespace cyclekit;

namespace {

LLSSystem<Rational> table_of(std::initializer_list<std::tuple<int, int, Rational>> entries) {
  BiPoly<Rational> t;
  for (const auto& [n, m, c] : entries) t.add_term(c, n, m);
  return LLSSystem<Rational>(t);
}

// s -> s, t -> -t: odd powers of s' change sign.
LLSSystem<Rational> time_reversed(const LLSSystem<Rational>& lls) {
  BiPoly<Rational> t;
  for (const auto& [e, c] : lls.table().terms()) t.add_term(e.second % 2 ? -c : c, e.first, e.second);
  return LLSSystem<Rational>(t);
}

DetectSettings fast_settings() {
  DetectSettings st;
  st.threads = 4;
  return st;
}

}  // namespace

TEST(Integrate, HarmonicOscillatorMatchesClosedForm) {
  SimSpec spec;
  spec.field = [](const State& z) { return State{z[1], -z[0]}; };
  spec.initial = {1.0, 0.0};
  spec.t_max = 20.0;
  const Trajectory tr = integrate(spec);
  ASSERT_GT(tr.t.size(), 10u);
  for (std::size_t i = 1; i < tr.t.size(); ++i) {
    EXPECT_GT(tr.t[i], tr.t[i - 1]);
    EXPECT_NEAR(tr.x[i][0], std::cos(tr.t[i]), 1e-5);
  }
  EXPECT_DOUBLE_EQ(tr.t.back(), 20.0);
  EXPECT_NEAR(tr.at(10.3)[0], std::cos(10.3), 1e-4);
}

TEST(Integrate, ConservativeEnergyDriftIsSmall) {
  // Duffing s'' = -s - s^3, E = s'^2/2 + s^2/2 + s^4/4.
  SimSpec spec;
  spec.field = [](const State& z) { return State{z[1], -z[0] - z[0] * z[0] * z[0]}; };
  spec.initial = {0.8, 0.0};
  spec.t_max = 100 * 2 * std::numbers::pi;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-14;
  auto energy = [](const State& z) {
    return 0.5 * z[1] * z[1] + 0.5 * z[0] * z[0] + 0.25 * std::pow(z[0], 4);
  };
  const Trajectory tr = integrate(spec);
  const double e0 = energy(spec.initial);
  double drift = 0.0;
  for (const auto& x : tr.x) drift = std::max(drift, std::abs(energy(x) - e0));
  EXPECT_LT(drift, 1e-8);
}

TEST(Integrate, ReversedRunReturnsToStart) {
  const VectorField f = lls_field(*build_model("van_der_pol").reference_lls);
  SimSpec fwd{f, {0.5, 0.3}, 5.0, 1e-10, 1e-12, Direction::Forward, 0.0};
  const State end = integrate(fwd).x.back();
  SimSpec back{f, end, 5.0, 1e-10, 1e-12, Direction::TimeReversed, 0.0};
  const State start = integrate(back).x.back();
  EXPECT_NEAR(start[0], 0.5, 1e-7);
  EXPECT_NEAR(start[1], 0.3, 1e-7);
}

TEST(Integrate, RejectsBadInput) {
  SimSpec spec;
  spec.field = [](const State& z) { return z; };
  spec.initial = {1.0, 0.0};
  spec.t_max = 0.0;
  EXPECT_THROW(integrate(spec), InputError);
  spec.t_max = 1.0;
  spec.rel_tol = 0.5;
  EXPECT_THROW(integrate(spec), InputError);
}

TEST(Integrate, BlowUpIsReported) {
  // x' = x^2 leaves every bound at t = 1.
  SimSpec spec;
  spec.field = [](const State& z) { return State{z[0] * z[0], 0.0}; };
  spec.initial = {1.0, 0.0};
  spec.t_max = 2.0;
  EXPECT_THROW(integrate(spec), Error);
}

TEST(Detector, VanDerPolAmplitude) {
  const auto lls = *build_model("van_der_pol").reference_lls;
  const auto det = detect_limit_cycles(section_system(lls), {0.5, 4.0}, fast_settings());
  ASSERT_EQ(det.cycles.size(), 1u);
  EXPECT_NEAR(det.cycles[0].amplitude, 2.0, 0.04);
  EXPECT_EQ(det.cycles[0].stability, Stability::Stable);
  EXPECT_LT(det.cycles[0].multiplier, 1.0);
  EXPECT_NEAR(det.cycles[0].period, 2 * std::numbers::pi, 0.05);
}

TEST(Detector, BlowsLloydThreeCycles) {
  const auto lls = *build_model("blows_lloyd").reference_lls;
  const auto det = detect_limit_cycles(section_system(lls), {0.5, 1.5, 2.5, 3.5}, fast_settings());
  ASSERT_EQ(det.cycles.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(det.cycles[i].amplitude, i + 1.0, 0.02 * (i + 1.0));
  EXPECT_EQ(det.cycles[0].stability, Stability::Stable);
  EXPECT_EQ(det.cycles[1].stability, Stability::Unstable);
  EXPECT_EQ(det.cycles[2].stability, Stability::Stable);
}

TEST(Detector, TimeReversalSwapsStability) {
  const auto lls = *build_model("rychkov").reference_lls;
  const auto rev = time_reversed(lls);
  const auto a = detect_limit_cycles(section_system(lls), {0.5, 1.5, 3.0}, fast_settings());
  const auto b = detect_limit_cycles(section_system(rev), {0.5, 1.5, 3.0}, fast_settings());
  ASSERT_EQ(a.cycles.size(), 2u);
  ASSERT_EQ(b.cycles.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(a.cycles[i].amplitude, b.cycles[i].amplitude, 1e-5);
    EXPECT_NE(a.cycles[i].stability, b.cycles[i].stability);
  }
  const auto ka = analyze_oscillator(lls).report, kb = analyze_oscillator(rev).report;
  ASSERT_EQ(ka.cycles.size(), kb.cycles.size());
  for (std::size_t i = 0; i < ka.cycles.size(); ++i) {
    EXPECT_EQ(ka.cycles[i].radius, kb.cycles[i].radius);
    EXPECT_NE(ka.cycles[i].stability, kb.cycles[i].stability);
  }
}

TEST(Detector, KineticAndLlsFramesAgree) {
  for (const char* name : {"van_der_pol", "glycolytic", "modified_brusselator"}) {
    const ModelInstance m = build_model(name);
    const Analysis a = analyze_kinetic(m.kinetic, m.fixed_point);
    const auto seeds = default_seeds(analyze_oscillator(a.lls).report);
    const auto on_lls = detect_limit_cycles(section_system(a.lls), seeds, fast_settings());
    const auto on_kin =
        detect_limit_cycles(section_system(*a.kinetic, *a.map, a.lls), seeds, fast_settings());
    ASSERT_EQ(on_lls.cycles.size(), on_kin.cycles.size()) << name;
    for (std::size_t i = 0; i < on_lls.cycles.size(); ++i) {
      EXPECT_NEAR(on_lls.cycles[i].amplitude, on_kin.cycles[i].amplitude,
                  1e-4 * on_lls.cycles[i].amplitude)
          << name;
    }
  }
}

TEST(Detector, CenterGivesNeutralOrbits) {
  const ModelInstance m = build_model("lotka_volterra");
  const auto lls = reduce(m.kinetic, m.fixed_point).second;
  const auto det = detect_limit_cycles(section_system(lls), {0.3, 0.6}, fast_settings());
  EXPECT_TRUE(det.cycles.empty());
  for (const auto& o : det.outcomes) EXPECT_EQ(o.status, SeedStatus::Neutral);
  EXPECT_FALSE(det.warnings.empty());
}

TEST(Detector, LinearFocusEscapesOrCollapses) {
  const auto lls = table_of({{1, 0, Rational(-1)}, {0, 1, make_rational(1, 10)}});
  const auto det = detect_limit_cycles(section_system(lls), {1.0}, fast_settings());
  ASSERT_EQ(det.outcomes.size(), 2u);
  EXPECT_EQ(det.outcomes[0].status, SeedStatus::Escaped);
  EXPECT_EQ(det.outcomes[1].status, SeedStatus::CollapsedToFixedPoint);
  EXPECT_TRUE(det.cycles.empty());
}

TEST(Detector, ThreadCountDoesNotChangeResults) {
  const auto lls = *build_model("kaiser").reference_lls;
  const std::vector<double> seeds{1.0, 3.3, 4.4, 6.0};
  DetectSettings one;
  one.threads = 1;
  const auto a = detect_limit_cycles(section_system(lls), seeds, one);
  const auto b = detect_limit_cycles(section_system(lls), seeds, fast_settings());
  ASSERT_EQ(a.cycles.size(), b.cycles.size());
  for (std::size_t i = 0; i < a.cycles.size(); ++i) {
    EXPECT_EQ(a.cycles[i].amplitude, b.cycles[i].amplitude);
  }
  ASSERT_EQ(a.outcomes.size(), b.outcomes.size());
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
    EXPECT_EQ(a.outcomes[i].crossings, b.outcomes[i].crossings);
  }
}

TEST(Detector, RejectsNonPositiveSeeds) {
  const auto lls = *build_model("van_der_pol").reference_lls;
  EXPECT_THROW(detect_limit_cycles(section_system(lls), {0.0}), InputError);
}

TEST(Detector, RecordsSamplesOnRequest) {
  const auto lls = *build_model("van_der_pol").reference_lls;
  const auto det = detect_limit_cycles(section_system(lls), {1.0}, fast_settings(), true);
  for (const auto& o : det.outcomes) {
    ASSERT_FALSE(o.samples.empty());
    EXPECT_GT(o.samples.back()[0], o.samples.front()[0]);
  }
}

TEST(Comparison, MatchesPredictedAndDetected) {
  const auto lls = *build_model("van_der_pol").reference_lls;
  const auto o = analyze_oscillator(lls);
  const auto det = detect_limit_cycles(section_system(lls), default_seeds(o.report), fast_settings());
  const auto cmp = compare_with_kb(o.report, det.cycles, to_double(o.oscillator.eps));
  EXPECT_TRUE(cmp.all_agree);
  ASSERT_EQ(cmp.matches.size(), 1u);
  EXPECT_LT(cmp.matches[0].rel_error, 0.02);
  EXPECT_DOUBLE_EQ(cmp.tolerance, 0.5);
}

TEST(Comparison, ReportsUnmatchedCycles) {
  const auto o = analyze_oscillator(*build_model("rychkov").reference_lls);
  const auto cmp = compare_with_kb(o.report, {}, to_double(o.oscillator.eps));
  EXPECT_FALSE(cmp.all_agree);
  EXPECT_EQ(cmp.unmatched_predicted.size(), 2u);
}
