#include <cmath>

#include <gtest/gtest.h>

#include "cyclekit/cyclekit.hpp"

using namespace cyclekit;

namespace {

CycleReport report_for(const std::string& model, const Params& p = {}) {
  const ModelInstance m = build_model(model, p);
  return analyze_oscillator(m.reference_lls ? *m.reference_lls : reduce(m.kinetic, m.fixed_point).second).report;
}

AveragedDynamics averaged_from_radial(UniPoly<Rational> radial) {
  AveragedDynamics avg;
  avg.radial_reduced = std::move(radial);
  avg.eps = make_rational(1, 100);
  avg.omega_sq = Rational(1);
  avg.omega = 1.0;
  avg.N = 2;
  avg.M = 1;
  return avg;
}

}  // namespace

TEST(ParityBound, ClosedFormCases) {
  EXPECT_EQ(parity_bound(2, 2).max_cycles, 1);
  EXPECT_EQ(parity_bound(2, 1).max_cycles, 1);
  EXPECT_EQ(parity_bound(4, 1).max_cycles, 2);
  EXPECT_EQ(parity_bound(6, 1).max_cycles, 3);
  EXPECT_EQ(parity_bound(1, 3).max_cycles, 1);
  EXPECT_EQ(parity_bound(1, 2).max_cycles, 0);
  EXPECT_EQ(parity_bound(3, 3).parity_class, ParityClass::OddOdd);
  EXPECT_EQ(parity_bound(3, 4).parity_class, ParityClass::OddEven);
  EXPECT_THROW(parity_bound(0, 1), InputError);
}

TEST(ParityBound, LienardAndRayleighSpecialCases) {
  for (int k = 1; k <= 10; ++k) {
    // Lienard, M = 1: floor(N / 2). Rayleigh, N = 1: floor((M - 1) / 2).
    EXPECT_EQ(parity_bound(k, 1).max_cycles, k / 2);
    EXPECT_EQ(parity_bound(1, k).max_cycles, (k - 1) / 2);
  }
}

TEST(ParityBound, AgreesWithConstructiveDegree) {
  for (int N = 1; N <= 10; ++N) {
    for (int M = 1; M <= 10; ++M) {
      const DegreeBound d = generic_degree_bound(N, M);
      EXPECT_EQ(d.oplus, N + M);
      EXPECT_EQ(d.R, 2 * parity_bound(N, M).max_cycles) << N << "," << M;
    }
  }
}

TEST(DegreeTable, TextAndCsvRendering) {
  const auto grid = degree_bound_table(1, 2);
  EXPECT_EQ(degree_table_csv(grid), "N,M,oplus,R\n1,1,2,0\n1,2,3,0\n");
  EXPECT_NE(degree_table_text(grid).find("2,0 3,0"), std::string::npos);
  EXPECT_THROW(degree_bound_table(0, 3), InputError);
}

TEST(RadialRoots, IdenticallyZeroThrows) {
  EXPECT_THROW(radial_roots(averaged_from_radial(UniPoly<Rational>())), IdenticallyZero);
}

TEST(RadialRoots, DoubleRootIsDegenerate) {
  // (rho - 4)^2: semistable cycle at r = 2.
  const UniPoly<Rational> f{Rational(-4), Rational(1)};
  const auto avg = averaged_from_radial(f * f);
  const auto roots = radial_roots(avg);
  ASSERT_EQ(roots.roots.size(), 1u);
  EXPECT_EQ(roots.roots[0].multiplicity, 2);
  const auto rep = classify_cycles(avg, roots);
  ASSERT_EQ(rep.cycles.size(), 1u);
  EXPECT_EQ(rep.cycles[0].stability, Stability::Degenerate);
}

TEST(RadialRoots, IrrationalRootsArePolished) {
  // rho^2 - 20 rho + 80: rho = 10 +- sqrt(20).
  const auto avg = averaged_from_radial(UniPoly<Rational>{Rational(80), Rational(-20), Rational(1)});
  const auto roots = radial_roots(avg);
  ASSERT_EQ(roots.roots.size(), 2u);
  EXPECT_NEAR(roots.roots[0].rho, 10 - std::sqrt(20.0), 1e-13);
  EXPECT_NEAR(roots.roots[1].rho, 10 + std::sqrt(20.0), 1e-13);
  EXPECT_FALSE(roots.roots[0].rho_exact);
}

TEST(RadialRoots, ComplexAndNegativeRootsAreCounted) {
  // (rho^2 + 1)(rho + 3)(rho - 1)
  const auto avg = averaged_from_radial(UniPoly<Rational>{Rational(1), Rational(0), Rational(1)} *
                                        UniPoly<Rational>{Rational(3), Rational(1)} *
                                        UniPoly<Rational>{Rational(-1), Rational(1)});
  const auto roots = radial_roots(avg);
  EXPECT_EQ(roots.roots.size(), 1u);
  EXPECT_EQ(roots.complex_pairs, 1);
  EXPECT_EQ(roots.nonpositive_real, 1);
}

TEST(CycleReport, VanDerPol) {
  const auto rep = report_for("van_der_pol");
  ASSERT_EQ(rep.cycles.size(), 1u);
  EXPECT_EQ(*rep.cycles[0].rho_exact, Rational(4));
  EXPECT_DOUBLE_EQ(rep.cycles[0].radius, 2.0);
  EXPECT_EQ(rep.cycles[0].stability, Stability::Stable);
  EXPECT_EQ(rep.origin_nature, OriginNature::UnstableFocus);
  EXPECT_TRUE(rep.saturated);
}

TEST(CycleReport, Rychkov) {
  const auto rep = report_for("rychkov");
  ASSERT_EQ(rep.cycles.size(), 2u);
  EXPECT_EQ(*rep.cycles[0].rho_exact, Rational(1));
  EXPECT_EQ(*rep.cycles[1].rho_exact, Rational(4));
  EXPECT_EQ(rep.cycles[0].stability, Stability::Unstable);
  EXPECT_EQ(rep.cycles[1].stability, Stability::Stable);
  EXPECT_EQ(rep.origin_nature, OriginNature::StableFocus);
  EXPECT_FALSE(rep.warnings.empty());
}

TEST(CycleReport, KaiserBirhythmic) {
  const auto rep = report_for("kaiser");
  ASSERT_EQ(rep.cycles.size(), 3u);
  EXPECT_EQ(rep.cycles[0].stability, Stability::Stable);
  EXPECT_EQ(rep.cycles[1].stability, Stability::Unstable);
  EXPECT_EQ(rep.cycles[2].stability, Stability::Stable);
  EXPECT_NEAR(rep.cycles[0].radius, 2.63902, 1e-4);
  EXPECT_NEAR(rep.cycles[1].radius, 3.96164, 1e-4);
  EXPECT_NEAR(rep.cycles[2].radius, 4.83953, 1e-4);
}

TEST(CycleReport, KaiserWithoutSexticTerm) {
  const auto rep = report_for("kaiser", {{"alpha", make_rational(1, 10)}, {"beta", Rational(0)}});
  ASSERT_EQ(rep.cycles.size(), 2u);
  EXPECT_NEAR(rep.cycles[0].radius, std::sqrt(10 - std::sqrt(20.0)), 1e-12);
  EXPECT_NEAR(rep.cycles[1].radius, std::sqrt(10 + std::sqrt(20.0)), 1e-12);
  EXPECT_EQ(rep.cycles[0].stability, Stability::Stable);
  EXPECT_EQ(rep.cycles[1].stability, Stability::Unstable);
}

TEST(CycleReport, GaikoSaturatesItsBound) {
  const auto rep = report_for("gaiko");
  ASSERT_EQ(rep.cycles.size(), 2u);
  EXPECT_DOUBLE_EQ(rep.cycles[0].radius, 1.0);
  EXPECT_DOUBLE_EQ(rep.cycles[1].radius, 2.0);
  EXPECT_EQ(rep.bound.parity_class, ParityClass::OddOdd);
  EXPECT_TRUE(rep.saturated);
}

TEST(CycleReport, StabilitiesAlternate) {
  for (int k = 1; k <= 5; ++k) {
    const auto rep = report_for("blows_lloyd", {{"k", Rational(k)}});
    ASSERT_EQ(static_cast<int>(rep.cycles.size()), k);
    for (int i = 0; i < k; ++i) {
      EXPECT_NEAR(rep.cycles[i].radius, i + 1, 1e-12);
      if (i > 0) {
        EXPECT_NE(rep.cycles[i].stability, rep.cycles[i - 1].stability);
      }
    }
  }
}

TEST(CycleReport, CenterTypeHasNoCycles) {
  const auto rep = report_for("lotka_volterra");
  EXPECT_TRUE(rep.cycles.empty());
  EXPECT_EQ(rep.origin_nature, OriginNature::CenterType);
  EXPECT_FALSE(rep.warnings.empty());
}

TEST(CycleReport, FrequencyCorrectionFromPhase) {
  // A30 = -1 adds a cubic restoring term; Phi(rho) = -(3/8) B30 rho.
  const auto vdp = build_model("van_der_pol");
  BiPoly<Rational> t = vdp.reference_lls->table();
  t.add_term(Rational(-1), 3, 0);
  const auto o = analyze_oscillator(LLSSystem<Rational>(t));
  ASSERT_EQ(o.report.cycles.size(), 1u);
  const double eps = to_double(o.oscillator.eps);
  const double phi = to_double(o.averaged.phase.evaluate(Rational(4)));
  EXPECT_NEAR(o.report.cycles[0].freq_correction, eps * phi, 1e-15);
  EXPECT_GT(o.report.cycles[0].corrected_frequency, 1.0);
}
