// Library walk-through: reduce the Rychkov oscillator, average it, count its
// cycles, and confirm them by integration.

#include <iostream>

#include "cyclekit/cyclekit.hpp"

int main() {
  using namespace cyclekit;
  const ModelInstance m = build_model("rychkov");
  const Analysis a = analyze_kinetic(m.kinetic, m.fixed_point);
  std::cout << "class " << to_string(a.diagnosis.cls) << ", F(0,0) = " << to_string(a.diagnosis.f00)
            << "\n";

  const OscillatorAnalysis o = analyze_oscillator(a.lls);
  std::cout << "eps = " << to_string(o.oscillator.eps) << ", R(rho) = " << o.averaged.radial_reduced.str("rho")
            << "\n";
  for (const auto& c : o.report.cycles) {
    std::cout << "  predicted radius " << c.radius << " " << to_string(c.stability) << "\n";
  }

  DetectSettings st;
  st.threads = 4;
  const DetectionResult det =
      detect_limit_cycles(section_system(*a.kinetic, *a.map, a.lls), default_seeds(o.report), st);
  for (const auto& c : det.cycles) {
    std::cout << "  detected amplitude " << c.amplitude << " " << to_string(c.stability) << "\n";
  }
  const Comparison cmp = compare_with_kb(o.report, det.cycles, to_double(o.oscillator.eps));
  std::cout << (cmp.all_agree ? "agreement" : "disagreement") << "\n";
  return cmp.all_agree ? 0 : 1;
}
