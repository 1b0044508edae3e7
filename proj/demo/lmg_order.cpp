// Classify both LMG trajectories from scratch and print the reports.

#include <cstdio>

#include "wqpt/sweep.hpp"

int main() {
  using namespace wqpt;
  for (const double intercept : {2.0, -4.0}) {
    SweepSpec spec;
    spec.model = "lmg";
    spec.trajectory = {"gamma_x", -3.0, intercept > 0 ? 1.0 : -1.0, 21,
                       LinkedLine{"gamma_y", -1.0, intercept}};
    spec.sizes = {20, 40};
    const auto result = run_sweep(spec);
    const auto report = classify_order(result);
    std::printf("line gamma_y = -gamma_x %+g:  order=%s  critical=%.3f  width=%.3f\n",
                intercept, report.order.c_str(), report.critical_estimate,
                report.transition_width);
    for (const auto& m : report.per_size)
      std::printf("  N=%-3g order=%-7s critical=%.3f plateaus %.4f / %.4f\n", m.size,
                  m.order.c_str(), m.critical, m.plateau_left, m.plateau_right);
  }
  return 0;
}
