// Wehrl entropy of spin coherent and cat states against the Lieb values.

#include <cstdio>
#include <numbers>

#include "wqpt/coherent.hpp"
#include "wqpt/phasespace.hpp"

int main() {
  using namespace wqpt;
  std::printf("%4s %14s %14s %14s %14s\n", "2j", "W(CS)", "lieb", "W(cat)", "lieb+ln2");
  for (int two_j : {4, 10, 20, 40}) {
    RefineOptions opt;
    opt.w_tol = 1e-9;
    const auto cs = su2_amplitudes(1.1, 0.4, two_j);
    const auto w_cs = refine_until(cs.values, SpinBasis{two_j}, opt);

    const auto a = su2_amplitudes(std::numbers::pi / 2, 0.0, two_j);
    const auto b = su2_amplitudes(std::numbers::pi / 2, std::numbers::pi, two_j);
    const Eigen::VectorXcd cat = (a.values + b.values) / std::sqrt(2.0);
    const auto w_cat = refine_until(cat, SpinBasis{two_j}, opt);

    std::printf("%4d %14.9f %14.9f %14.9f %14.9f\n", two_j, w_cs.W, lieb_sphere(two_j),
                w_cat.W, lieb_sphere(two_j) + std::numbers::ln2);
  }
  return 0;
}
