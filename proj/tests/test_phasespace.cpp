#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "wqpt/coherent.hpp"
#include "wqpt/eigensolve.hpp"
#include "wqpt/models.hpp"
#include "wqpt/phasespace.hpp"
#include "wqpt/quadrature_rules.hpp"

using namespace wqpt;
using Catch::Approx;

TEST_CASE("plane grid: node count, positive weights") {
  const auto g = plane_grid(7, 13, 1.0);
  CHECK(g.total_nodes() == 7 * 13);
  for (long i = 0; i < g.total_nodes(); ++i) CHECK(g.weight(i) > 0.0);
}

TEST_CASE("sphere grid: total measure equals 2j+1") {
  for (int two_j : {1, 9, 40}) {
    const auto g = sphere_grid(two_j, 12, 20);
    CHECK(g.sum_weights() == Approx(two_j + 1.0).epsilon(1e-12));
  }
}

TEST_CASE("cp2 grid: total measure equals (N+1)(N+2)/2, both variants") {
  for (const bool lsym : {false, true}) {
    for (int N : {2, 7}) {
      const auto g = cp2_grid(N, N + 2, 2 * N + 3, lsym);
      CHECK(g.sum_weights() == Approx((N + 1.0) * (N + 2.0) / 2.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("plane resolution of identity (cutoff 10)") {
  const int cutoff = 10;
  const auto g = plane_grid(11, 21, 1.0);
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
  for (long i = 0; i < g.total_nodes(); ++i) {
    const auto pt = std::get<PlanePoint>(g.point(i));
    const auto f = glauber_amplitudes(pt.alpha, cutoff);
    S += g.weight(i) * (f.values * f.values.adjoint());
  }
  for (int a = 0; a <= cutoff; ++a)
    for (int b = 0; b <= cutoff; ++b)
      CHECK(std::abs(S(a, b) - (a == b ? 1.0 : 0.0)) < 1e-12);
}

TEST_CASE("sphere resolution of identity (j = 10)") {
  const int two_j = 20;
  const auto g = sphere_grid(two_j, two_j + 1, 2 * two_j + 2);
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(two_j + 1, two_j + 1);
  for (long i = 0; i < g.total_nodes(); ++i) {
    const auto pt = std::get<SpherePoint>(g.point(i));
    const auto f = su2_amplitudes(pt.theta, pt.phi, two_j);
    S += g.weight(i) * (f.values * f.values.adjoint());
  }
  for (int a = 0; a <= two_j; ++a)
    for (int b = 0; b <= two_j; ++b)
      CHECK(std::abs(S(a, b) - (a == b ? 1.0 : 0.0)) < 1e-12);
}

TEST_CASE("cp2 resolution of identity (N = 4, full grid)") {
  const int N = 4;
  const int dim = (N + 1) * (N + 2) / 2;
  const auto g = cp2_grid(N, N + 1, 2 * N + 1, false);
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(dim, dim);
  for (long i = 0; i < g.total_nodes(); ++i) {
    const auto pt = std::get<CP2Point>(g.point(i));
    const auto f = u3_amplitudes(pt.zeta1, pt.zeta2, N);
    S += g.weight(i) * (f.values * f.values.adjoint());
  }
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      CHECK(std::abs(S(a, b) - (a == b ? 1.0 : 0.0)) < 1e-10);
}

TEST_CASE("husimi: self-overlap is one at the matching node, Q in [0,1]") {
  const int two_j = 14;
  const auto grid = sphere_grid(two_j, 9, 16);
  const long pick = 5 * 16 + 3;
  const auto pt = std::get<SpherePoint>(grid.point(pick));
  const auto cs = su2_amplitudes(pt.theta, pt.phi, two_j);
  const auto field = husimi(cs.values, SpinBasis{two_j}, grid);
  CHECK(field.q_values[pick] == Approx(1.0).epsilon(1e-12));
  for (long i = 0; i < grid.total_nodes(); ++i) {
    CHECK(field.q_values[i] >= 0.0);
    CHECK(field.q_values[i] <= 1.0);
  }

  const auto H = build_lmg({0.5, -2.0, 0.7, two_j});
  const auto gs = ground_state(H, 1e-10);
  const auto f2 = husimi(gs, grid);
  for (long i = 0; i < grid.total_nodes(); ++i) {
    CHECK(f2.q_values[i] >= 0.0);
    CHECK(f2.q_values[i] <= 1.0);
  }
}

TEST_CASE("wehrl entropy of a Glauber coherent state is 1") {
  for (double a : {0.0, 0.9, 2.6}) {
    const int cutoff = a == 0.0 ? 0 : 56;
    const auto cs = glauber_amplitudes(a, cutoff);
    RefineOptions opt;
    opt.w_tol = 1e-9;
    opt.norm_tol = 1e-9;
    const auto res = refine_until(cs.values, Fock1DBasis{cutoff}, opt);
    CHECK(res.W == Approx(1.0).margin(1e-8));
  }
}

TEST_CASE("wehrl entropy of Fock |1> is 1 + Euler gamma") {
  // closed-form radial integral: -int_0^inf s e^{-s}(ln s - s) ds
  //   = -Gamma'(2) + Gamma(3) = -(1 - gamma) + 2 = 1 + gamma,
  // with Euler's gamma obtained independently from the harmonic series plus
  // Euler-Maclaurin tail correction
  const long M = 1000000;
  long double gamma_est = 0.0L;
  for (long k = M; k >= 1; --k) gamma_est += 1.0L / (long double)k;
  gamma_est += -std::log((long double)M) - 0.5L / M + 1.0L / (12.0L * (long double)M * M);
  const double oracle = double(1.0L + gamma_est);
  CHECK(oracle == Approx(1.0 + 0.57721566490153286).margin(1e-12));

  // the Husimi zero at the coordinate origin limits the rule to O(h^2) here,
  // so the doubling ladder is a few steps deep
  Eigen::VectorXcd fock1 = Eigen::VectorXcd::Zero(4);
  fock1[1] = 1.0;
  RefineOptions opt;
  opt.w_tol = 1e-7;
  opt.norm_tol = 1e-8;
  const auto res = refine_until(fock1, Fock1DBasis{3}, opt);
  CHECK(res.W == Approx(oracle).margin(1e-6));
  CHECK(res.ladder.size() >= 3);
}

TEST_CASE("wehrl entropy of spin coherent states matches the Lieb value") {
  for (int two_j : {10, 19}) {
    const auto cs = su2_amplitudes(1.1, 2.3, two_j);
    RefineOptions opt;
    opt.w_tol = 1e-9;
    opt.norm_tol = 1e-9;
    const auto res = refine_until(cs.values, SpinBasis{two_j}, opt);
    CHECK(res.W == Approx(lieb_sphere(two_j)).margin(1e-8));
  }
}

TEST_CASE("wehrl entropy of a spin cat is Lieb + ln 2") {
  const int two_j = 40;  // j = 20
  const auto a = su2_amplitudes(std::numbers::pi / 2, 0.0, two_j);
  const auto b = su2_amplitudes(std::numbers::pi / 2, std::numbers::pi, two_j);
  Eigen::VectorXcd cat = (a.values + b.values) / std::sqrt(2.0);  // exactly orthogonal branch
  RefineOptions opt;
  const auto res = refine_until(cat, SpinBasis{two_j}, opt);
  CHECK(res.W == Approx(lieb_sphere(two_j) + std::numbers::ln2).margin(0.02));
}

TEST_CASE("wehrl entropy of a U(3) coherent state matches the Lieb value") {
  const int N = 8;
  const auto cs = u3_amplitudes(Complex(0.45, 0.2), Complex(-0.3, 0.6), N);
  RefineOptions opt;
  opt.w_tol = 1e-7;
  opt.norm_tol = 1e-7;
  const auto res = refine_until(cs.values, U3SymBasis{N}, opt);
  CHECK(res.W == Approx(lieb_cp2(N)).margin(1e-6));
}

TEST_CASE("dicke product coherent state: additive Lieb entropies") {
  const int two_j = 8;
  const auto a = glauber_amplitudes(Complex(0.7, -0.4), 24);
  const auto b = su2_amplitudes(0.9, 1.7, two_j);
  const auto p = product_amplitudes(a, b);
  RefineOptions opt;
  opt.w_tol = 1e-8;
  opt.norm_tol = 1e-7;
  const auto res = refine_until(p.values, DickeProductBasis{24, two_j}, opt);
  CHECK(res.W == Approx(1.0 + lieb_sphere(two_j)).margin(1e-6));
}

TEST_CASE("l-symmetric reduction agrees with the full 4D grid (N = 4)") {
  const auto H = build_2dvm({0.6, 4, 0});
  const auto gs = ground_state(H, 1e-10);
  const Eigen::VectorXcd c = gs.coefficients.cast<Complex>();
  const auto reduced = wehrl_streaming(c, U3BlockBasis{4, 0}, cp2_grid(4, 10, 21, true));
  const auto full = wehrl_streaming(c, U3BlockBasis{4, 0}, cp2_grid(4, 10, 21, false));
  CHECK(reduced.W == Approx(full.W).margin(1e-9));
  CHECK(reduced.norm_deficit < 1e-10);
  CHECK(full.norm_deficit < 1e-10);
}

TEST_CASE("streaming and materialized evaluations agree bitwise") {
  {
    const int two_j = 10;
    const auto H = build_lmg({0.5, -1.6, 0.3, two_j});
    const auto gs = ground_state(H, 1e-10);
    const auto grid = sphere_grid(two_j, 13, 25);
    const auto field = husimi(gs, grid);
    const double w_field = wehrl_entropy(field, grid);
    const auto stream = wehrl_streaming(gs.coefficients.cast<Complex>(), gs.basis, grid);
    CHECK(w_field == stream.W);
    CHECK(field.norm_deficit == stream.norm_deficit);
  }
  {
    const DickeParams p{1.0, 1.0, 0.35, 6};
    const auto H = build_dicke(p, 10);
    const auto gs = ground_state(H, 1e-10);
    const auto grid =
        product_grid(plane_grid(12, 19, 1.0), sphere_grid(6, 8, 15));
    const auto field = husimi(gs, grid);
    const double w_field = wehrl_entropy(field, grid);
    const auto stream = wehrl_streaming(gs.coefficients.cast<Complex>(), gs.basis, grid);
    CHECK(w_field == stream.W);
    CHECK(field.norm_deficit == stream.norm_deficit);
  }
}

TEST_CASE("cusp entropy symmetric under v -> -v on the u = -1 line") {
  RefineOptions opt;
  opt.w_tol = 1e-8;
  const CuspParams plus{-1.0, 0.07, 0.1};
  const CuspParams minus{-1.0, -0.07, 0.1};
  const double om = cusp_default_basis_freq(plus);
  const auto wp = refine_until(ground_state(build_cusp(plus, 90, om), 1e-10), opt);
  const auto wm = refine_until(ground_state(build_cusp(minus, 90, om), 1e-10), opt);
  CHECK(std::abs(wp.W - wm.W) <= 1e-6);
}

TEST_CASE("rotational invariance: LMG entropy symmetric under gamma swap") {
  const int two_j = 16;
  RefineOptions opt;
  opt.w_tol = 1e-9;
  const auto Ha = build_lmg({0.5, -2.2, 0.5, two_j});
  const auto Hb = build_lmg({0.5, 0.5, -2.2, two_j});
  const auto wa = refine_until(ground_state(Ha, 1e-10), opt);
  const auto wb = refine_until(ground_state(Hb, 1e-10), opt);
  CHECK(wa.W == Approx(wb.W).margin(1e-8));
}

TEST_CASE("Lieb lower bounds hold for computed ground states") {
  RefineOptions opt;
  const double eps = 10.0 * opt.w_tol;
  {
    const auto gs = ground_state(build_lmg({0.5, -1.1, 0.2, 12}), 1e-10);
    CHECK(refine_until(gs, opt).W >= lieb_sphere(12) - eps);
  }
  {
    const auto gs = ground_state(build_ibm_lmg({0.75, 0.4, 18}), 1e-10);
    CHECK(refine_until(gs, opt).W >= lieb_sphere(18) - eps);
  }
  {
    const auto gs = ground_state(build_2dvm({0.35, 8, 0}), 1e-10);
    CHECK(refine_until(gs, opt).W >= lieb_cp2(8) - eps);
  }
}

TEST_CASE("refine_until: immediate convergence and error paths") {
  Eigen::VectorXcd ground = Eigen::VectorXcd::Zero(1);
  ground[0] = 1.0;  // cutoff-0 state |0> is the alpha=0 coherent state
  RefineOptions opt;
  const auto res = refine_until(ground, Fock1DBasis{0}, opt);
  CHECK(res.W == Approx(1.0).margin(1e-9));
  CHECK(res.ladder.size() == 2);

  RefineOptions tiny;
  tiny.w_tol = 0.0;
  tiny.max_nodes = 1;
  CHECK_THROWS_AS(refine_until(ground, Fock1DBasis{0}, tiny), ConvergenceError);
}

TEST_CASE("husimi rejects mismatched geometry") {
  const auto gs = ground_state(build_lmg({0.5, -1.0, 0.0, 8}), 1e-10);
  CHECK_THROWS_AS(husimi(gs, plane_grid(8, 16, 1.0)), std::invalid_argument);
}

TEST_CASE("norm deficits are small for converged model ground states") {
  RefineOptions opt;
  {
    const auto gs = ground_state(build_lmg({0.5, -2.0, 0.1, 20}), 1e-10);
    CHECK(refine_until(gs, opt).norm_deficit <= 1e-6);
  }
  {
    const auto gs = ground_state(build_2dvm({0.45, 10, 0}), 1e-10);
    CHECK(refine_until(gs, opt).norm_deficit <= 1e-6);
  }
}
