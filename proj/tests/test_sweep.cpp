#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "wqpt/sweep.hpp"

using namespace wqpt;
using Catch::Approx;

namespace {

Curve logistic_step(double center, double height, double base, int n, double lo, double hi,
                    double sharpness) {
  Curve c;
  c.size = 1.0;
  for (double x : linspace(lo, hi, n)) {
    c.control.push_back(x);
    c.wehrl.push_back(base + height / (1.0 + std::exp(-sharpness * (x - center))));
  }
  return c;
}

Curve gaussian_bump(double center, double height, double base, int n, double lo, double hi,
                    double width) {
  Curve c;
  c.size = 1.0;
  for (double x : linspace(lo, hi, n)) {
    c.control.push_back(x);
    const double d = (x - center) / width;
    c.wehrl.push_back(base + height * std::exp(-0.5 * d * d));
  }
  return c;
}

}  // namespace

TEST_CASE("classifier: synthetic logistic step of height ln 2 is second order") {
  const double c0 = 0.37;
  const auto curve = logistic_step(c0, std::numbers::ln2, 1.0, 41, 0.0, 1.0, 40.0);
  const auto rep = classify_curves({curve});
  CHECK(rep.order == "second");
  CHECK(std::abs(rep.critical_estimate - c0) <= 0.025 + 1e-12);  // one grid step
  CHECK(rep.height == Approx(std::numbers::ln2).margin(0.01));
}

TEST_CASE("classifier: synthetic Gaussian bump of height ln 2 is first order") {
  const double c0 = -0.2;
  const auto curve = gaussian_bump(c0, std::numbers::ln2, 1.3, 41, -1.0, 1.0, 0.05);
  const auto rep = classify_curves({curve});
  CHECK(rep.order == "first");
  CHECK(rep.critical_estimate == Approx(c0).margin(0.05 + 1e-12));
  CHECK(rep.height == Approx(std::numbers::ln2).margin(0.01));
  CHECK(rep.transition_width > 0.0);
}

TEST_CASE("classifier: flat curve is ambiguous") {
  Curve flat;
  flat.size = 1.0;
  for (double x : linspace(0.0, 1.0, 21)) {
    flat.control.push_back(x);
    flat.wehrl.push_back(1.0);
  }
  const auto rep = classify_curves({flat});
  CHECK(rep.order == "ambiguous");
}

TEST_CASE("classifier: affine control maps leave the order invariant") {
  const auto curve = logistic_step(0.3, std::numbers::ln2, 1.0, 33, 0.0, 1.0, 30.0);
  const auto base = classify_curves({curve});
  const double a = 3.7, b = -2.1;
  Curve mapped = curve;
  for (auto& x : mapped.control) x = a * x + b;
  const auto rep = classify_curves({mapped});
  CHECK(rep.order == base.order);
  CHECK(rep.critical_estimate == Approx(a * base.critical_estimate + b).margin(1e-9));
  CHECK(rep.transition_width == Approx(a * base.transition_width).margin(1e-9));
}

TEST_CASE("classifier: reversing the sweep direction changes nothing") {
  auto curve = gaussian_bump(0.1, 1.0, 0.9, 27, -1.0, 1.0, 0.08);
  const auto fwd = classify_curves({curve});
  std::reverse(curve.control.begin(), curve.control.end());
  std::reverse(curve.wehrl.begin(), curve.wehrl.end());
  const auto rev = classify_curves({curve});
  CHECK(rev.order == fwd.order);
  CHECK(rev.critical_estimate == fwd.critical_estimate);
  CHECK(rev.plateau_left == fwd.plateau_left);
  CHECK(rev.plateau_right == fwd.plateau_right);
}

TEST_CASE("classifier rejects undersampled curves") {
  Curve tiny;
  tiny.size = 1.0;
  for (double x : linspace(0.0, 1.0, 7)) {
    tiny.control.push_back(x);
    tiny.wehrl.push_back(x);
  }
  CHECK_THROWS_AS(classify_curves({tiny}), std::invalid_argument);
}

TEST_CASE("sharpening: decreasing widths, ties, mismatches") {
  SizeMetrics a;
  a.size = 10;
  a.order = "second";
  a.width = 0.3;
  SizeMetrics b = a;
  b.size = 20;
  b.width = 0.1;
  const auto good = sharpening(std::vector<SizeMetrics>{a, b});
  CHECK(good.sharpens);

  SizeMetrics c = b;
  c.width = a.width;  // identical widths do not sharpen
  const auto tie = sharpening(std::vector<SizeMetrics>{a, c});
  CHECK_FALSE(tie.sharpens);

  SizeMetrics d = b;
  d.order = "first";
  const auto mixed = sharpening(std::vector<SizeMetrics>{a, d});
  CHECK(mixed.mismatched_orders);
  CHECK_FALSE(mixed.sharpens);

  // cusp ordering: size is K, effective size 1/K
  SizeMetrics k1;
  k1.size = 0.1;
  k1.order = "first";
  k1.width = 0.02;
  SizeMetrics k2 = k1;
  k2.size = 0.01;
  k2.width = 0.01;
  const auto cusp = sharpening(std::vector<SizeMetrics>{k1, k2}, true);
  CHECK(cusp.sharpens);  // width at K=0.01 below width at K=0.1
}

TEST_CASE("analytic criticals for the lmg trajectories") {
  SweepSpec spec;
  spec.model = "lmg";
  spec.trajectory = {"gamma_x", -3.0, 1.0, 41, LinkedLine{"gamma_y", -1.0, 2.0}};
  spec.sizes = {20};
  auto crits = analytic_criticals(spec);
  REQUIRE(crits.size() >= 1);
  bool found_second = false;
  for (const auto& c : crits)
    if (c.order == "second" && c.value == Approx(-1.0)) found_second = true;
  CHECK(found_second);

  spec.trajectory.line = LinkedLine{"gamma_y", -1.0, -4.0};
  spec.trajectory.start = -3.0;
  spec.trajectory.stop = -1.0;
  crits = analytic_criticals(spec);
  bool found_first = false;
  for (const auto& c : crits)
    if (c.order == "first" && c.value == Approx(-2.0)) found_first = true;
  CHECK(found_first);
}

TEST_CASE("validate_spec warns when no critical point is inside") {
  SweepSpec spec;
  spec.model = "vibron2d";
  spec.trajectory = {"xi", 0.5, 0.9, 11, std::nullopt};
  spec.sizes = {8};
  std::vector<std::string> warnings;
  validate_spec(spec, &warnings);
  REQUIRE(warnings.size() == 1);

  spec.trajectory.start = 0.05;
  warnings.clear();
  validate_spec(spec, &warnings);
  CHECK(warnings.empty());
}

TEST_CASE("run_sweep: row count, completeness, determinism across worker counts") {
  SweepSpec spec;
  spec.model = "lmg";
  spec.trajectory = {"gamma_x", -2.0, 0.0, 9, LinkedLine{"gamma_y", -1.0, 2.0}};
  spec.sizes = {6, 10};
  spec.quad.w_tol = 1e-7;
  spec.workers = 1;
  const auto serial = run_sweep(spec);
  CHECK_FALSE(serial.partial);
  REQUIRE(serial.rows.size() == 18);  // steps x sizes
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(std::isfinite(serial.rows[i].wehrl));
    CHECK(serial.rows[i].wehrl >= lieb_sphere(int(serial.rows[i].size)) - 1e-5);
    REQUIRE(serial.rows[i].gap.has_value());
  }

  spec.workers = 3;
  const auto parallel = run_sweep(spec);
  REQUIRE(parallel.rows.size() == serial.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(parallel.rows[i].size == serial.rows[i].size);
    CHECK(parallel.rows[i].control == serial.rows[i].control);
    CHECK(parallel.rows[i].energy0 == serial.rows[i].energy0);
    CHECK(parallel.rows[i].wehrl == serial.rows[i].wehrl);
    CHECK(parallel.rows[i].norm_deficit == serial.rows[i].norm_deficit);
    CHECK(parallel.rows[i].nodes_used == serial.rows[i].nodes_used);
    CHECK(*parallel.rows[i].gap == *serial.rows[i].gap);
  }

  const auto rep = classify_order(serial);
  CHECK(rep.per_size.size() == 2);
}

TEST_CASE("run_sweep: convergence failure flags a partial result") {
  SweepSpec spec;
  spec.model = "lmg";
  spec.trajectory = {"gamma_x", -2.0, 0.0, 8, LinkedLine{"gamma_y", -1.0, 2.0}};
  spec.sizes = {8};
  spec.quad.max_nodes = 1;  // grid refinement cannot even seed
  const auto res = run_sweep(spec);
  CHECK(res.partial);
  CHECK(res.rows.empty());
  CHECK(res.failure.find("gamma_x") != std::string::npos);
}

TEST_CASE("resolve_params applies line constraints and sizes") {
  SweepSpec spec;
  spec.model = "lmg";
  spec.trajectory = {"gamma_x", -3.0, 1.0, 41, LinkedLine{"gamma_y", -1.0, 2.0}};
  spec.sizes = {20};
  const auto params = resolve_params(spec, 20, -0.5);
  const auto& p = std::get<LmgParams>(params);
  CHECK(p.gamma_x == -0.5);
  CHECK(p.gamma_y == Approx(2.5));
  CHECK(p.two_j == 20);

  SweepSpec cusp;
  cusp.model = "cusp";
  cusp.fixed["u"] = -1.0;
  cusp.trajectory = {"v", -0.2, 0.2, 41, std::nullopt};
  cusp.sizes = {0.1};
  const auto cp = std::get<CuspParams>(resolve_params(cusp, 0.1, 0.05));
  CHECK(cp.u == -1.0);
  CHECK(cp.v == 0.05);
  CHECK(cp.K == 0.1);
}
