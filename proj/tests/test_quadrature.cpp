#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numeric>
#include <random>

#include "wqpt/numerics.hpp"
#include "wqpt/quadrature_rules.hpp"

using namespace wqpt;

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  const auto r = gauss_legendre(8);
  double total = 0.0, x2 = 0.0, x14 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    total += r.weights[i];
    x2 += r.weights[i] * r.nodes[i] * r.nodes[i];
    x14 += r.weights[i] * std::pow(r.nodes[i], 14);
  }
  CHECK(total == Catch::Approx(2.0).epsilon(1e-14));
  CHECK(x2 == Catch::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(x14 == Catch::Approx(2.0 / 15.0).epsilon(1e-13));  // degree 14 <= 2*8-1
}

TEST_CASE("gauss_legendre nodes are ascending and symmetric") {
  for (int n : {1, 2, 7, 64, 201}) {
    const auto r = gauss_legendre(n);
    REQUIRE(int(r.nodes.size()) == n);
    for (int i = 1; i < n; ++i) CHECK(r.nodes[size_t(i)] > r.nodes[size_t(i - 1)]);
    for (int i = 0; i < n; ++i) {
      CHECK(r.weights[size_t(i)] > 0.0);
      CHECK(r.nodes[size_t(i)] == Catch::Approx(-r.nodes[size_t(n - 1 - i)]).margin(1e-15));
    }
  }
}

TEST_CASE("gauss_legendre_01 moments") {
  const auto r = gauss_legendre_01(6);
  for (int k = 0; k <= 11; ++k) {
    double m = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
      m += r.weights[i] * std::pow(r.nodes[i], k);
    CHECK(m == Catch::Approx(1.0 / (k + 1.0)).epsilon(1e-13));
  }
}

TEST_CASE("gauss_laguerre_scaled reproduces factorial moments") {
  const int n = 12;
  const auto r = gauss_laguerre_scaled(n);
  for (int k = 0; k <= 2 * n - 1; ++k) {
    double m = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
      m += r.weights[i] * std::exp(-r.nodes[i]) * std::pow(r.nodes[i], k);
    CHECK(m == Catch::Approx(std::exp(log_factorial(k))).epsilon(1e-12));
  }
}

TEST_CASE("gauss_laguerre_scaled stays finite at high order") {
  const auto r = gauss_laguerre_scaled(180);
  double total = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    REQUIRE(std::isfinite(r.weights[i]));
    REQUIRE(r.weights[i] > 0.0);
    if (i > 0) REQUIRE(r.nodes[i] > r.nodes[i - 1]);
    total += r.weights[i] * std::exp(-r.nodes[i]);
  }
  CHECK(total == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pairwise and chunked summation agree with high-precision reference") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> xs(100001);
  long double ref = 0.0L;
  for (auto& x : xs) {
    x = dist(rng);
    ref += (long double)x;
  }
  const double p = pairwise_sum(xs);
  ChunkedSum acc;
  for (double x : xs) acc.add(x);
  CHECK(std::abs(p - double(ref)) < 1e-11);
  CHECK(std::abs(acc.total() - double(ref)) < 1e-11);

  // deterministic: same terms, same bits
  ChunkedSum acc2;
  for (double x : xs) acc2.add(x);
  CHECK(acc.total() == acc2.total());
}

TEST_CASE("depressed cubic roots") {
  auto r = solve_depressed_cubic(-1.0, 0.0);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == Catch::Approx(-1.0).margin(1e-12));
  CHECK(r[1] == Catch::Approx(0.0).margin(1e-12));
  CHECK(r[2] == Catch::Approx(1.0).margin(1e-12));

  r = solve_depressed_cubic(-3.0, 2.0);  // (x-1)^2 (x+2)
  REQUIRE(r.size() >= 2);
  CHECK(r.front() == Catch::Approx(-2.0).margin(1e-9));
  CHECK(r.back() == Catch::Approx(1.0).margin(1e-6));

  r = solve_depressed_cubic(1.0, -2.0);  // single real root x = 1
  REQUIRE(r.size() == 1);
  CHECK(r[0] == Catch::Approx(1.0).margin(1e-12));

  for (double u : {-2.0, -0.7, 0.3}) {
    for (double v : {-0.4, 0.0, 0.25}) {
      for (double x : solve_depressed_cubic(u, v))
        CHECK(std::abs(x * x * x + u * x + v) < 1e-10);
    }
  }
}
