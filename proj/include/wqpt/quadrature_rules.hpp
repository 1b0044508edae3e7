#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "wqpt/numerics.hpp"

namespace wqpt {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1]. Newton iteration on the three-term
// recurrence, nodes ascending.
inline Rule1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  Rule1D rule;
  rule.nodes.resize(std::size_t(n));
  rule.weights.resize(std::size_t(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(n) + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - double(k) * p2) / double(k + 1);
      }
      pp = double(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const std::size_t lo = std::size_t(i);
    const std::size_t hi = std::size_t(n - 1 - i);
    rule.nodes[hi] = z;
    rule.nodes[lo] = -z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[hi] = w;
    rule.weights[lo] = w;
  }
  if (n % 2 == 1) rule.nodes[std::size_t(n / 2)] = 0.0;
  return rule;
}

// Gauss-Legendre mapped to [0, 1].
inline Rule1D gauss_legendre_01(int n) {
  Rule1D r = gauss_legendre(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[std::size_t(i)] = 0.5 * (r.nodes[std::size_t(i)] + 1.0);
    r.weights[std::size_t(i)] *= 0.5;
  }
  return r;
}

namespace detail {

// Laguerre functions scaled by e^{-s/2}: same recurrence as L_k, started from
// l_0 = e^{-s/2}. Keeps every intermediate bounded out to s of a few thousand,
// which plain L_k cannot do past n ~ 150. Long double accumulation keeps the
// recurrence error below a few ulps even for n of several hundred.
inline void scaled_laguerre(int n, double s, double& ln, double& lnm1) {
  const long double sl = s;
  long double l0 = std::exp(-0.5L * sl);
  long double l1 = (1.0L - sl) * l0;
  if (n == 0) {
    ln = double(l0);
    lnm1 = 0.0;
    return;
  }
  for (int k = 1; k < n; ++k) {
    const long double l2 = ((2.0L * k + 1.0L - sl) * l1 - (long double)k * l0) / (k + 1.0L);
    l0 = l1;
    l1 = l2;
  }
  ln = double(l1);
  lnm1 = double(l0);
}

}  // namespace detail

// n-point Gauss-Laguerre rule for weight e^{-s} on [0, inf), with the weights
// premultiplied by e^{+s_i}:  integral_0^inf f(s) ds ~= sum_i w_i f(s_i)
// whenever f decays at least like e^{-s} times a polynomial. The scaling keeps
// the weights representable for large n (raw Laguerre weights underflow).
inline Rule1D gauss_laguerre_scaled(int n) {
  if (n < 1) throw std::invalid_argument("gauss_laguerre_scaled: n < 1");
  Rule1D rule;
  rule.nodes.resize(std::size_t(n));
  rule.weights.resize(std::size_t(n));
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * double(n));
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * double(n));
    } else {
      const double ai = double(i - 1);
      z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - rule.nodes[std::size_t(i - 2)]);
    }
    double ln = 0.0, lnm1 = 0.0;
    for (int it = 0; it < 200; ++it) {
      detail::scaled_laguerre(n, z, ln, lnm1);
      // l_n' = n (l_n - l_{n-1}) / s - l_n / 2
      const double lp = double(n) * (ln - lnm1) / z - 0.5 * ln;
      const double dz = ln / lp;
      z -= dz;
      if (std::abs(dz) <= 1e-15 * z) break;
    }
    detail::scaled_laguerre(n + 1, z, ln, lnm1);
    // u_i e^{s_i} = s_i / ((n+1)^2 l_{n+1}(s_i)^2)
    rule.nodes[std::size_t(i)] = z;
    rule.weights[std::size_t(i)] = z / (double(n + 1) * double(n + 1) * ln * ln);
  }
  return rule;
}

}  // namespace wqpt
