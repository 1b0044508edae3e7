#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <variant>

#include "wqpt/numerics.hpp"

namespace wqpt {

using Complex = std::complex<double>;

// Phase-space points. Sphere points are stored as angles, never as the
// stereographic zeta = tan(theta/2) e^{-i phi}, so theta = pi stays
// representable.
struct PlanePoint {
  Complex alpha;
};
struct SpherePoint {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2pi)
};
struct CP2Point {
  Complex zeta1;
  Complex zeta2;
};
struct ProductPoint {
  PlanePoint plane;
  SpherePoint sphere;
};
using PhasePoint = std::variant<PlanePoint, SpherePoint, CP2Point, ProductPoint>;

inline Complex sphere_zeta(const SpherePoint& p) {
  return std::tan(0.5 * p.theta) * std::exp(Complex(0.0, -p.phi));
}

struct AmplitudeVector {
  Eigen::VectorXcd values;
  PhasePoint point;
  bool log_stable = true;
};

// <n|alpha> = e^{-|alpha|^2/2} alpha^n / sqrt(n!) for n = 0..cutoff, evaluated
// as exp(-|a|^2/2 + n ln|a| - lgamma(n+1)/2) with the phase carried separately.
inline AmplitudeVector glauber_amplitudes(Complex alpha, int cutoff) {
  if (cutoff < 0) throw std::invalid_argument("glauber_amplitudes: cutoff < 0");
  AmplitudeVector out;
  out.point = PlanePoint{alpha};
  out.values.setZero(cutoff + 1);
  const double r = std::abs(alpha);
  if (r == 0.0) {
    out.values[0] = 1.0;
    return out;
  }
  const double lr = std::log(r);
  const double arg = std::arg(alpha);
  for (int n = 0; n <= cutoff; ++n) {
    const double mod = std::exp(-0.5 * r * r + n * lr - 0.5 * log_factorial(n));
    out.values[n] = std::polar(mod, n * arg);
  }
  return out;
}

// <j,m|theta,phi> = binom(2j, j+m)^{1/2} cos(theta/2)^{j-m} sin(theta/2)^{j+m}
//                   e^{-i(j+m)phi},
// index i = j+m, i = 0..2j. This is the normalized sum form of the SU(2)
// coherent state with zeta = tan(theta/2) e^{-i phi}; zeta = 0 maps to |j,-j>.
inline AmplitudeVector su2_amplitudes(double theta, double phi, int two_j) {
  if (two_j < 1) throw std::invalid_argument("su2_amplitudes: 2j < 1");
  AmplitudeVector out;
  out.point = SpherePoint{theta, phi};
  out.values.setZero(two_j + 1);
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  if (s <= 0.0) {
    out.values[0] = 1.0;  // theta = 0 -> all mass on m = -j
    return out;
  }
  if (c <= 0.0) {
    out.values[two_j] = std::polar(1.0, -double(two_j) * phi);  // theta = pi
    return out;
  }
  const double lc = std::log(c);
  const double ls = std::log(s);
  for (int i = 0; i <= two_j; ++i) {
    const double mod =
        std::exp(0.5 * log_binomial(two_j, i) + double(two_j - i) * lc + double(i) * ls);
    out.values[i] = std::polar(mod, -double(i) * phi);
  }
  return out;
}

// U(3) symmetric-representation coherent state amplitudes
//   <N,n,l=n-2m | zeta1, zeta2>
//     = [N!/((N-n)!(n-m)!m!)]^{1/2} zeta1^{n-m} zeta2^m
//       / (1+|zeta1|^2+|zeta2|^2)^{N/2},
// enumerated n = 0..N, m = 0..n (row-major in n, then m). With l_filter set,
// only the fixed-l entries are returned, ordered by ascending n = |l|, |l|+2,
// ..., matching a U3Block basis.
inline AmplitudeVector u3_amplitudes(Complex zeta1, Complex zeta2, int N,
                                     std::optional<int> l_filter = std::nullopt) {
  if (N < 1) throw std::invalid_argument("u3_amplitudes: N < 1");
  AmplitudeVector out;
  out.point = CP2Point{zeta1, zeta2};
  const double r1 = std::abs(zeta1);
  const double r2 = std::abs(zeta2);
  const double a1 = std::arg(zeta1);
  const double a2 = std::arg(zeta2);
  const double lnorm = 0.5 * double(N) * std::log1p(r1 * r1 + r2 * r2);
  const double l1 = r1 > 0.0 ? std::log(r1) : 0.0;
  const double l2 = r2 > 0.0 ? std::log(r2) : 0.0;

  auto value = [&](int n, int m) -> Complex {
    const int k1 = n - m;  // power of zeta1
    const int k2 = m;      // power of zeta2
    if ((k1 > 0 && r1 == 0.0) || (k2 > 0 && r2 == 0.0)) return Complex(0.0, 0.0);
    const double lmult = 0.5 * (log_factorial(N) - log_factorial(N - n) -
                                log_factorial(n - m) - log_factorial(m));
    const double mod = std::exp(lmult + k1 * l1 + k2 * l2 - lnorm);
    return std::polar(mod, k1 * a1 + k2 * a2);
  };

  if (l_filter.has_value()) {
    const int l = *l_filter;
    if (std::abs(l) > N) throw std::invalid_argument("u3_amplitudes: |l| > N");
    std::vector<Complex> vals;
    for (int n = std::abs(l); n <= N; n += 2) {
      const int m = (n - l) / 2;
      vals.push_back(value(n, m));
    }
    out.values = Eigen::Map<const Eigen::VectorXcd>(vals.data(), Eigen::Index(vals.size()));
    return out;
  }

  out.values.setZero((N + 1) * (N + 2) / 2);
  Eigen::Index idx = 0;
  for (int n = 0; n <= N; ++n)
    for (int m = 0; m <= n; ++m) out.values[idx++] = value(n, m);
  return out;
}

// Product state |alpha> (x) |theta,phi> on the Dicke basis ordering
// idx = n * (2j+1) + (j+m).
inline AmplitudeVector product_amplitudes(const AmplitudeVector& a, const AmplitudeVector& b) {
  const auto* pa = std::get_if<PlanePoint>(&a.point);
  const auto* pb = std::get_if<SpherePoint>(&b.point);
  if (pa == nullptr || pb == nullptr)
    throw std::invalid_argument("product_amplitudes: expects Plane x Sphere factors");
  AmplitudeVector out;
  out.point = ProductPoint{*pa, *pb};
  const Eigen::Index na = a.values.size();
  const Eigen::Index nb = b.values.size();
  out.values.resize(na * nb);
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index k = 0; k < nb; ++k) out.values[i * nb + k] = a.values[i] * b.values[k];
  return out;
}

}  // namespace wqpt
