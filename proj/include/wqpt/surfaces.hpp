#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "wqpt/models.hpp"
#include "wqpt/numerics.hpp"

namespace wqpt {

// ---------------------------------------------------------------------------
// Classical energy surfaces (coherent-state expectation values) and their
// analytic equilibria / critical points.
// ---------------------------------------------------------------------------

inline double cusp_potential(double x, double u, double v) {
  return 0.25 * x * x * x * x + 0.5 * u * x * x + v * x;
}

// Real stationary points of the cusp potential: roots of x^3 + u x + v = 0,
// ascending.
inline std::vector<double> cusp_stationary(double u, double v) {
  return solve_depressed_cubic(u, v);
}

// Dicke energy surface over |alpha> (x) |theta, phi>:
//   omega |alpha|^2 + j omega0 (|z|^2-1)/(|z|^2+1)
//     + lambda sqrt(2j) 4 Re(alpha) Re(z)/(|z|^2+1),
// with z = tan(theta/2) e^{-i phi}; evaluated in the trig form that stays
// finite at theta = pi.
inline double dicke_surface(std::complex<double> alpha, double theta, double phi,
                            const DickeParams& p) {
  const double j = 0.5 * p.two_j;
  return p.omega * std::norm(alpha) - j * p.omega0 * std::cos(theta) +
         2.0 * p.lambda * std::sqrt(double(p.two_j)) * alpha.real() * std::sin(theta) *
             std::cos(phi);
}

inline double dicke_lambda_c(const DickeParams& p) {
  return 0.5 * std::sqrt(p.omega * p.omega0);
}

struct DickeEquilibrium {
  double alpha_e = 0.0;  // real (the cos(phi) = 1 branch)
  double zeta_e = 0.0;
};

// Superradiant equilibrium: cos(theta*) = lc^2/lambda^2, hence
//   zeta_e = tan(theta*/2) = sqrt((l^2 - lc^2)/(l^2 + lc^2)),
//   alpha_e = -(lambda sqrt(2j)/omega) sin(theta*)
//           = -(lambda sqrt(2j)/omega) sqrt(1 - lc^4/l^4),
// the stationary point of the surface above (and the standard mean-field
// field amplitude). Normal phase: both zero.
inline DickeEquilibrium dicke_equilibrium(const DickeParams& p) {
  const double lc = dicke_lambda_c(p);
  if (p.lambda < lc) return {0.0, 0.0};
  const double l2 = p.lambda * p.lambda, lc2 = lc * lc;
  const double sin_theta = std::sqrt(1.0 - (lc2 * lc2) / (l2 * l2));
  const double alpha = -(p.lambda * std::sqrt(double(p.two_j)) / p.omega) * sin_theta;
  const double zeta = std::sqrt((l2 - lc2) / (l2 + lc2));
  return {alpha, zeta};
}

// LMG surface in the same H/(2 omega j) scaling as the builder.
inline double lmg_surface(double theta, double phi, double gamma_x, double gamma_y) {
  const double st = std::sin(theta);
  const double c = std::cos(phi), s = std::sin(phi);
  return -std::cos(theta) + 0.5 * st * st * (gamma_x * c * c + gamma_y * s * s);
}

// IBM-LMG thermodynamic-limit surface and its coexistence line.
inline double ibm_surface(double beta, double x, double y) {
  const double b2 = beta * beta;
  const double pre = b2 / ((1.0 + b2) * (1.0 + b2));
  return pre * (5.0 * x - 4.0 + 4.0 * beta * y * (x - 1.0) + b2 * (x + y * y * (x - 1.0)));
}

inline double ibm_xc(double y) { return (4.0 + y * y) / (5.0 + y * y); }

// 2DVM surface on the section zeta1 = r/sqrt(2) = -zeta2.
inline double vibron_surface(double r, double xi) {
  const double r2 = r * r;
  const double a = r2 / (1.0 + r2);
  const double b = (1.0 - r2) / (1.0 + r2);
  return (1.0 - xi) * a + xi * b * b;
}

inline double vibron_xi_c() { return 0.2; }

inline double vibron_re(double xi) {
  if (xi <= 0.2) return 0.0;
  return std::sqrt((5.0 * xi - 1.0) / (3.0 * xi + 1.0));
}

// ---------------------------------------------------------------------------
// Numerical minimization oracle: coarse multistart grid plus derivative-free
// compass descent. Deterministic; ties (value difference < 1e-12) are broken
// toward the lexicographically smallest point.
// ---------------------------------------------------------------------------

struct MinimizeResult {
  std::vector<double> point;
  double value = 0.0;
};

namespace detail {

inline bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

inline std::vector<double> compass_descent(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> p,
    const std::vector<double>& lo, const std::vector<double>& hi, double coord_tol) {
  const std::size_t d = p.size();
  std::vector<double> step(d);
  for (std::size_t i = 0; i < d; ++i) step[i] = 0.1 * (hi[i] - lo[i]);
  double fp = f(p);
  double hmax = 1.0;
  while (hmax > coord_tol) {
    bool moved = false;
    for (std::size_t i = 0; i < d; ++i) {
      for (double sgn : {+1.0, -1.0}) {
        std::vector<double> q = p;
        q[i] = std::clamp(q[i] + sgn * step[i], lo[i], hi[i]);
        const double fq = f(q);
        if (fq < fp) {
          p = q;
          fp = fq;
          moved = true;
        }
      }
    }
    if (!moved) {
      hmax = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        step[i] *= 0.5;
        hmax = std::max(hmax, step[i]);
      }
    }
  }
  return p;
}

inline MinimizeResult multistart_minimize(
    const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& lo,
    const std::vector<double>& hi, int starts_per_dim) {
  const std::size_t d = lo.size();
  std::vector<int> counter(d, 0);
  MinimizeResult best;
  bool have = false;
  for (;;) {
    std::vector<double> start(d);
    for (std::size_t i = 0; i < d; ++i) {
      start[i] = (starts_per_dim == 1)
                     ? 0.5 * (lo[i] + hi[i])
                     : lo[i] + (hi[i] - lo[i]) * double(counter[i]) / (starts_per_dim - 1);
    }
    std::vector<double> p = compass_descent(f, start, lo, hi, 1e-10);
    const double fp = f(p);
    if (!have || fp < best.value - 1e-12 ||
        (std::abs(fp - best.value) < 1e-12 && lex_less(p, best.point))) {
      best = {p, fp};
      have = true;
    }
    std::size_t i = 0;
    for (; i < d; ++i) {
      if (++counter[i] < starts_per_dim) break;
      counter[i] = 0;
    }
    if (i == d) break;
  }
  return best;
}

}  // namespace detail

// Analytic critical data bundle for one model at fixed parameters: critical
// control value(s), equilibrium data, and the transition order along the
// conventional trajectory.
struct CriticalInfo {
  std::string model;
  std::optional<double> critical_value;  // lambda_c, xi_c, x_c(y); none for cusp/lmg lines
  std::vector<double> equilibria;        // alpha_e/zeta_e, r_e, beta_e, cusp x-roots
  std::string order;
};

inline CriticalInfo critical_info(const ModelParams& params) {
  CriticalInfo out;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CuspParams>) {
          out.model = "cusp";
          out.critical_value = 0.0;  // v_c = 0 on u < 0 lines, u_c = 0 on v = 0
          out.order = p.u < 0.0 ? "first" : "second";
          out.equilibria = cusp_stationary(p.u, p.v);
        } else if constexpr (std::is_same_v<T, DickeParams>) {
          out.model = "dicke";
          out.critical_value = dicke_lambda_c(p);
          out.order = "second";
          const auto eq = dicke_equilibrium(p);
          out.equilibria = {eq.alpha_e, eq.zeta_e};
        } else if constexpr (std::is_same_v<T, LmgParams>) {
          out.model = "lmg";
          out.order = (p.gamma_x < -1.0 && p.gamma_y < -1.0) ? "first" : "second";
        } else if constexpr (std::is_same_v<T, IbmLmgParams>) {
          out.model = "ibmlmg";
          out.critical_value = ibm_xc(p.y);
          out.order = p.y == 0.0 ? "second" : "first";
          out.equilibria = {0.5 * p.y};  // coexistence beta* at x_c
        } else {
          out.model = "vibron2d";
          out.critical_value = vibron_xi_c();
          out.order = "second";
          out.equilibria = {vibron_re(p.xi)};
        }
      },
      params);
  return out;
}

// Numerically locates the minimum of the classical surface for the given
// model; used as the oracle against the analytic equilibrium formulas.
inline MinimizeResult minimize_surface(const ModelParams& params, int multistart) {
  if (multistart < 4) throw std::invalid_argument("minimize_surface: multistart >= 4 required");
  const int spd = std::max(2, int(std::round(std::cbrt(double(multistart)))) + 1);
  constexpr double pi = std::numbers::pi;
  return std::visit(
      [&](const auto& p) -> MinimizeResult {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CuspParams>) {
          auto f = [&](const std::vector<double>& q) {
            return cusp_potential(q[0], p.u, p.v);
          };
          const double r = 1.5 + std::sqrt(std::abs(p.u)) + std::abs(p.v);
          return detail::multistart_minimize(f, {-r}, {r}, std::max(multistart, 8));
        } else if constexpr (std::is_same_v<T, DickeParams>) {
          auto f = [&](const std::vector<double>& q) {
            return dicke_surface(std::complex<double>(q[0], 0.0), q[1], q[2], p);
          };
          const double amax =
              1.0 + 2.0 * p.lambda * std::sqrt(double(p.two_j)) / p.omega;
          return detail::multistart_minimize(f, {-amax, 0.0, 0.0}, {amax, pi, 2.0 * pi}, spd);
        } else if constexpr (std::is_same_v<T, LmgParams>) {
          auto f = [&](const std::vector<double>& q) {
            return lmg_surface(q[0], q[1], p.gamma_x, p.gamma_y);
          };
          const int s = std::max(3, int(std::round(std::sqrt(double(multistart)))));
          return detail::multistart_minimize(f, {0.0, 0.0}, {pi, 2.0 * pi}, s);
        } else if constexpr (std::is_same_v<T, IbmLmgParams>) {
          auto f = [&](const std::vector<double>& q) { return ibm_surface(q[0], p.x, p.y); };
          return detail::multistart_minimize(f, {-6.0}, {6.0}, std::max(multistart, 8));
        } else {
          auto f = [&](const std::vector<double>& q) { return vibron_surface(q[0], p.xi); };
          return detail::multistart_minimize(f, {0.0}, {6.0}, std::max(multistart, 8));
        }
      },
      params);
}

}  // namespace wqpt
