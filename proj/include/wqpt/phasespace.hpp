#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "wqpt/coherent.hpp"
#include "wqpt/eigensolve.hpp"
#include "wqpt/models.hpp"
#include "wqpt/numerics.hpp"
#include "wqpt/quadrature_rules.hpp"

namespace wqpt {

// ---------------------------------------------------------------------------
// Measure-correct quadrature grids.
//
//   plane   d2(alpha)/pi          polar Gauss-Laguerre x uniform angle
//   sphere  (2j+1)/(4pi) dOmega   Gauss-Legendre in cos(theta) x uniform phi
//   CP2     (N+1)(N+2)/pi^2 d2z1 d2z2 / (1+|z1|^2+|z2|^2)^3
//           via simplex coordinates w_i = |zeta_i|^2/(1+|zeta_1|^2+|zeta_2|^2),
//           under which dmu = (N+1)(N+2)/(4 pi^2) dw1 dw2 dphi1 dphi2;
//           Duffy-type product Gauss-Legendre on the simplex, uniform phases
// ---------------------------------------------------------------------------

struct PlaneGrid {
  Rule1D radial;  // Gauss-Laguerre nodes s_i with weights premultiplied by e^{s_i}
  int angular = 0;
  double scale = 1.0;

  long nodes() const { return long(radial.nodes.size()) * angular; }
  // weight shared by all angular nodes of shell i
  double shell_weight(int i) const { return scale * radial.weights[std::size_t(i)] / angular; }
  Complex alpha(int i, int k) const {
    const double r = std::sqrt(radial.nodes[std::size_t(i)] * scale);
    return std::polar(r, 2.0 * std::numbers::pi * k / angular);
  }
};

struct SphereGrid {
  Rule1D legendre;  // nodes t = cos(theta) on [-1, 1]
  int phi_count = 0;
  int two_j = 0;

  long nodes() const { return long(legendre.nodes.size()) * phi_count; }
  double shell_weight(int i) const {
    return (two_j + 1.0) * legendre.weights[std::size_t(i)] / (2.0 * phi_count);
  }
  SpherePoint point(int i, int k) const {
    return {std::acos(legendre.nodes[std::size_t(i)]),
            2.0 * std::numbers::pi * k / phi_count};
  }
};

struct CP2Grid {
  Rule1D gl_a;  // xi on [0,1]
  Rule1D gl_b;  // eta on [0,1]
  int phi_count = 0;
  bool l_symmetric = false;  // 3D grid over (w1, w2, phi1+phi2), trivial phase done analytically
  int N = 0;

  int simplex_count() const { return int(gl_a.nodes.size()); }
  long nodes() const {
    const long s = long(gl_a.nodes.size()) * long(gl_b.nodes.size());
    return l_symmetric ? s * phi_count : s * phi_count * phi_count;
  }
  void simplex(int ia, int ib, double& w1, double& w2, double& measure) const {
    const double xi = gl_a.nodes[std::size_t(ia)];
    const double eta = gl_b.nodes[std::size_t(ib)];
    w1 = xi;
    w2 = (1.0 - xi) * eta;
    measure = gl_a.weights[std::size_t(ia)] * gl_b.weights[std::size_t(ib)] * (1.0 - xi);
  }
  double cell_weight(int ia, int ib) const {
    double w1, w2, m;
    simplex(ia, ib, w1, w2, m);
    const double pref = (N + 1.0) * (N + 2.0);
    return l_symmetric ? pref * m / phi_count : pref * m / (double(phi_count) * phi_count);
  }
};

struct ProductGrid {
  PlaneGrid plane;
  SphereGrid sphere;
  long nodes() const { return plane.nodes() * sphere.nodes(); }
};

struct Quadrature {
  std::variant<PlaneGrid, SphereGrid, CP2Grid, ProductGrid> impl;

  long total_nodes() const {
    return std::visit([](const auto& g) { return g.nodes(); }, impl);
  }

  double weight(long idx) const;
  PhasePoint point(long idx) const;

  double sum_weights() const {
    ChunkedSum acc;
    const long n = total_nodes();
    for (long i = 0; i < n; ++i) acc.add(weight(i));
    return acc.total();
  }
};

inline Quadrature plane_grid(int radial_nodes, int angular_nodes, double scale = 1.0) {
  if (radial_nodes < 1 || angular_nodes < 1 || scale <= 0.0)
    throw std::invalid_argument("plane_grid: bad resolution");
  PlaneGrid g;
  g.radial = gauss_laguerre_scaled(radial_nodes);
  g.angular = angular_nodes;
  g.scale = scale;
  return {g};
}

inline Quadrature sphere_grid(int two_j, int theta_nodes, int phi_nodes) {
  if (theta_nodes < 1 || phi_nodes < 1) throw std::invalid_argument("sphere_grid: bad resolution");
  SphereGrid g;
  g.legendre = gauss_legendre(theta_nodes);
  g.phi_count = phi_nodes;
  g.two_j = two_j;
  return {g};
}

inline Quadrature cp2_grid(int N, int simplex_nodes, int phi_nodes, bool l_symmetric) {
  if (N < 1 || simplex_nodes < 1 || phi_nodes < 1)
    throw std::invalid_argument("cp2_grid: bad resolution");
  CP2Grid g;
  g.gl_a = gauss_legendre_01(simplex_nodes);
  g.gl_b = gauss_legendre_01(simplex_nodes);
  g.phi_count = phi_nodes;
  g.l_symmetric = l_symmetric;
  g.N = N;
  return {g};
}

inline Quadrature product_grid(const Quadrature& plane, const Quadrature& sphere) {
  const auto* p = std::get_if<PlaneGrid>(&plane.impl);
  const auto* s = std::get_if<SphereGrid>(&sphere.impl);
  if (p == nullptr || s == nullptr)
    throw std::invalid_argument("product_grid: expects plane x sphere");
  return {ProductGrid{*p, *s}};
}

inline double Quadrature::weight(long idx) const {
  return std::visit(
      [idx](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PlaneGrid>) {
          return g.shell_weight(int(idx / g.angular));
        } else if constexpr (std::is_same_v<T, SphereGrid>) {
          return g.shell_weight(int(idx / g.phi_count));
        } else if constexpr (std::is_same_v<T, CP2Grid>) {
          const long per_cell = g.l_symmetric ? g.phi_count : long(g.phi_count) * g.phi_count;
          const long cell = idx / per_cell;
          const int nb = int(g.gl_b.nodes.size());
          return g.cell_weight(int(cell / nb), int(cell % nb));
        } else {
          const long ns = g.sphere.nodes();
          return g.plane.shell_weight(int((idx / ns) / g.plane.angular)) *
                 g.sphere.shell_weight(int((idx % ns) / g.sphere.phi_count));
        }
      },
      impl);
}

inline PhasePoint Quadrature::point(long idx) const {
  return std::visit(
      [idx](const auto& g) -> PhasePoint {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PlaneGrid>) {
          return PlanePoint{g.alpha(int(idx / g.angular), int(idx % g.angular))};
        } else if constexpr (std::is_same_v<T, SphereGrid>) {
          return g.point(int(idx / g.phi_count), int(idx % g.phi_count));
        } else if constexpr (std::is_same_v<T, CP2Grid>) {
          const double dphi = 2.0 * std::numbers::pi / g.phi_count;
          const long per_cell = g.l_symmetric ? g.phi_count : long(g.phi_count) * g.phi_count;
          const long cell = idx / per_cell;
          const long ph = idx % per_cell;
          const int nb = int(g.gl_b.nodes.size());
          double w1, w2, m;
          g.simplex(int(cell / nb), int(cell % nb), w1, w2, m);
          const double w0 = 1.0 - w1 - w2;
          const double r1 = std::sqrt(w1 / w0), r2 = std::sqrt(w2 / w0);
          if (g.l_symmetric)
            return CP2Point{std::polar(r1, dphi * double(ph)), Complex(r2, 0.0)};
          return CP2Point{std::polar(r1, dphi * double(ph / g.phi_count)),
                          std::polar(r2, dphi * double(ph % g.phi_count))};
        } else {
          const long ns = g.sphere.nodes();
          const long ip = idx / ns, is = idx % ns;
          return ProductPoint{
              PlanePoint{g.plane.alpha(int(ip / g.plane.angular), int(ip % g.plane.angular))},
              g.sphere.point(int(is / g.sphere.phi_count), int(is % g.sphere.phi_count))};
        }
      },
      impl);
}

// ---------------------------------------------------------------------------
// Husimi evaluation. All terms are emitted in flattened node order; the
// specialized paths below share the per-axis weight expressions with the
// generic accessors, so streaming and materialized evaluations agree bitwise.
// ---------------------------------------------------------------------------

namespace detail {

inline double clamp_q(double q) {
  if (q < 1e-300) return 0.0;  // underflow hygiene before Q ln Q
  return q > 1.0 ? 1.0 : q;
}

// phase table T[k, n] = exp(i sign phi_k n), phi_k = 2 pi k / count
inline Eigen::MatrixXcd phase_table(int count, int dim, double sign) {
  Eigen::MatrixXcd T(count, dim);
  const double dphi = 2.0 * std::numbers::pi / count;
  for (int k = 0; k < count; ++k)
    for (int n = 0; n < dim; ++n) T(k, n) = std::polar(1.0, sign * dphi * k * n);
  return T;
}

// Fock moduli at radius^2 = r2: rho_n = exp(-r2/2 + n ln(r2)/2 - lgamma(n+1)/2)
inline Eigen::VectorXd fock_moduli(double r2, int dim) {
  Eigen::VectorXd rho(dim);
  if (r2 <= 0.0) {
    rho.setZero();
    rho[0] = 1.0;
    return rho;
  }
  const double lr = 0.5 * std::log(r2);
  for (int n = 0; n < dim; ++n)
    rho[n] = std::exp(-0.5 * r2 + n * lr - 0.5 * log_factorial(n));
  return rho;
}

// SU(2) moduli at t = cos(theta): binom^{1/2} cos^{2j-i} sin^{i} of theta/2
inline Eigen::VectorXd su2_moduli(double t, int two_j) {
  Eigen::VectorXd rho(two_j + 1);
  const double c2 = 0.5 * (1.0 + t);  // cos^2(theta/2)
  const double s2 = 0.5 * (1.0 - t);
  if (s2 <= 0.0) {
    rho.setZero();
    rho[0] = 1.0;
    return rho;
  }
  if (c2 <= 0.0) {
    rho.setZero();
    rho[two_j] = 1.0;
    return rho;
  }
  const double lc = 0.5 * std::log(c2), ls = 0.5 * std::log(s2);
  for (int i = 0; i <= two_j; ++i)
    rho[i] = std::exp(0.5 * log_binomial(two_j, i) + (two_j - i) * lc + i * ls);
  return rho;
}

// For each Husimi node, call f(weight, Q) in flattened node order.
template <class F>
void husimi_plane(const Eigen::VectorXcd& c, const PlaneGrid& g, F&& f) {
  const int dim = int(c.size());
  const int R = int(g.radial.nodes.size());
  const Eigen::MatrixXcd T = phase_table(g.angular, dim, -1.0);
  Eigen::VectorXcd d(dim), ov(g.angular);
  for (int i = 0; i < R; ++i) {
    const Eigen::VectorXd rho = fock_moduli(g.radial.nodes[std::size_t(i)] * g.scale, dim);
    d = c.cwiseProduct(rho.cast<Complex>());
    ov.noalias() = T * d;
    const double w = g.shell_weight(i);
    for (int k = 0; k < g.angular; ++k) f(w, clamp_q(std::norm(ov[k])));
  }
}

template <class F>
void husimi_sphere(const Eigen::VectorXcd& c, const SphereGrid& g, F&& f) {
  const int dim = int(c.size());
  const int Tn = int(g.legendre.nodes.size());
  const Eigen::MatrixXcd T = phase_table(g.phi_count, dim, +1.0);
  Eigen::VectorXcd d(dim), ov(g.phi_count);
  for (int i = 0; i < Tn; ++i) {
    const Eigen::VectorXd rho = su2_moduli(g.legendre.nodes[std::size_t(i)], g.two_j);
    d = c.cwiseProduct(rho.cast<Complex>());
    ov.noalias() = T * d;
    const double w = g.shell_weight(i);
    for (int k = 0; k < g.phi_count; ++k) f(w, clamp_q(std::norm(ov[k])));
  }
}

// U(3) moduli on the simplex: w1^{k1/2} w2^{k2/2} w0^{(N-n)/2} multinom^{1/2}
inline double u3_modulus(int N, int n, int m, double lw0, double lw1, double lw2,
                         bool z1_zero, bool z2_zero) {
  const int k1 = n - m, k2 = m;
  if ((k1 > 0 && z1_zero) || (k2 > 0 && z2_zero)) return 0.0;
  const double lmult = 0.5 * (log_factorial(N) - log_factorial(N - n) -
                              log_factorial(n - m) - log_factorial(m));
  return std::exp(lmult + 0.5 * (k1 * lw1 + k2 * lw2 + (N - n) * lw0));
}

template <class F>
void husimi_cp2_block(const Eigen::VectorXcd& c, const U3BlockBasis& basis, const CP2Grid& g,
                      F&& f) {
  const int la = std::abs(basis.l);
  const int dim = int(c.size());
  const int nb = int(g.gl_b.nodes.size());
  // phase of conj(amplitude) on the reduced grid: e^{-i (n+l)/2 phi+}
  Eigen::MatrixXcd T(g.phi_count, dim);
  const double dphi = 2.0 * std::numbers::pi / g.phi_count;
  for (int k = 0; k < g.phi_count; ++k)
    for (int q = 0; q < dim; ++q) {
      const int n = la + 2 * q;
      T(k, q) = std::polar(1.0, -dphi * k * double((n + basis.l) / 2));
    }
  Eigen::VectorXd rho(dim);
  Eigen::VectorXcd d(dim), ov(g.phi_count);
  for (int ia = 0; ia < int(g.gl_a.nodes.size()); ++ia) {
    for (int ib = 0; ib < nb; ++ib) {
      double w1, w2, meas;
      g.simplex(ia, ib, w1, w2, meas);
      const double w0 = 1.0 - w1 - w2;
      const double lw0 = std::log(w0), lw1 = w1 > 0 ? std::log(w1) : 0.0,
                   lw2 = w2 > 0 ? std::log(w2) : 0.0;
      for (int q = 0; q < dim; ++q) {
        const int n = la + 2 * q;
        rho[q] = u3_modulus(basis.N, n, (n - basis.l) / 2, lw0, lw1, lw2, w1 == 0.0,
                            w2 == 0.0);
      }
      d = c.cwiseProduct(rho.cast<Complex>());
      ov.noalias() = T * d;
      const double w = g.cell_weight(ia, ib);
      for (int k = 0; k < g.phi_count; ++k) f(w, clamp_q(std::norm(ov[k])));
    }
  }
}

// Full 4D CP2 grid for a general symmetric-representation state. Two-stage
// phase contraction: first over k2 = m against phi2, then over k1 = n-m
// against phi1.
template <class F>
void husimi_cp2_full(const Eigen::VectorXcd& c, int N, const std::optional<int>& l_block,
                     const CP2Grid& g, F&& f) {
  const int P = g.phi_count;
  const int nb = int(g.gl_b.nodes.size());
  const Eigen::MatrixXcd T1 = phase_table(P, N + 1, -1.0);  // e^{-i k1 phi1}
  const Eigen::MatrixXcd T2 = phase_table(P, N + 1, -1.0);  // e^{-i k2 phi2}
  Eigen::MatrixXcd D(N + 1, N + 1);
  Eigen::MatrixXcd G(N + 1, P), OV(P, P);
  for (int ia = 0; ia < int(g.gl_a.nodes.size()); ++ia) {
    for (int ib = 0; ib < nb; ++ib) {
      double w1, w2, meas;
      g.simplex(ia, ib, w1, w2, meas);
      const double w0 = 1.0 - w1 - w2;
      const double lw0 = std::log(w0), lw1 = w1 > 0 ? std::log(w1) : 0.0,
                   lw2 = w2 > 0 ? std::log(w2) : 0.0;
      D.setZero();
      if (l_block.has_value()) {
        const int la = std::abs(*l_block);
        for (int q = 0; la + 2 * q <= N; ++q) {
          const int n = la + 2 * q, m = (n - *l_block) / 2;
          D(n - m, m) = c[q] * u3_modulus(N, n, m, lw0, lw1, lw2, w1 == 0.0, w2 == 0.0);
        }
      } else {
        int idx = 0;
        for (int n = 0; n <= N; ++n)
          for (int m = 0; m <= n; ++m, ++idx)
            D(n - m, m) = c[idx] * u3_modulus(N, n, m, lw0, lw1, lw2, w1 == 0.0, w2 == 0.0);
      }
      G.noalias() = D * T2.transpose();   // G(k1, i2)
      OV.noalias() = T1 * G;              // OV(i1, i2)
      const double w = g.cell_weight(ia, ib);
      for (int i1 = 0; i1 < P; ++i1)
        for (int i2 = 0; i2 < P; ++i2) f(w, clamp_q(std::norm(OV(i1, i2))));
    }
  }
}

// Product grid, separable contraction: per plane shell, B = conj(F) C over the
// Fock index, then overlap against the sphere amplitude matrix. The full
// (plane x sphere x basis) tensor is never materialized.
template <class F>
void husimi_product(const Eigen::VectorXcd& c, const DickeProductBasis& basis,
                    const ProductGrid& g, F&& f) {
  const int S = basis.two_j + 1;
  const int nph = basis.n_max + 1;
  Eigen::MatrixXcd C(nph, S);
  for (int n = 0; n < nph; ++n)
    for (int mi = 0; mi < S; ++mi) C(n, mi) = c[n * S + mi];

  // sphere amplitude matrix G(s, m), s = shell*P + k
  const int Tn = int(g.sphere.legendre.nodes.size());
  const int P = g.sphere.phi_count;
  const long NS = g.sphere.nodes();
  Eigen::MatrixXcd G(NS, S);
  {
    const Eigen::MatrixXcd Tph = phase_table(P, S, -1.0);  // amplitude phase e^{-i i_m phi}
    for (int i = 0; i < Tn; ++i) {
      const Eigen::VectorXd rho = su2_moduli(g.sphere.legendre.nodes[std::size_t(i)],
                                             basis.two_j);
      for (int k = 0; k < P; ++k)
        G.row(long(i) * P + k) = Tph.row(k).cwiseProduct(rho.transpose().cast<Complex>());
    }
  }
  Eigen::VectorXd sphere_w(NS);
  for (int i = 0; i < Tn; ++i)
    for (int k = 0; k < P; ++k) sphere_w[long(i) * P + k] = g.sphere.shell_weight(i);

  const int A = g.plane.angular;
  const Eigen::MatrixXcd Tpl = phase_table(A, nph, -1.0);  // conj of Fock phase
  Eigen::MatrixXcd D(nph, S), B(A, S), OV(A, NS);
  for (int i = 0; i < int(g.plane.radial.nodes.size()); ++i) {
    const Eigen::VectorXd rho =
        fock_moduli(g.plane.radial.nodes[std::size_t(i)] * g.plane.scale, nph);
    D = rho.cast<Complex>().asDiagonal() * C;
    B.noalias() = Tpl * D;           // B(k, m) = sum_n conj(f_n) c_{n m}
    OV.noalias() = B * G.adjoint();  // OV(k, s) = sum_m B(k, m) conj(G(s, m))
    const double wp = g.plane.shell_weight(i);
    for (int k = 0; k < A; ++k)
      for (long s = 0; s < NS; ++s) f(wp * sphere_w[s], clamp_q(std::norm(OV(k, s))));
  }
}

template <class F>
void for_each_husimi(const Eigen::VectorXcd& c, const BasisDescriptor& basis,
                     const Quadrature& grid, F&& f) {
  if (c.size() != basis_dim(basis))
    throw std::invalid_argument("husimi: coefficient/basis dimension mismatch");
  const bool ok = std::visit(
      [&](const auto& b) -> bool {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, Fock1DBasis>) {
          if (const auto* g = std::get_if<PlaneGrid>(&grid.impl)) {
            husimi_plane(c, *g, f);
            return true;
          }
        } else if constexpr (std::is_same_v<B, SpinBasis> || std::is_same_v<B, TwoModeBasis>) {
          if (const auto* g = std::get_if<SphereGrid>(&grid.impl)) {
            husimi_sphere(c, *g, f);
            return true;
          }
        } else if constexpr (std::is_same_v<B, U3BlockBasis>) {
          if (const auto* g = std::get_if<CP2Grid>(&grid.impl)) {
            if (g->l_symmetric)
              husimi_cp2_block(c, b, *g, f);
            else
              husimi_cp2_full(c, b.N, b.l, *g, f);
            return true;
          }
        } else if constexpr (std::is_same_v<B, U3SymBasis>) {
          if (const auto* g = std::get_if<CP2Grid>(&grid.impl)) {
            if (g->l_symmetric)
              throw std::invalid_argument(
                  "husimi: l-symmetric grid requires a fixed-l state");
            husimi_cp2_full(c, b.N, std::nullopt, *g, f);
            return true;
          }
        } else if constexpr (std::is_same_v<B, DickeProductBasis>) {
          if (const auto* g = std::get_if<ProductGrid>(&grid.impl)) {
            husimi_product(c, b, *g, f);
            return true;
          }
        }
        return false;
      },
      basis);
  if (!ok) throw std::invalid_argument("husimi: grid geometry does not match state basis");
}

}  // namespace detail

struct HusimiField {
  Eigen::VectorXd q_values;  // aligned to the grid's flattened node order
  double norm_deficit = 0.0;
};

inline HusimiField husimi(const Eigen::VectorXcd& coeffs, const BasisDescriptor& basis,
                          const Quadrature& grid) {
  HusimiField field;
  field.q_values.resize(grid.total_nodes());
  ChunkedSum norm;
  long idx = 0;
  detail::for_each_husimi(coeffs, basis, grid, [&](double w, double q) {
    field.q_values[idx++] = q;
    norm.add(w * q);
  });
  field.norm_deficit = std::abs(1.0 - norm.total());
  return field;
}

inline HusimiField husimi(const GroundState& state, const Quadrature& grid) {
  return husimi(state.coefficients.cast<Complex>(), state.basis, grid);
}

// W = -sum_i w_i Q_i ln Q_i with 0 ln 0 = 0, fixed-order pairwise summation.
inline double wehrl_entropy(const HusimiField& field, const Quadrature& grid) {
  if (field.q_values.size() != grid.total_nodes())
    throw std::invalid_argument("wehrl_entropy: field not aligned to grid");
  ChunkedSum acc;
  for (long i = 0; i < field.q_values.size(); ++i) {
    const double q = field.q_values[i];
    acc.add(q > 0.0 ? -grid.weight(i) * q * std::log(q) : 0.0);
  }
  return acc.total();
}

struct WehrlEstimate {
  double W = 0.0;
  double norm_deficit = 0.0;
  long nodes = 0;
};

// Streaming evaluation: same terms, same order, no materialized field.
inline WehrlEstimate wehrl_streaming(const Eigen::VectorXcd& coeffs,
                                     const BasisDescriptor& basis, const Quadrature& grid) {
  ChunkedSum ent, norm;
  detail::for_each_husimi(coeffs, basis, grid, [&](double w, double q) {
    ent.add(q > 0.0 ? -w * q * std::log(q) : 0.0);
    norm.add(w * q);
  });
  return {ent.total(), std::abs(1.0 - norm.total()), grid.total_nodes()};
}

// ---------------------------------------------------------------------------
// Grid refinement. Seeds are sized from the state's basis so that the norm
// integrand is within the rule's polynomial exactness; every axis is doubled
// until successive Wehrl values agree and the norm deficit is small.
// ---------------------------------------------------------------------------

struct RefineOptions {
  double w_tol = 1e-6;
  double norm_tol = 1e-6;
  long max_nodes = 2000000000L;
};

struct RefineStep {
  long nodes;
  double W;
  double norm_deficit;
};

struct WehrlResult {
  double W = 0.0;
  double norm_deficit = 0.0;
  long nodes_used = 0;
  std::vector<RefineStep> ladder;
};

namespace detail {

struct GridLevel {
  int a = 0, b = 0, c = 0, d = 0;  // per-axis node counts, meaning varies by geometry
};

inline GridLevel seed_level(const BasisDescriptor& basis) {
  return std::visit(
      [](const auto& bd) -> GridLevel {
        using B = std::decay_t<decltype(bd)>;
        if constexpr (std::is_same_v<B, Fock1DBasis>) {
          return {std::max(12, bd.cutoff / 2 + 6), std::max(24, bd.cutoff + 8), 0, 0};
        } else if constexpr (std::is_same_v<B, SpinBasis>) {
          return {bd.two_j + 3, 2 * bd.two_j + 5, 0, 0};
        } else if constexpr (std::is_same_v<B, TwoModeBasis>) {
          return {bd.N + 3, 2 * bd.N + 5, 0, 0};
        } else if constexpr (std::is_same_v<B, U3BlockBasis> || std::is_same_v<B, U3SymBasis>) {
          return {bd.N + 3, 2 * bd.N + 5, 0, 0};
        } else {  // DickeProductBasis
          return {std::max(12, bd.n_max / 2 + 6), std::max(24, bd.n_max + 8), bd.two_j + 3,
                  2 * bd.two_j + 5};
        }
      },
      basis);
}

inline Quadrature grid_at(const BasisDescriptor& basis, const GridLevel& lv) {
  return std::visit(
      [&](const auto& bd) -> Quadrature {
        using B = std::decay_t<decltype(bd)>;
        if constexpr (std::is_same_v<B, Fock1DBasis>) {
          return plane_grid(lv.a, lv.b, 1.0);
        } else if constexpr (std::is_same_v<B, SpinBasis>) {
          return sphere_grid(bd.two_j, lv.a, lv.b);
        } else if constexpr (std::is_same_v<B, TwoModeBasis>) {
          return sphere_grid(bd.N, lv.a, lv.b);
        } else if constexpr (std::is_same_v<B, U3BlockBasis>) {
          return cp2_grid(bd.N, lv.a, lv.b, true);
        } else if constexpr (std::is_same_v<B, U3SymBasis>) {
          return cp2_grid(bd.N, lv.a, lv.b, false);
        } else {
          return product_grid(plane_grid(lv.a, lv.b, 1.0),
                              sphere_grid(bd.two_j, lv.c, lv.d));
        }
      },
      basis);
}

inline long level_nodes(const BasisDescriptor& basis, const GridLevel& lv) {
  return std::visit(
      [&](const auto& bd) -> long {
        using B = std::decay_t<decltype(bd)>;
        if constexpr (std::is_same_v<B, Fock1DBasis> || std::is_same_v<B, SpinBasis> ||
                      std::is_same_v<B, TwoModeBasis>) {
          return long(lv.a) * lv.b;
        } else if constexpr (std::is_same_v<B, U3BlockBasis>) {
          return long(lv.a) * lv.a * lv.b;
        } else if constexpr (std::is_same_v<B, U3SymBasis>) {
          return long(lv.a) * lv.a * lv.b * lv.b;
        } else {
          (void)bd;
          return long(lv.a) * lv.b * lv.c * lv.d;
        }
      },
      basis);
}

}  // namespace detail

inline WehrlResult refine_until(const Eigen::VectorXcd& coeffs, const BasisDescriptor& basis,
                                const RefineOptions& opt) {
  if (opt.w_tol < 0.0 || opt.norm_tol < 0.0)
    throw std::invalid_argument("refine_until: negative tolerance");
  detail::GridLevel lv = detail::seed_level(basis);
  if (detail::level_nodes(basis, lv) > opt.max_nodes)
    throw ConvergenceError("refine_until: seed grid already exceeds max_nodes");
  WehrlResult out;
  WehrlEstimate prev = wehrl_streaming(coeffs, basis, detail::grid_at(basis, lv));
  out.ladder.push_back({prev.nodes, prev.W, prev.norm_deficit});
  for (;;) {
    detail::GridLevel next{2 * lv.a, 2 * lv.b, 2 * lv.c, 2 * lv.d};
    if (detail::level_nodes(basis, next) > opt.max_nodes)
      throw ConvergenceError(
          "refine_until: max_nodes exceeded; last two W = " + std::to_string(prev.W) +
              (out.ladder.size() > 1
                   ? ", " + std::to_string(out.ladder[out.ladder.size() - 2].W)
                   : std::string(" (single evaluation)")),
          prev.W);
    const WehrlEstimate cur = wehrl_streaming(coeffs, basis, detail::grid_at(basis, next));
    out.ladder.push_back({cur.nodes, cur.W, cur.norm_deficit});
    if (std::abs(cur.W - prev.W) <= opt.w_tol && cur.norm_deficit <= opt.norm_tol) {
      out.W = cur.W;
      out.norm_deficit = cur.norm_deficit;
      out.nodes_used = cur.nodes;
      return out;
    }
    prev = cur;
    lv = next;
  }
}

inline WehrlResult refine_until(const GroundState& state, const RefineOptions& opt) {
  return refine_until(state.coefficients.cast<Complex>(), state.basis, opt);
}

// Lieb minimum Wehrl entropies (coherent states).
inline double lieb_plane() { return 1.0; }
inline double lieb_sphere(int two_j) { return double(two_j) / (two_j + 1.0); }
inline double lieb_cp2(int N) { return double(N) * (3.0 + 2.0 * N) / ((N + 1.0) * (N + 2.0)); }

}  // namespace wqpt
