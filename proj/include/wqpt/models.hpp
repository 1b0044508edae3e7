#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wqpt/numerics.hpp"

namespace wqpt {

// ---------------------------------------------------------------------------
// Model parameters. Half-integer spins are stored as 2j (integer) throughout.
// ---------------------------------------------------------------------------

struct CuspParams {
  double u = 0.0;
  double v = 0.0;
  double K = 0.1;  // classicality constant, hbar/sqrt(M) with M = 1
};

struct DickeParams {
  double omega0 = 1.0;
  double omega = 1.0;
  double lambda = 0.0;
  int two_j = 1;
};

struct LmgParams {
  double omega = 0.5;  // only enters the recorded scale factor 2*omega*j
  double gamma_x = 0.0;
  double gamma_y = 0.0;
  int two_j = 2;
};

struct IbmLmgParams {
  double x = 1.0;
  double y = 0.0;
  int N = 1;
};

struct Vibron2DParams {
  double xi = 0.0;
  int N = 2;
  int l = 0;
};

using ModelParams =
    std::variant<CuspParams, DickeParams, LmgParams, IbmLmgParams, Vibron2DParams>;

// ---------------------------------------------------------------------------
// Basis descriptors. Enumeration order is fixed: ascending n, then ascending m.
// ---------------------------------------------------------------------------

struct Fock1DBasis {
  int cutoff;        // levels 0..cutoff
  double omega = 1;  // oscillator frequency of the expansion basis
};
struct SpinBasis {
  int two_j;  // index i <-> m = i - j, i = 0..2j
};
struct TwoModeBasis {
  int N;  // index n_t = 0..N, n_s = N - n_t
};
struct U3BlockBasis {
  int N;
  int l;  // index k <-> n = |l| + 2k
};
struct U3SymBasis {
  int N;  // full symmetric space, index = n(n+1)/2 + m, labels (n, m), l = n-2m
};
struct DickeProductBasis {
  int n_max;
  int two_j;  // index = n*(2j+1) + (j+m)
};
using BasisDescriptor = std::variant<Fock1DBasis, SpinBasis, TwoModeBasis, U3BlockBasis,
                                     U3SymBasis, DickeProductBasis>;

inline int basis_dim(const BasisDescriptor& b) {
  return std::visit(
      [](const auto& d) -> int {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Fock1DBasis>) return d.cutoff + 1;
        if constexpr (std::is_same_v<T, SpinBasis>) return d.two_j + 1;
        if constexpr (std::is_same_v<T, TwoModeBasis>) return d.N + 1;
        if constexpr (std::is_same_v<T, U3BlockBasis>)
          return (d.N - std::abs(d.l)) / 2 + 1;
        if constexpr (std::is_same_v<T, U3SymBasis>) return (d.N + 1) * (d.N + 2) / 2;
        if constexpr (std::is_same_v<T, DickeProductBasis>)
          return (d.n_max + 1) * (d.two_j + 1);
      },
      b);
}

// Level along the truncated coordinate for basis index i (the photon/Fock
// number for truncated bases; the plain label otherwise). Used by the
// truncation-tail diagnostics.
inline int truncation_level(const BasisDescriptor& b, int i) {
  return std::visit(
      [i](const auto& d) -> int {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DickeProductBasis>) return i / (d.two_j + 1);
        (void)d;
        return i;
      },
      b);
}

inline int truncation_range(const BasisDescriptor& b) {
  return std::visit(
      [](const auto& d) -> int {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Fock1DBasis>) return d.cutoff;
        if constexpr (std::is_same_v<T, DickeProductBasis>) return d.n_max;
        return basis_dim(BasisDescriptor(d)) - 1;
      },
      b);
}

struct HamiltonianMatrix {
  Eigen::MatrixXd entries;
  BasisDescriptor basis;
  ModelParams params;
  std::string scale_note;  // affine scaling applied during assembly, if any

  int dim() const { return int(entries.rows()); }
};

// ---------------------------------------------------------------------------
// Cusp: H = P^2/2 + x^4/4 + (u/2) x^2 + v x with [x, P] = iK,
// x = sqrt(K/(2 Omega)) (a + a+), P = i sqrt(K Omega / 2) (a+ - a).
// Matrix elements from the closed-form ladder algebra of q = a + a+:
//   <n|q^2|n> = 2n+1,            <n+2|q^2|n> = sqrt((n+1)(n+2))
//   <n|q^4|n> = 6n^2+6n+3,       <n+2|q^4|n> = (4n+6) sqrt((n+1)(n+2))
//   <n+4|q^4|n> = sqrt((n+1)(n+2)(n+3)(n+4))
// ---------------------------------------------------------------------------

inline HamiltonianMatrix build_cusp(const CuspParams& p, int cutoff, double basis_freq) {
  if (p.K <= 0.0) throw std::invalid_argument("build_cusp: K must be positive");
  if (basis_freq <= 0.0) throw std::invalid_argument("build_cusp: basis frequency must be positive");
  if (cutoff < 4) throw std::invalid_argument("build_cusp: cutoff < 4 cannot represent x^4");
  const double K = p.K, Om = basis_freq;
  const double c = K / (2.0 * Om);  // x^2 scale
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) {
    H(n, n) = 0.25 * K * Om * (2.0 * n + 1.0) + 0.25 * c * c * (6.0 * n * n + 6.0 * n + 3.0) +
              0.5 * p.u * c * (2.0 * n + 1.0);
    if (n + 1 <= cutoff) {
      const double x1 = p.v * std::sqrt(c) * std::sqrt(n + 1.0);
      H(n, n + 1) = H(n + 1, n) = x1;
    }
    if (n + 2 <= cutoff) {
      const double s2 = std::sqrt((n + 1.0) * (n + 2.0));
      const double e2 =
          -0.25 * K * Om * s2 + 0.25 * c * c * (4.0 * n + 6.0) * s2 + 0.5 * p.u * c * s2;
      H(n, n + 2) = H(n + 2, n) = e2;
    }
    if (n + 4 <= cutoff) {
      const double s4 = std::sqrt((n + 1.0) * (n + 2.0) * (n + 3.0) * (n + 4.0));
      H(n, n + 4) = H(n + 4, n) = 0.25 * c * c * s4;
    }
  }
  HamiltonianMatrix out;
  out.entries = std::move(H);
  out.basis = Fock1DBasis{cutoff, basis_freq};
  out.params = p;
  return out;
}

// Default expansion-basis frequency: Omega = sqrt(V''(x_min)) at the deepest
// minimum of the cusp potential, falling back to the pure-quartic width
// scaling Omega = K^{1/3} when the curvature drops below 0.1.
inline double cusp_default_basis_freq(const CuspParams& p) {
  const auto roots = solve_depressed_cubic(p.u, p.v);
  double best_v = 0.0;
  double best_x = 0.0;
  bool have_min = false;
  for (double x : roots) {
    const double curv = 3.0 * x * x + p.u;
    if (curv <= 0.0) continue;  // maximum or inflection
    const double val = 0.25 * x * x * x * x + 0.5 * p.u * x * x + p.v * x;
    if (!have_min || val < best_v) {
      have_min = true;
      best_v = val;
      best_x = x;
    }
  }
  if (!have_min) return std::cbrt(p.K);
  const double curv = 3.0 * best_x * best_x + p.u;
  if (curv < 0.1) return std::cbrt(p.K);
  return std::sqrt(curv);
}

// ---------------------------------------------------------------------------
// Dicke: H = omega0 Jz + omega a+a + lambda/sqrt(2j) (a + a+)(J+ + J-)
// on |n> (x) |j,m>, n <= n_max, index = n(2j+1) + (j+m).
// ---------------------------------------------------------------------------

inline HamiltonianMatrix build_dicke(const DickeParams& p, int n_max) {
  if (p.two_j < 1) throw std::invalid_argument("build_dicke: 2j must be a positive integer");
  if (n_max < 0) throw std::invalid_argument("build_dicke: n_max < 0");
  const int S = p.two_j + 1;
  const double j = 0.5 * p.two_j;
  const int d = (n_max + 1) * S;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
  auto idx = [S](int n, int mi) { return n * S + mi; };
  auto cplus = [j](double m) { return std::sqrt(j * (j + 1.0) - m * (m + 1.0)); };
  const double g = p.lambda / std::sqrt(double(p.two_j));
  for (int n = 0; n <= n_max; ++n) {
    for (int mi = 0; mi < S; ++mi) {
      const double m = double(mi) - j;
      H(idx(n, mi), idx(n, mi)) = p.omega0 * m + p.omega * n;
      if (n + 1 <= n_max) {
        const double f = g * std::sqrt(n + 1.0);
        if (mi + 1 < S) {
          const double e = f * cplus(m);
          H(idx(n + 1, mi + 1), idx(n, mi)) = e;
          H(idx(n, mi), idx(n + 1, mi + 1)) = e;
        }
        if (mi - 1 >= 0) {
          const double e = f * cplus(m - 1.0);
          H(idx(n + 1, mi - 1), idx(n, mi)) = e;
          H(idx(n, mi), idx(n + 1, mi - 1)) = e;
        }
      }
    }
  }
  HamiltonianMatrix out;
  out.entries = std::move(H);
  out.basis = DickeProductBasis{n_max, p.two_j};
  out.params = p;
  return out;
}

// Mean-field seed for the photon cutoff (superradiant occupation plus margin).
inline int dicke_nmax_seed(const DickeParams& p) {
  const double lc = 0.5 * std::sqrt(p.omega * p.omega0);
  const double ratio = p.lambda / lc;
  return int(std::ceil(double(p.two_j) * (p.omega0 / p.omega) * ratio * ratio + 10.0));
}

// ---------------------------------------------------------------------------
// LMG, stored in the scaled form h = H/(2 omega j):
//   h = Jz/j + [gamma_x Jx^2 + gamma_y Jy^2] / (j(2j-1))
// Diagonal and Delta m = +-2 elements from J+- ladder products.
// ---------------------------------------------------------------------------

inline HamiltonianMatrix build_lmg(const LmgParams& p) {
  if (p.two_j < 2) throw std::invalid_argument("build_lmg: 2j >= 2 required (divisor j(2j-1))");
  const int d = p.two_j + 1;
  const double j = 0.5 * p.two_j;
  const double den = j * (p.two_j - 1.0);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
  auto cplus = [j](double m) { return std::sqrt(j * (j + 1.0) - m * (m + 1.0)); };
  for (int i = 0; i < d; ++i) {
    const double m = double(i) - j;
    H(i, i) = m / j + 0.5 * (p.gamma_x + p.gamma_y) * (j * (j + 1.0) - m * m) / den;
    if (i + 2 < d) {
      const double e = 0.25 * (p.gamma_x - p.gamma_y) * cplus(m) * cplus(m + 1.0) / den;
      H(i, i + 2) = H(i + 2, i) = e;
    }
  }
  HamiltonianMatrix out;
  out.entries = std::move(H);
  out.basis = SpinBasis{p.two_j};
  out.params = p;
  out.scale_note = "stored as H/(2*omega*j), omega=" + std::to_string(p.omega);
  return out;
}

// ---------------------------------------------------------------------------
// IBM-LMG: H = x n_t - (1-x)/N (Q^y)^2 with
//   <n_t+1|Q|n_t> = sqrt((n_t+1)(N-n_t)),  <n_t|Q|n_t> = y n_t,
// the square formed by exact matrix product.
// ---------------------------------------------------------------------------

inline HamiltonianMatrix build_ibm_lmg(const IbmLmgParams& p) {
  if (p.N < 1) throw std::invalid_argument("build_ibm_lmg: N >= 1 required");
  if (p.x < 0.0 || p.x > 1.0)
    throw std::invalid_argument("build_ibm_lmg: x outside [0,1]");
  const int d = p.N + 1;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(d, d);
  for (int nt = 0; nt < d; ++nt) {
    Q(nt, nt) = p.y * nt;
    if (nt + 1 < d) {
      const double e = std::sqrt((nt + 1.0) * (p.N - nt));
      Q(nt, nt + 1) = Q(nt + 1, nt) = e;
    }
  }
  Eigen::MatrixXd H = -(1.0 - p.x) / double(p.N) * (Q * Q).eval();
  for (int nt = 0; nt < d; ++nt) H(nt, nt) += p.x * nt;
  // enforce exact symmetry of the product against rounding asymmetries
  H = 0.5 * (H + H.transpose()).eval();
  HamiltonianMatrix out;
  out.entries = std::move(H);
  out.basis = TwoModeBasis{p.N};
  out.params = p;
  return out;
}

// ---------------------------------------------------------------------------
// 2DVM fixed-l block: H = (1-xi) n + xi [N(N+1) - W^2]/(N-1),
// W^2 = (D+D- + D-D+)/2 + l^2, assembled by applying
//   D+ = sqrt(2) (tau+^dag sigma - sigma^dag tau-)
//   D- = sqrt(2) (-tau-^dag sigma + sigma^dag tau+)
// to |n0, n+, n->, n0 = N-n, n+- = (n+-l)/2, and collecting Delta n = 0, +-2.
// ---------------------------------------------------------------------------

namespace detail {

struct VibTerm {
  double coeff;
  int n0, np, nm;
};

inline std::vector<VibTerm> apply_dminus(double c, int n0, int np, int nm) {
  std::vector<VibTerm> out;
  if (n0 > 0)
    out.push_back({-c * std::sqrt(2.0 * n0 * (nm + 1.0)), n0 - 1, np, nm + 1});
  if (np > 0)
    out.push_back({c * std::sqrt(2.0 * (n0 + 1.0) * np), n0 + 1, np - 1, nm});
  return out;
}

inline std::vector<VibTerm> apply_dplus(double c, int n0, int np, int nm) {
  std::vector<VibTerm> out;
  if (n0 > 0)
    out.push_back({c * std::sqrt(2.0 * n0 * (np + 1.0)), n0 - 1, np + 1, nm});
  if (nm > 0)
    out.push_back({-c * std::sqrt(2.0 * (n0 + 1.0) * nm), n0 + 1, np, nm - 1});
  return out;
}

}  // namespace detail

inline Eigen::MatrixXd vibron_w2_block(int N, int l) {
  const int la = std::abs(l);
  const int d = (N - la) / 2 + 1;
  Eigen::MatrixXd W2 = Eigen::MatrixXd::Zero(d, d);
  auto block_index = [la](int n) { return (n - la) / 2; };
  for (int k = 0; k < d; ++k) {
    const int n = la + 2 * k;
    const int n0 = N - n, np = (n + l) / 2, nm = (n - l) / 2;
    auto accumulate = [&](const std::vector<detail::VibTerm>& first,
                          auto applySecond) {
      for (const auto& t : first)
        for (const auto& s : applySecond(t.coeff, t.n0, t.np, t.nm)) {
          const int nn = s.np + s.nm;
          W2(block_index(nn), k) += 0.5 * s.coeff;
        }
    };
    accumulate(detail::apply_dminus(1.0, n0, np, nm),
               [](double c, int a, int b, int cc) { return detail::apply_dplus(c, a, b, cc); });
    accumulate(detail::apply_dplus(1.0, n0, np, nm),
               [](double c, int a, int b, int cc) { return detail::apply_dminus(c, a, b, cc); });
    W2(k, k) += double(l) * double(l);
  }
  // assembled symmetric up to rounding; symmetrize exactly
  return 0.5 * (W2 + W2.transpose()).eval();
}

inline HamiltonianMatrix build_2dvm(const Vibron2DParams& p) {
  if (p.N < 2) throw std::invalid_argument("build_2dvm: N >= 2 required (divisor N-1)");
  if (std::abs(p.l) > p.N) throw std::invalid_argument("build_2dvm: |l| > N");
  const int la = std::abs(p.l);
  const int d = (p.N - la) / 2 + 1;
  Eigen::MatrixXd W2 = vibron_w2_block(p.N, p.l);
  Eigen::MatrixXd H = -p.xi / (p.N - 1.0) * W2;
  for (int k = 0; k < d; ++k) {
    const int n = la + 2 * k;
    H(k, k) += (1.0 - p.xi) * n + p.xi * double(p.N) * (p.N + 1.0) / (p.N - 1.0);
  }
  HamiltonianMatrix out;
  out.entries = std::move(H);
  out.basis = U3BlockBasis{p.N, p.l};
  out.params = p;
  return out;
}

// Documented parity sign vector S with S H S = H (elementwise), where the
// model has one: cusp at v=0, Dicke (any lambda), LMG (any gamma), IBM-LMG at
// y=0. Returns nothing otherwise.
inline std::optional<Eigen::VectorXd> parity_signs(const HamiltonianMatrix& H) {
  const int d = H.dim();
  Eigen::VectorXd s(d);
  if (const auto* p = std::get_if<CuspParams>(&H.params)) {
    if (p->v != 0.0) return std::nullopt;
    for (int i = 0; i < d; ++i) s[i] = (i % 2 == 0) ? 1.0 : -1.0;
    return s;
  }
  if (std::holds_alternative<DickeParams>(H.params)) {
    const auto& b = std::get<DickeProductBasis>(H.basis);
    for (int i = 0; i < d; ++i) {
      const int n = i / (b.two_j + 1), mi = i % (b.two_j + 1);
      s[i] = ((n + mi) % 2 == 0) ? 1.0 : -1.0;  // (-1)^{n+m+j}
    }
    return s;
  }
  if (std::holds_alternative<LmgParams>(H.params)) {
    for (int i = 0; i < d; ++i) s[i] = (i % 2 == 0) ? 1.0 : -1.0;  // (-1)^{j+m}
    return s;
  }
  if (const auto* p = std::get_if<IbmLmgParams>(&H.params)) {
    if (p->y != 0.0) return std::nullopt;
    for (int i = 0; i < d; ++i) s[i] = (i % 2 == 0) ? 1.0 : -1.0;  // (-1)^{n_t}
    return s;
  }
  return std::nullopt;
}

}  // namespace wqpt
