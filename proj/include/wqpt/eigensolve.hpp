#pragma once

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "wqpt/models.hpp"
#include "wqpt/numerics.hpp"

namespace wqpt {

struct Eigenpair {
  double energy;
  Eigen::VectorXd vector;
};

namespace detail {

// Lowest k eigenpairs of a dense symmetric matrix via LAPACK dsyevr (range
// query). Input is copied; eigenvectors come back orthonormal.
inline std::vector<Eigenpair> syevr_lowest(const Eigen::MatrixXd& A, int k) {
  const int n = int(A.rows());
  k = std::min(k, n);
  Eigen::MatrixXd work = A;
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  Eigen::MatrixXd z(n, k);
  std::vector<lapack_int> isuppz(static_cast<std::size_t>(2 * std::max(1, k)), 0);
  lapack_int m = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', n, work.data(), n, 0.0, 0.0, 1, k,
      0.0, &m, w.data(), z.data(), n, isuppz.data());
  if (info != 0)
    throw ConvergenceError("dsyevr failed with info=" + std::to_string(info));
  if (m < k) throw ConvergenceError("dsyevr returned fewer eigenpairs than requested");
  std::vector<Eigenpair> out;
  out.reserve(std::size_t(k));
  for (int i = 0; i < k; ++i)
    out.push_back(Eigenpair{w[std::size_t(i)], Eigen::VectorXd(z.col(i))});
  return out;
}

// Connected components of the exact-zero sparsity graph. Decoupled sectors
// (parity blocks at symmetric points, diagonal limits) are diagonalized
// separately, so degenerate cross-sector doublets come out sector-pure
// instead of arbitrarily mixed.
inline std::vector<std::vector<int>> sparsity_components(const Eigen::MatrixXd& A) {
  const int n = int(A.rows());
  std::vector<int> comp(std::size_t(n), -1);
  std::vector<std::vector<int>> groups;
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (comp[std::size_t(s)] >= 0) continue;
    const int id = int(groups.size());
    groups.emplace_back();
    stack.push_back(s);
    comp[std::size_t(s)] = id;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      groups[std::size_t(id)].push_back(i);
      for (int jj = 0; jj < n; ++jj) {
        if (comp[std::size_t(jj)] < 0 && A(i, jj) != 0.0) {
          comp[std::size_t(jj)] = id;
          stack.push_back(jj);
        }
      }
    }
    std::sort(groups.back().begin(), groups.back().end());
  }
  return groups;
}

}  // namespace detail

// The k lowest eigenpairs, ascending, with the deterministic sign convention:
// first coefficient of magnitude above 1e-12 is positive. Residuals are
// checked against tol * ||H||_inf; failure raises ConvergenceError carrying
// the worst residual.
inline std::vector<Eigenpair> lowest_eigenpairs(const HamiltonianMatrix& H, double tol,
                                                int k) {
  if (k < 1) throw std::invalid_argument("lowest_eigenpairs: k < 1");
  if (tol <= 0.0) throw std::invalid_argument("lowest_eigenpairs: tol <= 0");
  const int n = H.dim();
  const auto groups = detail::sparsity_components(H.entries);

  struct Tagged {
    double energy;
    int group;
    int rank;
    Eigen::VectorXd vec;
  };
  std::vector<Tagged> pairs;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& idx = groups[g];
    const int bn = int(idx.size());
    Eigen::MatrixXd block(bn, bn);
    for (int a = 0; a < bn; ++a)
      for (int b = 0; b < bn; ++b)
        block(a, b) = H.entries(idx[std::size_t(a)], idx[std::size_t(b)]);
    const auto sub = detail::syevr_lowest(block, std::min(k, bn));
    for (std::size_t r = 0; r < sub.size(); ++r) {
      Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
      for (int a = 0; a < bn; ++a) full[idx[std::size_t(a)]] = sub[r].vector[a];
      pairs.push_back({sub[r].energy, int(g), int(r), std::move(full)});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Tagged& a, const Tagged& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    if (a.group != b.group) return a.group < b.group;
    return a.rank < b.rank;
  });

  const double hnorm = H.entries.cwiseAbs().rowwise().sum().maxCoeff();
  std::vector<Eigenpair> out;
  double worst = 0.0;
  for (int i = 0; i < k && i < int(pairs.size()); ++i) {
    Eigen::VectorXd v = std::move(pairs[std::size_t(i)].vec);
    for (int a = 0; a < n; ++a) {
      if (std::abs(v[a]) > 1e-12) {
        if (v[a] < 0.0) v = -v;
        break;
      }
    }
    const double resid =
        (H.entries * v - pairs[std::size_t(i)].energy * v).cwiseAbs().maxCoeff();
    worst = std::max(worst, resid);
    if (resid > tol * std::max(hnorm, 1e-300))
      throw ConvergenceError("eigenpair residual " + std::to_string(resid) +
                                 " exceeds tol*||H||_inf",
                             resid);
    out.push_back({pairs[std::size_t(i)].energy, std::move(v)});
  }
  if (int(out.size()) < std::min(k, n))
    throw ConvergenceError("fewer eigenpairs than requested");
  return out;
}

struct TruncationInfo {
  bool converged = true;
  double tail_weight = 0.0;
  std::vector<int> cutoffs_tried;
};

struct GroundState {
  Eigen::VectorXd coefficients;
  double energy = 0.0;
  BasisDescriptor basis;
  ModelParams params;
  TruncationInfo truncation;
  std::optional<double> gap;  // E1 - E0 when two levels were requested
};

// Probability weight on the top 10% of the truncated coordinate.
inline double tail_weight(const Eigen::VectorXd& c, const BasisDescriptor& basis) {
  const int range = truncation_range(basis);
  const int edge = int(std::floor(0.9 * range));
  double acc = 0.0;
  for (int i = 0; i < int(c.size()); ++i)
    if (truncation_level(basis, i) > edge) acc += c[i] * c[i];
  return acc;
}

inline GroundState ground_state(const HamiltonianMatrix& H, double eig_tol, int k = 1) {
  const auto pairs = lowest_eigenpairs(H, eig_tol, k);
  GroundState gs;
  gs.coefficients = pairs[0].vector;
  gs.energy = pairs[0].energy;
  gs.basis = H.basis;
  gs.params = H.params;
  gs.truncation.tail_weight = tail_weight(gs.coefficients, H.basis);
  gs.truncation.cutoffs_tried = {truncation_range(H.basis)};
  if (pairs.size() > 1) gs.gap = pairs[1].energy - pairs[0].energy;
  return gs;
}

struct ConvergeOptions {
  double growth_factor = 1.5;
  double e_tol = 1e-10;
  double tail_tol = 1e-8;
  int max_dim = 20000;
  double eig_tol = 1e-10;
  int k = 1;
};

// Grows the truncation cutoff geometrically until the ground energy is stable
// between successive cutoffs and the tail weight is negligible. Applies to the
// cusp (Fock cutoff) and Dicke (n_max); never returns an unconverged state.
inline GroundState converge_truncation(const std::function<HamiltonianMatrix(int)>& builder,
                                       int initial_cutoff, const ConvergeOptions& opt) {
  if (opt.growth_factor <= 1.0)
    throw std::invalid_argument("converge_truncation: growth_factor must exceed 1");
  std::vector<int> tried;
  int cutoff = std::max(initial_cutoff, 4);
  HamiltonianMatrix H = builder(cutoff);
  if (H.dim() > opt.max_dim)
    throw ConvergenceError("converge_truncation: initial dimension exceeds max_dim");
  GroundState cur = ground_state(H, opt.eig_tol, opt.k);
  tried.push_back(cutoff);
  double prev_energy = std::numeric_limits<double>::quiet_NaN();
  while (true) {
    const bool energy_ok = !std::isnan(prev_energy) &&
                           std::abs(cur.energy - prev_energy) <= opt.e_tol;
    const bool tail_ok = cur.truncation.tail_weight <= opt.tail_tol;
    if (energy_ok && tail_ok) {
      cur.truncation.converged = true;
      cur.truncation.cutoffs_tried = tried;
      return cur;
    }
    const int next = std::max(int(std::ceil(cutoff * opt.growth_factor)), cutoff + 1);
    HamiltonianMatrix Hn = builder(next);
    if (Hn.dim() > opt.max_dim) {
      const double de = std::isnan(prev_energy)
                            ? std::numeric_limits<double>::infinity()
                            : std::abs(cur.energy - prev_energy);
      throw ConvergenceError(
          "converge_truncation: max_dim exceeded before convergence "
          "(cutoff=" +
              std::to_string(cutoff) + ", |dE0|=" + std::to_string(de) +
              ", tail=" + std::to_string(cur.truncation.tail_weight) + ")",
          de);
    }
    prev_energy = cur.energy;
    cur = ground_state(Hn, opt.eig_tol, opt.k);
    cutoff = next;
    tried.push_back(cutoff);
  }
}

}  // namespace wqpt
