#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "wqpt/eigensolve.hpp"
#include "wqpt/models.hpp"
#include "wqpt/phasespace.hpp"
#include "wqpt/surfaces.hpp"

namespace wqpt {

// ---------------------------------------------------------------------------
// Sweep specification
// ---------------------------------------------------------------------------

// Linear constraint tying a second parameter to the swept control,
// target = slope * control + intercept (e.g. gamma_y = -gamma_x + 2).
struct LinkedLine {
  std::string target;
  double slope = 0.0;
  double intercept = 0.0;
};

struct Trajectory {
  std::string control;
  double start = 0.0;
  double stop = 0.0;
  int steps = 0;
  std::optional<LinkedLine> line;
};

struct QuadratureSettings {
  double w_tol = 1e-6;
  double norm_tol = 1e-6;
  long max_nodes = 2000000000L;
};

struct SweepTolerances {
  double eig_tol = 1e-10;
  double e_tol = 1e-10;
  double tail_tol = 1e-8;
  double growth = 1.5;
};

struct SweepSpec {
  std::string model;  // cusp | dicke | lmg | ibmlmg | vibron2d
  std::map<std::string, double> fixed;
  Trajectory trajectory;
  std::vector<double> sizes;  // N per model; the K list for the cusp
  QuadratureSettings quad;
  SweepTolerances tol;
  int levels = 2;
  int workers = 1;
};

// The cusp's size axis is 1/K: smaller K means a more classical system.
inline double effective_size(const SweepSpec& spec, double size) {
  return spec.model == "cusp" ? 1.0 / size : size;
}

struct SweepRow {
  double size = 0.0;
  double control = 0.0;
  double energy0 = 0.0;
  std::optional<double> gap;
  double wehrl = 0.0;
  double norm_deficit = 0.0;
  long nodes_used = 0;
  double wall_time = 0.0;  // diagnostics only; not part of the CSV schema
};

struct SweepResult {
  std::string model;
  std::string control_name;
  std::vector<SweepRow> rows;
  bool partial = false;
  std::string failure;
  std::vector<std::string> warnings;
};

namespace detail {

inline double fixed_or(const std::map<std::string, double>& m, const std::string& key,
                       double fallback) {
  const auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

}  // namespace detail

// Materialize full model parameters for one sweep point.
inline ModelParams resolve_params(const SweepSpec& spec, double size, double control) {
  std::map<std::string, double> vals = spec.fixed;
  vals[spec.trajectory.control] = control;
  if (spec.trajectory.line)
    vals[spec.trajectory.line->target] =
        spec.trajectory.line->slope * control + spec.trajectory.line->intercept;
  using detail::fixed_or;
  if (spec.model == "cusp")
    return CuspParams{fixed_or(vals, "u", 0.0), fixed_or(vals, "v", 0.0), size};
  if (spec.model == "dicke")
    return DickeParams{fixed_or(vals, "omega0", 1.0), fixed_or(vals, "omega", 1.0),
                       fixed_or(vals, "lambda", 0.0), int(std::lround(size))};
  if (spec.model == "lmg")
    return LmgParams{fixed_or(vals, "omega", 0.5), fixed_or(vals, "gamma_x", 0.0),
                     fixed_or(vals, "gamma_y", 0.0), int(std::lround(size))};
  if (spec.model == "ibmlmg")
    return IbmLmgParams{fixed_or(vals, "x", 0.0), fixed_or(vals, "y", 0.0),
                        int(std::lround(size))};
  if (spec.model == "vibron2d")
    return Vibron2DParams{fixed_or(vals, "xi", 0.0), int(std::lround(size)),
                          int(std::lround(fixed_or(vals, "l", 0.0)))};
  throw std::invalid_argument("unknown model tag: " + spec.model);
}

struct CriticalCandidate {
  double value = 0.0;
  std::string order;  // "first" | "second"
};

// Analytic critical point(s) of the swept trajectory, where known.
inline std::vector<CriticalCandidate> analytic_criticals(const SweepSpec& spec) {
  std::vector<CriticalCandidate> out;
  const auto& t = spec.trajectory;
  using detail::fixed_or;
  if (spec.model == "cusp") {
    if (t.control == "v" && fixed_or(spec.fixed, "u", 0.0) < 0.0)
      out.push_back({0.0, "first"});
    if (t.control == "u" && fixed_or(spec.fixed, "v", 0.0) == 0.0)
      out.push_back({0.0, "second"});
  } else if (spec.model == "dicke" && t.control == "lambda") {
    DickeParams p{fixed_or(spec.fixed, "omega0", 1.0), fixed_or(spec.fixed, "omega", 1.0),
                  0.0, 2};
    out.push_back({dicke_lambda_c(p), "second"});
  } else if (spec.model == "vibron2d" && t.control == "xi") {
    out.push_back({vibron_xi_c(), "second"});
  } else if (spec.model == "ibmlmg" && t.control == "x") {
    const double y = fixed_or(spec.fixed, "y", 0.0);
    out.push_back({ibm_xc(y), y == 0.0 ? "second" : "first"});
  } else if (spec.model == "lmg" && t.line) {
    // phase boundaries: gamma_x = -1 (x-deformed, second order when crossed
    // from the symmetric region), gamma_y = -1 likewise, and the diagonal
    // gamma_x = gamma_y < -1 (first order between the two deformed phases)
    const double a = t.line->slope, b = t.line->intercept;
    if (a != 1.0) {
      const double gc = b / (1.0 - a);  // line meets the diagonal
      if (gc < -1.0) out.push_back({gc, "first"});
    }
    if (a * (-1.0) + b > -1.0)  // control = -1 crossing, linked side symmetric
      out.push_back({-1.0, "second"});
    if (a != 0.0) {
      const double gc = (-1.0 - b) / a;  // linked parameter = -1 crossing
      if (gc > -1.0) out.push_back({gc, "second"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ground-state pipeline per sweep point
// ---------------------------------------------------------------------------

namespace detail {

inline int cusp_cutoff_seed(const CuspParams& p, double omega) {
  double nbar = 0.0;
  for (double x : cusp_stationary(p.u, p.v))
    if (3.0 * x * x + p.u > 0.0) nbar = std::max(nbar, x * x * omega / (2.0 * p.K));
  return std::max(32, int(std::ceil(nbar + 8.0 * std::sqrt(nbar + 1.0) + 16.0)));
}

}  // namespace detail

// Ground state for arbitrary model parameters: truncation-converged for the
// open bases (cusp, Dicke), direct diagonalization otherwise.
inline GroundState compute_ground_state(const ModelParams& params, const SweepTolerances& tol,
                                        int levels) {
  ConvergeOptions copt;
  copt.growth_factor = tol.growth;
  copt.e_tol = tol.e_tol;
  copt.tail_tol = tol.tail_tol;
  copt.eig_tol = tol.eig_tol;
  copt.k = levels;
  if (const auto* p = std::get_if<CuspParams>(&params)) {
    const double omega = cusp_default_basis_freq(*p);
    return converge_truncation(
        [&, omega](int cutoff) { return build_cusp(*p, cutoff, omega); },
        detail::cusp_cutoff_seed(*p, omega), copt);
  }
  if (const auto* p = std::get_if<DickeParams>(&params)) {
    return converge_truncation([&](int n_max) { return build_dicke(*p, n_max); },
                               dicke_nmax_seed(*p), copt);
  }
  if (const auto* p = std::get_if<LmgParams>(&params))
    return ground_state(build_lmg(*p), tol.eig_tol, levels);
  if (const auto* p = std::get_if<IbmLmgParams>(&params))
    return ground_state(build_ibm_lmg(*p), tol.eig_tol, levels);
  const auto& p = std::get<Vibron2DParams>(params);
  return ground_state(build_2dvm(p), tol.eig_tol, levels);
}

inline void validate_spec(const SweepSpec& spec, std::vector<std::string>* warnings) {
  if (spec.trajectory.steps < 8)
    throw std::invalid_argument("sweep: trajectory needs at least 8 steps");
  if (spec.sizes.empty()) throw std::invalid_argument("sweep: empty size list");
  const auto crits = analytic_criticals(spec);
  const double lo = std::min(spec.trajectory.start, spec.trajectory.stop);
  const double hi = std::max(spec.trajectory.start, spec.trajectory.stop);
  bool inside = false;
  for (const auto& c : crits) inside = inside || (c.value > lo && c.value < hi);
  if (!inside && warnings != nullptr)
    warnings->push_back(
        crits.empty()
            ? "no analytic critical point known for this trajectory"
            : "no analytic critical point lies strictly inside the sweep range");
}

// Run the sweep over every (size, control) pair. Work units execute on a small
// thread pool; results land in pre-allocated slots indexed by (size, step), so
// row order is schedule-independent. A convergence failure aborts the sweep
// and flags the result as partial, identifying the first offending point.
inline SweepResult run_sweep(const SweepSpec& spec) {
  SweepResult out;
  out.model = spec.model;
  out.control_name = spec.trajectory.control;
  validate_spec(spec, &out.warnings);

  const auto controls =
      linspace(spec.trajectory.start, spec.trajectory.stop, spec.trajectory.steps);
  const std::size_t total = spec.sizes.size() * controls.size();
  std::vector<std::optional<SweepRow>> slots(total);
  std::vector<std::string> errors(total);

  auto work = [&](std::size_t task) {
    const std::size_t si = task / controls.size();
    const std::size_t ci = task % controls.size();
    const auto t0 = std::chrono::steady_clock::now();
    const ModelParams params = resolve_params(spec, spec.sizes[si], controls[ci]);
    const GroundState gs = compute_ground_state(params, spec.tol, spec.levels);
    RefineOptions ropt;
    ropt.w_tol = spec.quad.w_tol;
    ropt.norm_tol = spec.quad.norm_tol;
    ropt.max_nodes = spec.quad.max_nodes;
    const WehrlResult wr = refine_until(gs, ropt);
    SweepRow row;
    row.size = spec.sizes[si];
    row.control = controls[ci];
    row.energy0 = gs.energy;
    row.gap = gs.gap;
    row.wehrl = wr.W;
    row.norm_deficit = wr.norm_deficit;
    row.nodes_used = wr.nodes_used;
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    slots[task] = row;
  };

  const int workers = std::max(1, spec.workers);
  if (workers == 1) {
    for (std::size_t t = 0; t < total; ++t) {
      try {
        work(t);
      } catch (const std::exception& e) {
        errors[t] = e.what();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int wkr = 0; wkr < workers; ++wkr) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t t = next.fetch_add(1);
          if (t >= total) return;
          try {
            work(t);
          } catch (const std::exception& e) {
            errors[t] = e.what();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  std::size_t first_fail = total;
  for (std::size_t t = 0; t < total && first_fail == total; ++t)
    if (!errors[t].empty()) first_fail = t;
  if (first_fail < total) {
    out.partial = true;
    const std::size_t si = first_fail / controls.size();
    const std::size_t ci = first_fail % controls.size();
    out.failure = "point (size=" + std::to_string(spec.sizes[si]) + ", " +
                  spec.trajectory.control + "=" + std::to_string(controls[ci]) +
                  "): " + errors[first_fail];
    // deterministic partial output: the contiguous prefix before the failure
    for (std::size_t t = 0; t < first_fail; ++t)
      if (slots[t].has_value()) out.rows.push_back(*slots[t]);
  } else {
    for (auto& s : slots) out.rows.push_back(*s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Order classification: Wehrl peak (first order) vs ln 2 step (second order)
// ---------------------------------------------------------------------------

struct ClassifierThresholds {
  double theta_peak = 0.3 * std::numbers::ln2;
  double theta_return = 0.15 * std::numbers::ln2;
  double step_lo = 0.5 * std::numbers::ln2;
  double step_hi = 1.5 * std::numbers::ln2;
};

struct Curve {
  double size = 0.0;
  std::vector<double> control;
  std::vector<double> wehrl;
};

struct SizeMetrics {
  double size = 0.0;
  std::string order;
  double critical = 0.0;
  double plateau_left = 0.0;
  double plateau_right = 0.0;
  double height = 0.0;  // peak prominence or step height
  double width = 0.0;
  std::string note;
};

struct TransitionReport {
  std::string order;  // first | second | ambiguous
  double critical_estimate = 0.0;
  double plateau_left = 0.0;
  double plateau_right = 0.0;
  double height = 0.0;
  double transition_width = 0.0;
  std::vector<SizeMetrics> per_size;
  std::string diagnostics;
};

namespace detail {

inline double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// linear-interpolated control value where W crosses `level` between samples
// i and i+1
inline double crossing(const std::vector<double>& c, const std::vector<double>& w, int i,
                       double level) {
  const double f = (level - w[std::size_t(i)]) / (w[std::size_t(i + 1)] - w[std::size_t(i)]);
  return c[std::size_t(i)] + f * (c[std::size_t(i + 1)] - c[std::size_t(i)]);
}

inline SizeMetrics classify_curve(Curve curve, const ClassifierThresholds& th) {
  const int n = int(curve.control.size());
  if (n < 8) throw std::invalid_argument("classify: need at least 8 points per size");
  // canonical ascending-control order; reversing a sweep changes nothing
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) idx[std::size_t(i)] = i;
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return curve.control[std::size_t(a)] < curve.control[std::size_t(b)]; });
  std::vector<double> c(static_cast<std::size_t>(n), 0.0);
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    c[std::size_t(i)] = curve.control[std::size_t(idx[std::size_t(i)])];
    w[std::size_t(i)] = curve.wehrl[std::size_t(idx[std::size_t(i)])];
  }

  SizeMetrics m;
  m.size = curve.size;
  const int k = std::max(1, n / 10);
  m.plateau_left = median_of({w.begin(), w.begin() + k});
  m.plateau_right = median_of({w.end() - k, w.end()});
  const double delta = m.plateau_right - m.plateau_left;

  int imax = 0;
  for (int i = 1; i < n; ++i)
    if (w[std::size_t(i)] > w[std::size_t(imax)]) imax = i;
  const double peak = w[std::size_t(imax)];
  const double base = std::max(m.plateau_left, m.plateau_right);
  const double prominence = peak - base;

  const bool returns = std::abs(w.front() - m.plateau_left) <= th.theta_return &&
                       std::abs(w.back() - m.plateau_right) <= th.theta_return;

  if (prominence > th.theta_peak && returns) {
    m.order = "first";
    m.critical = c[std::size_t(imax)];
    m.height = prominence;
    const double level = peak - 0.5 * prominence;
    double left = c.front(), right = c.back();
    for (int i = imax - 1; i >= 0; --i)
      if (w[std::size_t(i)] < level) {
        left = crossing(c, w, i, level);
        break;
      }
    for (int i = imax; i + 1 < n; ++i)
      if (w[std::size_t(i + 1)] < level) {
        right = crossing(c, w, i, level);
        break;
      }
    m.width = right - left;
    return m;
  }

  const bool step_sized = std::abs(delta) >= th.step_lo && std::abs(delta) <= th.step_hi;
  if (step_sized && prominence <= th.theta_peak) {
    m.order = "second";
    m.height = delta;
    int isteep = 1;
    double steep = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
      const double d = std::abs((w[std::size_t(i + 1)] - w[std::size_t(i - 1)]) /
                                (c[std::size_t(i + 1)] - c[std::size_t(i - 1)]));
      if (d > steep) {
        steep = d;
        isteep = i;
      }
    }
    // critical estimate: the half-height crossing of the step nearest to the
    // steepest sample. The finite-size inflection drifts into the broken
    // phase, so the raw derivative argmax lands visibly off the critical
    // coupling at the sizes swept here; the 50% crossing stays centered.
    const double l50 = m.plateau_left + 0.5 * delta;
    m.critical = c[std::size_t(isteep)];
    int best = -1;
    for (int i = 0; i + 1 < n; ++i) {
      const double a = w[std::size_t(i)] - l50;
      const double b = w[std::size_t(i + 1)] - l50;
      if (a == 0.0 && b == 0.0) continue;
      const bool straddles = (a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0);
      const bool right_way = delta > 0.0 ? b >= a : b <= a;
      if (straddles && right_way &&
          (best < 0 || std::abs(i - isteep) < std::abs(best - isteep)))
        best = i;
    }
    if (best >= 0) m.critical = crossing(c, w, best, l50);
    // width between the 10% and 90% crossings of the step
    const double l10 = m.plateau_left + 0.1 * delta;
    const double l90 = m.plateau_left + 0.9 * delta;
    double c10 = c.front(), c90 = c.back();
    if (delta > 0.0) {
      for (int i = 0; i + 1 < n; ++i)
        if (w[std::size_t(i)] <= l10 && w[std::size_t(i + 1)] > l10) {
          c10 = crossing(c, w, i, l10);
          break;
        }
      for (int i = n - 2; i >= 0; --i)
        if (w[std::size_t(i)] < l90 && w[std::size_t(i + 1)] >= l90) {
          c90 = crossing(c, w, i, l90);
          break;
        }
    } else {
      for (int i = 0; i + 1 < n; ++i)
        if (w[std::size_t(i)] >= l10 && w[std::size_t(i + 1)] < l10) {
          c10 = crossing(c, w, i, l10);
          break;
        }
      for (int i = n - 2; i >= 0; --i)
        if (w[std::size_t(i)] > l90 && w[std::size_t(i + 1)] <= l90) {
          c90 = crossing(c, w, i, l90);
          break;
        }
    }
    m.width = std::abs(c90 - c10);
    return m;
  }

  m.order = "ambiguous";
  m.height = delta;
  m.critical = c[std::size_t(imax)];
  m.width = 0.0;
  m.note = "prominence=" + std::to_string(prominence) + ", step=" + std::to_string(delta) +
           ", returns=" + (returns ? "yes" : "no");
  return m;
}

}  // namespace detail

inline TransitionReport classify_curves(const std::vector<Curve>& curves,
                                        const ClassifierThresholds& th = {},
                                        bool size_is_inverse = false) {
  if (curves.empty()) throw std::invalid_argument("classify: no curves");
  TransitionReport rep;
  for (const auto& curve : curves) rep.per_size.push_back(detail::classify_curve(curve, th));

  bool agree = true;
  for (const auto& m : rep.per_size) agree = agree && m.order == rep.per_size.front().order;

  // headline metrics from the largest effective size (sharpest curve)
  std::size_t best = 0;
  auto eff = [&](double s) { return size_is_inverse ? 1.0 / s : s; };
  for (std::size_t i = 1; i < rep.per_size.size(); ++i)
    if (eff(rep.per_size[i].size) > eff(rep.per_size[best].size)) best = i;
  const auto& top = rep.per_size[best];
  rep.order = agree ? top.order : "ambiguous";
  rep.critical_estimate = top.critical;
  rep.plateau_left = top.plateau_left;
  rep.plateau_right = top.plateau_right;
  rep.height = top.height;
  rep.transition_width = top.width;
  if (!agree) rep.diagnostics = "per-size classifications disagree";
  for (const auto& m : rep.per_size)
    if (!m.note.empty())
      rep.diagnostics += (rep.diagnostics.empty() ? "" : "; ") +
                         ("size " + std::to_string(m.size) + ": " + m.note);
  return rep;
}

inline std::vector<Curve> curves_from_rows(const std::vector<SweepRow>& rows) {
  std::map<double, Curve> by_size;
  for (const auto& r : rows) {
    auto& c = by_size[r.size];
    c.size = r.size;
    c.control.push_back(r.control);
    c.wehrl.push_back(r.wehrl);
  }
  std::vector<Curve> out;
  for (auto& [sz, c] : by_size) out.push_back(std::move(c));
  return out;
}

inline TransitionReport classify_order(const SweepResult& result,
                                       const ClassifierThresholds& th = {}) {
  return classify_curves(curves_from_rows(result.rows), th, result.model == "cusp");
}

// ---------------------------------------------------------------------------
// Finite-size sharpening
// ---------------------------------------------------------------------------

struct SharpeningReport {
  bool sharpens = false;
  std::vector<double> widths;  // ordered by increasing effective size
  bool mismatched_orders = false;
};

inline SharpeningReport sharpening(std::vector<SizeMetrics> per_size,
                                   bool size_is_inverse = false) {
  if (per_size.size() < 2)
    throw std::invalid_argument("sharpening: need at least two sizes");
  auto eff = [&](const SizeMetrics& m) { return size_is_inverse ? 1.0 / m.size : m.size; };
  std::sort(per_size.begin(), per_size.end(),
            [&](const SizeMetrics& a, const SizeMetrics& b) { return eff(a) < eff(b); });
  SharpeningReport rep;
  for (std::size_t i = 1; i < per_size.size(); ++i)
    if (per_size[i].order != per_size[0].order) rep.mismatched_orders = true;
  for (const auto& m : per_size) rep.widths.push_back(m.width);
  rep.sharpens = !rep.mismatched_orders;
  for (std::size_t i = 1; i < rep.widths.size(); ++i)
    rep.sharpens = rep.sharpens && rep.widths[i] < rep.widths[i - 1];
  return rep;
}

inline SharpeningReport sharpening(const TransitionReport& report,
                                   bool size_is_inverse = false) {
  return sharpening(report.per_size, size_is_inverse);
}

}  // namespace wqpt
