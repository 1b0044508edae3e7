#pragma once

#include <string>

#include "wqpt/config.hpp"
#include "wqpt/io.hpp"
#include "wqpt/sweep.hpp"

namespace wqpt {

// Exit codes shared by the CLI and the file-level operations.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kConvergenceFailure = 3,
  kAmbiguous = 4,
};

struct SweepOutputs {
  SweepResult result;
  TransitionReport report;
  SharpeningReport sharp;
  bool classified = false;
  int exit_code = kOk;
  std::string csv_path;
  std::string report_path;
};

// Runs the configured sweep, writes the CSV (with provenance echo) and, when
// the sweep completed, the classification report JSON.
inline SweepOutputs cmd_sweep(const RunConfig& cfg, const std::string& out_prefix) {
  SweepOutputs out;
  out.csv_path = !cfg.csv_path.empty() ? cfg.csv_path : out_prefix + "_sweep.csv";
  out.report_path = !cfg.report_path.empty() ? cfg.report_path : out_prefix + "_report.json";
  out.result = run_sweep(cfg.spec);
  write_text_file(out.csv_path, sweep_csv_text(out.result, cfg.echo.dump()));
  if (out.result.partial) {
    out.exit_code = kConvergenceFailure;
    return out;
  }
  out.report = classify_order(out.result);
  out.classified = true;
  const bool inverse = cfg.spec.model == "cusp";
  if (out.report.per_size.size() >= 2) out.sharp = sharpening(out.report, inverse);
  write_text_file(out.report_path,
                  report_to_json(out.report,
                                 out.report.per_size.size() >= 2 ? &out.sharp : nullptr)
                          .dump(2) +
                      "\n");
  if (out.report.order == "ambiguous") out.exit_code = kAmbiguous;
  return out;
}

struct ClassifyOutputs {
  TransitionReport report;
  SharpeningReport sharp;
  int exit_code = kOk;
};

// Reads a sweep CSV and classifies it; writes the report JSON when a path is
// given. Produces the identical report as in-process classification of the
// same rows.
inline ClassifyOutputs cmd_classify(const std::string& csv_path,
                                    const std::string& report_path,
                                    const ClassifierThresholds& th = {}) {
  ClassifyOutputs out;
  const auto parsed = read_sweep_csv(csv_path);
  if (parsed.result.rows.empty())
    throw std::runtime_error("classify: no data rows in " + csv_path);
  out.report = classify_order(parsed.result, th);
  const bool inverse = parsed.result.model == "cusp";
  if (out.report.per_size.size() >= 2) out.sharp = sharpening(out.report, inverse);
  if (!report_path.empty())
    write_text_file(report_path,
                    report_to_json(out.report,
                                   out.report.per_size.size() >= 2 ? &out.sharp : nullptr)
                            .dump(2) +
                        "\n");
  if (out.report.order == "ambiguous") out.exit_code = kAmbiguous;
  return out;
}

// Husimi field export: node coordinates, weight, Q per row.
inline std::string husimi_csv_text(const GroundState& state, const Quadrature& grid) {
  const auto field = husimi(state, grid);
  std::ostringstream os;
  os << "# wqpt husimi v" << kVersion << "\n";
  os << "# norm_deficit " << fmt17(field.norm_deficit) << "\n";
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PlaneGrid>)
          os << "alpha_re,alpha_im,weight,q\n";
        else if constexpr (std::is_same_v<T, SphereGrid>)
          os << "theta,phi,weight,q\n";
        else if constexpr (std::is_same_v<T, CP2Grid>)
          os << "zeta1_re,zeta1_im,zeta2_re,zeta2_im,weight,q\n";
        else
          os << "alpha_re,alpha_im,theta,phi,weight,q\n";
      },
      grid.impl);
  for (long i = 0; i < grid.total_nodes(); ++i) {
    const auto pt = grid.point(i);
    if (const auto* p = std::get_if<PlanePoint>(&pt))
      os << fmt17(p->alpha.real()) << ',' << fmt17(p->alpha.imag());
    else if (const auto* s = std::get_if<SpherePoint>(&pt))
      os << fmt17(s->theta) << ',' << fmt17(s->phi);
    else if (const auto* z = std::get_if<CP2Point>(&pt))
      os << fmt17(z->zeta1.real()) << ',' << fmt17(z->zeta1.imag()) << ','
         << fmt17(z->zeta2.real()) << ',' << fmt17(z->zeta2.imag());
    else {
      const auto& pr = std::get<ProductPoint>(pt);
      os << fmt17(pr.plane.alpha.real()) << ',' << fmt17(pr.plane.alpha.imag()) << ','
         << fmt17(pr.sphere.theta) << ',' << fmt17(pr.sphere.phi);
    }
    os << ',' << fmt17(grid.weight(i)) << ',' << fmt17(field.q_values[i]) << "\n";
  }
  return os.str();
}

}  // namespace wqpt
