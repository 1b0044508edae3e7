// Command-line frontend: configuration-driven sweeps, order classification,
// energy-surface sections and Husimi field dumps.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "wqpt/config.hpp"
#include "wqpt/io.hpp"
#include "wqpt/pipeline.hpp"
#include "wqpt/version.hpp"

namespace {

using namespace wqpt;

struct Range {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
};

Range parse_range(const std::string& text) {
  Range r;
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw CLI::ValidationError("range must look like start:stop:count");
  r.start = std::stod(text.substr(0, c1));
  r.stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  r.count = std::stoi(text.substr(c2 + 1));
  if (r.count < 1) throw CLI::ValidationError("range count must be positive");
  return r;
}

int resolve_workers(std::optional<int> flag, int config_value) {
  if (flag) return *flag;
  if (const char* env = std::getenv("WQPT_WORKERS")) {
    try {
      return std::max(0, std::stoi(env));
    } catch (...) {
    }
  }
  return config_value;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out_prefix,
                  std::optional<int> workers, std::optional<int> levels) {
  RunConfig cfg;
  try {
    cfg = parse_config(read_text_file(config_path));
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
  cfg.spec.workers = resolve_workers(workers, cfg.spec.workers);
  if (cfg.spec.workers == 0) cfg.spec.workers = int(std::thread::hardware_concurrency());
  if (levels) cfg.spec.levels = *levels;
  // overrides become part of the provenance echo
  cfg.echo["workers"] = cfg.spec.workers;
  cfg.echo["levels"] = cfg.spec.levels;

  SweepOutputs out;
  try {
    out = cmd_sweep(cfg, out_prefix);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  std::cerr << "wrote " << out.csv_path << " (" << out.result.rows.size() << " rows)\n";
  if (out.result.partial) {
    std::cerr << "sweep aborted: " << out.result.failure << "\n";
    return kConvergenceFailure;
  }
  std::cerr << "wrote " << out.report_path << " (order: " << out.report.order << ")\n";
  return out.exit_code;
}

int run_classify_cmd(const std::string& csv, const std::string& report,
                     const ClassifierThresholds& th) {
  const auto out = cmd_classify(csv, report, th);
  std::cout << report_to_json(out.report,
                              out.report.per_size.size() >= 2 ? &out.sharp : nullptr)
                   .dump(2)
            << "\n";
  return out.exit_code;
}

// Surface flags take either a plain number (fixed parameter) or a
// start:stop:count range (the section axis), e.g.
//   surface --model vibron2d --xi 0.5 --r 0:1.5:151
int run_surface_cmd(const std::string& model, const std::map<std::string, std::string>& raw,
                    const std::string& out_path) {
  std::ostringstream os;
  os << "# wqpt surface v" << kVersion << " model=" << model << "\n";
  auto par = [&](const std::string& k, double dflt) {
    const auto it = raw.find(k);
    if (it == raw.end()) return dflt;
    if (it->second.find(':') != std::string::npos)
      throw CLI::ValidationError("--" + k + " must be a plain number for " + model);
    return std::stod(it->second);
  };
  auto need = [&](const char* axis) -> Range {
    const auto it = raw.find(axis);
    if (it == raw.end() || it->second.find(':') == std::string::npos)
      throw CLI::ValidationError(std::string("surface: --") + axis +
                                 " start:stop:count range is required");
    return parse_range(it->second);
  };
  if (model == "cusp") {
    const Range rx = need("x");
    os << "x,potential\n";
    for (double x : linspace(rx.start, rx.stop, rx.count))
      os << fmt17(x) << ',' << fmt17(cusp_potential(x, par("u", 0.0), par("v", 0.0))) << "\n";
  } else if (model == "vibron2d") {
    const Range rr = need("r");
    os << "r,energy\n";
    for (double r : linspace(rr.start, rr.stop, rr.count))
      os << fmt17(r) << ',' << fmt17(vibron_surface(r, par("xi", 0.0))) << "\n";
  } else if (model == "ibmlmg") {
    const Range rb = need("beta");
    os << "beta,energy\n";
    for (double b : linspace(rb.start, rb.stop, rb.count))
      os << fmt17(b) << ',' << fmt17(ibm_surface(b, par("x", 0.0), par("y", 0.0))) << "\n";
  } else if (model == "lmg") {
    const Range rt = need("theta");
    const auto itp = raw.find("phi");
    const Range rp = (itp == raw.end() || itp->second.find(':') == std::string::npos)
                         ? Range{0.0, 0.0, 1}
                         : parse_range(itp->second);
    os << "theta,phi,energy\n";
    for (double t : linspace(rt.start, rt.stop, rt.count))
      for (double p : linspace(rp.start, rp.stop, rp.count))
        os << fmt17(t) << ',' << fmt17(p) << ','
           << fmt17(lmg_surface(t, p, par("gamma_x", 0.0), par("gamma_y", 0.0))) << "\n";
  } else if (model == "dicke") {
    const Range ra = need("alpha");
    const Range rt = need("theta");
    DickeParams dp{par("omega0", 1.0), par("omega", 1.0), par("lambda", 0.0),
                   int(std::lround(par("N", 2.0)))};
    os << "alpha_re,theta,energy\n";
    for (double a : linspace(ra.start, ra.stop, ra.count))
      for (double t : linspace(rt.start, rt.stop, rt.count))
        os << fmt17(a) << ',' << fmt17(t) << ',' << fmt17(dicke_surface(a, t, 0.0, dp))
           << "\n";
  } else {
    throw CLI::ValidationError("unknown model: " + model);
  }
  if (out_path.empty())
    std::cout << os.str();
  else
    write_text_file(out_path, os.str());
  return kOk;
}

// point config: {"model":..., "size":..., "params":{...}, "grid":{"nodes":[...]}}
int run_husimi_cmd(const std::string& config_path, const std::string& out_path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(config_path));
  } catch (const std::exception& e) {
    std::cerr << "malformed JSON: " << e.what() << "\n";
    return kConfigError;
  }
  std::map<std::string, double> pars;
  if (j.contains("params"))
    for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
      pars[it.key()] = it.value().get<double>();
  const std::string model = j.value("model", "");
  const double size = j.value("size", 0.0);
  auto par = [&](const std::string& k, double dflt) {
    const auto it = pars.find(k);
    return it == pars.end() ? dflt : it->second;
  };
  ModelParams params;
  if (model == "cusp")
    params = CuspParams{par("u", 0.0), par("v", 0.0), size};
  else if (model == "dicke")
    params = DickeParams{par("omega0", 1.0), par("omega", 1.0), par("lambda", 0.0),
                         int(std::lround(size))};
  else if (model == "lmg")
    params = LmgParams{par("omega", 0.5), par("gamma_x", 0.0), par("gamma_y", 0.0),
                       int(std::lround(size))};
  else if (model == "ibmlmg")
    params = IbmLmgParams{par("x", 0.0), par("y", 0.0), int(std::lround(size))};
  else if (model == "vibron2d")
    params = Vibron2DParams{par("xi", 0.0), int(std::lround(size)),
                            int(std::lround(par("l", 0.0)))};
  else {
    std::cerr << "unknown model tag: '" << model << "'\n";
    return kConfigError;
  }

  SweepTolerances tol;
  GroundState gs;
  try {
    gs = compute_ground_state(params, tol, 1);
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return kConvergenceFailure;
  }

  detail::GridLevel lv = detail::seed_level(gs.basis);
  if (j.contains("grid") && j["grid"].contains("nodes")) {
    const auto nodes = j["grid"]["nodes"].get<std::vector<int>>();
    if (!nodes.empty()) lv.a = nodes[0];
    if (nodes.size() > 1) lv.b = nodes[1];
    if (nodes.size() > 2) lv.c = nodes[2];
    if (nodes.size() > 3) lv.d = nodes[3];
  }
  const Quadrature grid = detail::grid_at(gs.basis, lv);
  const std::string text = husimi_csv_text(gs, grid);
  if (out_path.empty())
    std::cout << text;
  else
    write_text_file(out_path, text);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wehrl-entropy phase-transition toolkit"};
  app.set_version_flag("--version", std::string("wqpt ") + wqpt::kVersion);
  app.require_subcommand(1);

  // sweep
  std::string sweep_config, sweep_out = "wqpt";
  std::optional<int> sweep_workers, sweep_levels;
  auto* sweep = app.add_subcommand("sweep", "run a control-parameter sweep");
  sweep->add_option("--config", sweep_config, "JSON run configuration")->required();
  sweep->add_option("--out", sweep_out, "output path prefix");
  sweep->add_option("--workers", sweep_workers, "worker thread count (0 = hardware)");
  sweep->add_option("--levels", sweep_levels, "eigenpairs per point (2 records the gap)");

  // classify
  std::string cls_in, cls_out;
  ClassifierThresholds th;
  auto* cls = app.add_subcommand("classify", "classify the transition order of a sweep CSV");
  cls->add_option("--in", cls_in, "sweep CSV")->required();
  cls->add_option("--out", cls_out, "report JSON path");
  cls->add_option("--theta-peak", th.theta_peak, "peak prominence threshold");
  cls->add_option("--theta-return", th.theta_return, "plateau return threshold");
  cls->add_option("--step-lo", th.step_lo, "minimum step height");
  cls->add_option("--step-hi", th.step_hi, "maximum step height");

  // surface
  std::string srf_model, srf_out;
  std::map<std::string, std::string> srf_raw;
  auto* srf = app.add_subcommand("surface", "dump a classical energy surface section");
  srf->add_option("--model", srf_model, "cusp|dicke|lmg|ibmlmg|vibron2d")->required();
  srf->add_option("--out", srf_out, "CSV path (stdout when omitted)");
  for (const char* p : {"u", "v", "xi", "x", "y", "gamma_x", "gamma_y", "omega", "omega0",
                        "lambda", "N", "r", "beta", "theta", "phi", "alpha"}) {
    srf->add_option_function<std::string>(
        std::string("--") + p, [&srf_raw, p](const std::string& v) { srf_raw[p] = v; },
        std::string(p) + ": number (fixed) or start:stop:count (section axis)");
  }

  // husimi
  std::string hus_config, hus_out;
  auto* hus = app.add_subcommand("husimi", "dump the ground-state Husimi field");
  hus->add_option("--config", hus_config, "JSON point configuration")->required();
  hus->add_option("--out", hus_out, "CSV path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return run_sweep_cmd(sweep_config, sweep_out, sweep_workers, sweep_levels);
    if (cls->parsed()) return run_classify_cmd(cls_in, cls_out, th);
    if (srf->parsed()) return run_surface_cmd(srf_model, srf_raw, srf_out);
    if (hus->parsed()) return run_husimi_cmd(hus_config, hus_out);
  } catch (const wqpt::ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return wqpt::kConvergenceFailure;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return wqpt::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wqpt::kConfigError;
  }
  return 0;
}
