#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "wqpt/config.hpp"
#include "wqpt/io.hpp"
#include "wqpt/pipeline.hpp"

using namespace wqpt;
using Catch::Approx;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("parse_config fills defaults for a minimal lmg sweep") {
  const std::string text =
      R"({"model":"lmg","sizes":[20,40],)"
      R"("trajectory":{"control":"gamma_x","start":-3,"stop":1,"steps":41,)"
      R"("line":"gamma_y=-gamma_x+2"}})";
  const auto cfg = parse_config(text);
  CHECK(cfg.spec.model == "lmg");
  CHECK(cfg.spec.sizes == std::vector<double>{20.0, 40.0});
  REQUIRE(cfg.spec.trajectory.line.has_value());
  CHECK(cfg.spec.trajectory.line->target == "gamma_y");
  CHECK(cfg.spec.trajectory.line->slope == -1.0);
  CHECK(cfg.spec.trajectory.line->intercept == 2.0);
  CHECK(cfg.spec.tol.eig_tol == 1e-10);
  CHECK(cfg.spec.quad.w_tol == 1e-6);
  CHECK(cfg.spec.quad.norm_tol == 1e-6);
  CHECK(cfg.spec.tol.e_tol == 1e-10);
  CHECK(cfg.spec.tol.tail_tol == 1e-8);
  CHECK(cfg.spec.levels == 2);
  CHECK(cfg.spec.fixed.at("omega") == 0.5);
  CHECK(cfg.echo.contains("tolerances"));
}

TEST_CASE("parse_config rejects bad inputs with every violation listed") {
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);

  try {
    parse_config(R"({"model":"dicke5"})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    bool tag = false, traj = false, sizes = false;
    for (const auto& v : e.violations()) {
      if (v.find("dicke5") != std::string::npos) tag = true;
      if (v.find("trajectory") != std::string::npos) traj = true;
      if (v.find("sizes") != std::string::npos) sizes = true;
    }
    CHECK(tag);
    CHECK(traj);
    CHECK(sizes);
  }

  try {
    parse_config(
        R"({"model":"vibron2d","sizes":[1],)"
        R"("trajectory":{"control":"xi","start":0.05,"stop":0.6,"steps":41}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    bool found = false;
    for (const auto& v : e.violations())
      if (v.find("N >= 2") != std::string::npos) found = true;
    CHECK(found);
  }

  CHECK_THROWS_AS(parse_config(
                      R"({"model":"lmg","sizes":[10],"bogus":1,)"
                      R"("trajectory":{"control":"gamma_x","start":0,"stop":1,"steps":9}})"),
                  ConfigError);

  CHECK_THROWS_AS(parse_config(
                      R"({"model":"lmg","sizes":[10],)"
                      R"("trajectory":{"control":"gamma_x","start":0,"stop":1,"steps":4}})"),
                  ConfigError);

  CHECK_THROWS_AS(parse_config(
                      R"({"model":"ibmlmg","sizes":[10],)"
                      R"("trajectory":{"control":"x","start":0.5,"stop":1.4,"steps":11}})"),
                  ConfigError);
}

TEST_CASE("fmt17 round-trips doubles exactly") {
  for (double x : {1.0 / 3.0, 2.6455281329408975, -1e-300, 0.1, 123456.78901234567}) {
    CHECK(std::stod(fmt17(x)) == x);
  }
  const std::string small = fmt17(1e-06);
  CHECK(small.find('e') != std::string::npos);  // lowercase exponent
  CHECK(small.find('E') == std::string::npos);
}

TEST_CASE("sweep csv round-trips rows exactly") {
  SweepResult res;
  res.model = "lmg";
  res.control_name = "gamma_x";
  for (int i = 0; i < 3; ++i) {
    SweepRow r;
    r.size = 10;
    r.control = -1.0 + i * 0.31;
    r.energy0 = -1.234567890123456789 + i;
    if (i != 1) r.gap = 0.25 * i + 1e-13;
    r.wehrl = 1.0 + i / 3.0;
    r.norm_deficit = 1e-9 * i;
    r.nodes_used = 1000 + i;
    res.rows.push_back(r);
  }
  const std::string text = sweep_csv_text(res, R"({"demo":true})");
  std::istringstream in(text);
  const auto parsed = parse_sweep_csv(in);
  CHECK(parsed.config_echo == R"({"demo":true})");
  REQUIRE(parsed.result.rows.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(parsed.result.rows[i].control == res.rows[i].control);
    CHECK(parsed.result.rows[i].energy0 == res.rows[i].energy0);
    CHECK(parsed.result.rows[i].wehrl == res.rows[i].wehrl);
    CHECK(parsed.result.rows[i].gap.has_value() == res.rows[i].gap.has_value());
    if (res.rows[i].gap) CHECK(*parsed.result.rows[i].gap == *res.rows[i].gap);
  }
}

TEST_CASE("cmd_sweep output classifies identically through the file path") {
  const std::string text =
      R"({"model":"lmg","sizes":[8,12],)"
      R"("trajectory":{"control":"gamma_x","start":-2.5,"stop":0.5,"steps":13,)"
      R"("line":"gamma_y=-gamma_x+2"}})";
  const auto cfg = parse_config(text);
  const std::string prefix = temp_path("wqpt_test_roundtrip");
  const auto out = cmd_sweep(cfg, prefix);
  REQUIRE(out.exit_code == kOk);
  REQUIRE(out.classified);

  const auto via_file = cmd_classify(out.csv_path, "");
  CHECK(via_file.report.order == out.report.order);
  CHECK(via_file.report.critical_estimate == out.report.critical_estimate);
  CHECK(via_file.report.plateau_left == out.report.plateau_left);
  CHECK(via_file.report.plateau_right == out.report.plateau_right);
  CHECK(via_file.report.height == out.report.height);
  CHECK(via_file.report.transition_width == out.report.transition_width);
  REQUIRE(via_file.report.per_size.size() == out.report.per_size.size());
  for (std::size_t i = 0; i < out.report.per_size.size(); ++i) {
    CHECK(via_file.report.per_size[i].critical == out.report.per_size[i].critical);
    CHECK(via_file.report.per_size[i].width == out.report.per_size[i].width);
  }

  // provenance: re-running from the echoed header reproduces the CSV bitwise
  const auto parsed = read_sweep_csv(out.csv_path);
  REQUIRE_FALSE(parsed.config_echo.empty());
  const auto cfg2 = parse_config(parsed.config_echo);
  const std::string prefix2 = temp_path("wqpt_test_roundtrip2");
  const auto out2 = cmd_sweep(cfg2, prefix2);
  CHECK(read_text_file(out2.csv_path) == read_text_file(out.csv_path));

  std::remove(out.csv_path.c_str());
  std::remove(out.report_path.c_str());
  std::remove(out2.csv_path.c_str());
  std::remove(out2.report_path.c_str());
}

TEST_CASE("cmd_classify flags an ambiguous flat curve with exit code 4") {
  SweepResult res;
  res.model = "lmg";
  res.control_name = "gamma_x";
  for (int i = 0; i < 11; ++i) {
    SweepRow r;
    r.size = 10;
    r.control = i * 0.1;
    r.wehrl = 0.95;
    res.rows.push_back(r);
  }
  const std::string path = temp_path("wqpt_test_flat.csv");
  write_text_file(path, sweep_csv_text(res, ""));
  const auto out = cmd_classify(path, "");
  CHECK(out.exit_code == kAmbiguous);
  CHECK(out.report.order == "ambiguous");
  std::remove(path.c_str());
}

TEST_CASE("report json round-trips") {
  TransitionReport rep;
  rep.order = "second";
  rep.critical_estimate = -1.0;
  rep.plateau_left = 0.97;
  rep.plateau_right = 1.66;
  rep.height = 0.69;
  rep.transition_width = 0.2;
  SizeMetrics m;
  m.size = 20;
  m.order = "second";
  m.critical = -1.05;
  m.plateau_left = 0.97;
  m.plateau_right = 1.65;
  m.height = 0.68;
  m.width = 0.3;
  rep.per_size.push_back(m);
  const auto j = report_to_json(rep);
  const auto back = report_from_json(j);
  CHECK(back.order == rep.order);
  CHECK(back.critical_estimate == rep.critical_estimate);
  CHECK(back.per_size.size() == 1);
  CHECK(back.per_size[0].width == m.width);
}

TEST_CASE("husimi csv export carries coordinates, weights and Q") {
  const auto gs = ground_state(build_lmg({0.5, -1.5, 0.5, 8}), 1e-10);
  const auto grid = sphere_grid(8, 6, 9);
  const std::string text = husimi_csv_text(gs, grid);
  std::istringstream in(text);
  std::string line;
  int rows = 0;
  bool header_seen = false;
  double total = 0.0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      CHECK(line == "theta,phi,weight,q");
      header_seen = true;
      continue;
    }
    ++rows;
    const auto c1 = line.rfind(',');
    const double q = std::stod(line.substr(c1 + 1));
    CHECK(q >= 0.0);
    CHECK(q <= 1.0);
    const auto rest = line.substr(0, c1);
    const auto c2 = rest.rfind(',');
    total += std::stod(rest.substr(c2 + 1)) * q;
  }
  CHECK(rows == 54);
  CHECK(std::abs(1.0 - total) < 1e-6);
}
