#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wqpt/sweep.hpp"
#include "wqpt/version.hpp"

namespace wqpt {

// 17 significant digits, lowercase exponent; round-trips any double exactly.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Sweep CSV: '#'-prefixed provenance header (tool version, full config echo),
// then one row per (size, control) point.
// ---------------------------------------------------------------------------

inline constexpr const char* kSweepCsvColumns =
    "model,size,control_name,control_value,energy0,gap,wehrl,norm_deficit,nodes_used";

inline std::string sweep_csv_text(const SweepResult& result, const std::string& config_echo) {
  std::ostringstream os;
  os << "# wqpt sweep v" << kVersion << "\n";
  if (!config_echo.empty()) os << "# config " << config_echo << "\n";
  for (const auto& warning : result.warnings) os << "# warning " << warning << "\n";
  if (result.partial) os << "# partial true\n# failure " << result.failure << "\n";
  os << kSweepCsvColumns << "\n";
  for (const auto& r : result.rows) {
    os << result.model << ',' << fmt17(r.size) << ',' << result.control_name << ','
       << fmt17(r.control) << ',' << fmt17(r.energy0) << ','
       << (r.gap ? fmt17(*r.gap) : std::string()) << ',' << fmt17(r.wehrl) << ','
       << fmt17(r.norm_deficit) << ',' << r.nodes_used << "\n";
  }
  return os.str();
}

struct ParsedSweepCsv {
  SweepResult result;
  std::string config_echo;
};

inline ParsedSweepCsv parse_sweep_csv(std::istream& in) {
  ParsedSweepCsv out;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string cfg = "# config ";
      if (line.rfind(cfg, 0) == 0) out.config_echo = line.substr(cfg.size());
      if (line.rfind("# partial", 0) == 0) out.result.partial = true;
      continue;
    }
    if (!have_header) {
      if (line != kSweepCsvColumns)
        throw std::runtime_error("sweep csv: unexpected column header: " + line);
      have_header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    fields.push_back(cur);
    if (fields.size() != 9) throw std::runtime_error("sweep csv: malformed row: " + line);
    SweepRow r;
    out.result.model = fields[0];
    r.size = std::stod(fields[1]);
    out.result.control_name = fields[2];
    r.control = std::stod(fields[3]);
    r.energy0 = std::stod(fields[4]);
    if (!fields[5].empty()) r.gap = std::stod(fields[5]);
    r.wehrl = std::stod(fields[6]);
    r.norm_deficit = std::stod(fields[7]);
    r.nodes_used = std::stol(fields[8]);
    out.result.rows.push_back(r);
  }
  if (!have_header) throw std::runtime_error("sweep csv: missing column header");
  return out;
}

inline ParsedSweepCsv read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_sweep_csv(in);
}

// ---------------------------------------------------------------------------
// Transition report JSON
// ---------------------------------------------------------------------------

inline nlohmann::json report_to_json(const TransitionReport& rep,
                                     const SharpeningReport* sharp = nullptr) {
  nlohmann::json j;
  j["order"] = rep.order;
  j["critical_estimate"] = rep.critical_estimate;
  j["plateau_left"] = rep.plateau_left;
  j["plateau_right"] = rep.plateau_right;
  j["height"] = rep.height;
  j["transition_width"] = rep.transition_width;
  j["per_size"] = nlohmann::json::array();
  for (const auto& m : rep.per_size) {
    nlohmann::json e;
    e["size"] = m.size;
    e["order"] = m.order;
    e["critical_estimate"] = m.critical;
    e["plateau_left"] = m.plateau_left;
    e["plateau_right"] = m.plateau_right;
    e["height"] = m.height;
    e["width"] = m.width;
    if (!m.note.empty()) e["note"] = m.note;
    j["per_size"].push_back(e);
  }
  if (!rep.diagnostics.empty()) j["diagnostics"] = rep.diagnostics;
  if (sharp != nullptr) {
    j["sharpens"] = sharp->sharpens;
    j["widths"] = sharp->widths;
    if (sharp->mismatched_orders) j["mismatched_orders"] = true;
  }
  return j;
}

inline TransitionReport report_from_json(const nlohmann::json& j) {
  TransitionReport rep;
  rep.order = j.at("order").get<std::string>();
  rep.critical_estimate = j.at("critical_estimate").get<double>();
  rep.plateau_left = j.at("plateau_left").get<double>();
  rep.plateau_right = j.at("plateau_right").get<double>();
  rep.height = j.at("height").get<double>();
  rep.transition_width = j.at("transition_width").get<double>();
  for (const auto& e : j.at("per_size")) {
    SizeMetrics m;
    m.size = e.at("size").get<double>();
    m.order = e.at("order").get<std::string>();
    m.critical = e.at("critical_estimate").get<double>();
    m.plateau_left = e.at("plateau_left").get<double>();
    m.plateau_right = e.at("plateau_right").get<double>();
    m.height = e.at("height").get<double>();
    m.width = e.at("width").get<double>();
    if (e.contains("note")) m.note = e.at("note").get<std::string>();
    rep.per_size.push_back(m);
  }
  if (j.contains("diagnostics")) rep.diagnostics = j.at("diagnostics").get<std::string>();
  return rep;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace wqpt
