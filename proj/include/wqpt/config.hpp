#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wqpt/io.hpp"
#include "wqpt/sweep.hpp"

namespace wqpt {

// Collects every schema violation, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "config invalid:";
    for (const auto& e : v) s += "\n  - " + e;
    return s;
  }
  std::vector<std::string> violations_;
};

struct RunConfig {
  SweepSpec spec;
  std::string csv_path;     // optional output override
  std::string report_path;  // optional output override
  nlohmann::json echo;      // defaults materialized, written to provenance headers
};

namespace detail {

struct ModelSchema {
  std::set<std::string> controls;
  std::map<std::string, double> fixed_defaults;  // allowed fixed params
  bool integer_sizes = true;
  double min_size = 1.0;
  bool line_allowed = false;
};

inline const std::map<std::string, ModelSchema>& model_schemas() {
  static const std::map<std::string, ModelSchema> schemas = {
      {"cusp", {{"u", "v"}, {{"u", 0.0}, {"v", 0.0}}, false, 0.0, false}},
      {"dicke", {{"lambda"}, {{"omega", 1.0}, {"omega0", 1.0}}, true, 1.0, false}},
      {"lmg", {{"gamma_x", "gamma_y"}, {{"omega", 0.5}}, true, 2.0, true}},
      {"ibmlmg", {{"x"}, {{"y", 0.0}}, true, 1.0, false}},
      {"vibron2d", {{"xi"}, {{"l", 0.0}}, true, 2.0, false}},
  };
  return schemas;
}

// Parses "name = [a*]control [+-] b" or "name = b" into a LinkedLine.
inline std::optional<LinkedLine> parse_line(const std::string& text,
                                            const std::string& control, std::string* err) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  const auto eq = s.find('=');
  if (eq == std::string::npos) {
    *err = "line constraint must look like 'name=-" + control + "+c'";
    return std::nullopt;
  }
  LinkedLine line;
  line.target = s.substr(0, eq);
  std::string rhs = s.substr(eq + 1);
  const auto cpos = rhs.find(control);
  if (cpos == std::string::npos) {
    try {
      line.slope = 0.0;
      line.intercept = std::stod(rhs);
      return line;
    } catch (...) {
      *err = "line constraint mentions neither the control nor a constant: " + text;
      return std::nullopt;
    }
  }
  std::string pre = rhs.substr(0, cpos);
  std::string post = rhs.substr(cpos + control.size());
  if (pre.empty() || pre == "+") {
    line.slope = 1.0;
  } else if (pre == "-") {
    line.slope = -1.0;
  } else {
    if (!pre.empty() && pre.back() == '*') pre.pop_back();
    try {
      line.slope = std::stod(pre);
    } catch (...) {
      *err = "cannot parse slope in line constraint: " + text;
      return std::nullopt;
    }
  }
  if (post.empty()) {
    line.intercept = 0.0;
  } else {
    try {
      line.intercept = std::stod(post);
    } catch (...) {
      *err = "cannot parse intercept in line constraint: " + text;
      return std::nullopt;
    }
  }
  return line;
}

inline void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                       const std::string& where, std::vector<std::string>* errors) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (allowed.find(it.key()) == allowed.end())
      errors->push_back(where + ": unknown key '" + it.key() + "'");
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  std::vector<std::string> errors;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError({std::string("malformed JSON: ") + e.what()});
  }
  if (!j.is_object()) throw ConfigError({"top level must be an object"});

  detail::check_keys(j,
                     {"model", "params", "trajectory", "sizes", "tolerances", "levels",
                      "workers", "output"},
                     "top level", &errors);

  RunConfig cfg;
  const auto& schemas = detail::model_schemas();
  const detail::ModelSchema* schema = nullptr;
  if (!j.contains("model") || !j["model"].is_string()) {
    errors.push_back("'model' (string) is required");
  } else {
    cfg.spec.model = j["model"].get<std::string>();
    const auto it = schemas.find(cfg.spec.model);
    if (it == schemas.end())
      errors.push_back("unknown model tag '" + cfg.spec.model +
                       "' (expected cusp, dicke, lmg, ibmlmg or vibron2d)");
    else
      schema = &it->second;
  }

  if (schema != nullptr) {
    for (const auto& [k, v] : schema->fixed_defaults) cfg.spec.fixed[k] = v;
    if (j.contains("params")) {
      if (!j["params"].is_object()) {
        errors.push_back("'params' must be an object");
      } else {
        for (auto it = j["params"].begin(); it != j["params"].end(); ++it) {
          if (schema->fixed_defaults.find(it.key()) == schema->fixed_defaults.end()) {
            errors.push_back("params: '" + it.key() + "' is not a fixed parameter of " +
                             cfg.spec.model);
          } else if (!it.value().is_number()) {
            errors.push_back("params." + it.key() + " must be a number");
          } else {
            cfg.spec.fixed[it.key()] = it.value().get<double>();
          }
        }
      }
    }
  }

  if (!j.contains("trajectory") || !j["trajectory"].is_object()) {
    errors.push_back("'trajectory' (object) is required");
  } else {
    const auto& t = j["trajectory"];
    detail::check_keys(t, {"control", "start", "stop", "steps", "line"}, "trajectory",
                       &errors);
    if (!t.contains("control") || !t["control"].is_string())
      errors.push_back("trajectory.control (string) is required");
    else
      cfg.spec.trajectory.control = t["control"].get<std::string>();
    for (const char* key : {"start", "stop"}) {
      if (!t.contains(key) || !t[key].is_number())
        errors.push_back(std::string("trajectory.") + key + " (number) is required");
    }
    if (t.contains("start") && t["start"].is_number())
      cfg.spec.trajectory.start = t["start"].get<double>();
    if (t.contains("stop") && t["stop"].is_number())
      cfg.spec.trajectory.stop = t["stop"].get<double>();
    if (!t.contains("steps") || !t["steps"].is_number_integer())
      errors.push_back("trajectory.steps (integer) is required");
    else {
      cfg.spec.trajectory.steps = t["steps"].get<int>();
      if (cfg.spec.trajectory.steps < 8) errors.push_back("trajectory.steps must be >= 8");
    }
    if (schema != nullptr && !cfg.spec.trajectory.control.empty() &&
        schema->controls.find(cfg.spec.trajectory.control) == schema->controls.end())
      errors.push_back("control '" + cfg.spec.trajectory.control + "' is not sweepable for " +
                       cfg.spec.model);
    if (t.contains("line")) {
      if (schema != nullptr && !schema->line_allowed) {
        errors.push_back("trajectory.line is only meaningful for the lmg model");
      } else if (!t["line"].is_string()) {
        errors.push_back("trajectory.line must be a string");
      } else {
        std::string err;
        const auto line =
            detail::parse_line(t["line"].get<std::string>(), cfg.spec.trajectory.control, &err);
        if (!line)
          errors.push_back(err);
        else {
          cfg.spec.trajectory.line = *line;
          if (cfg.spec.model == "lmg") {
            const std::string other =
                cfg.spec.trajectory.control == "gamma_x" ? "gamma_y" : "gamma_x";
            if (line->target != other)
              errors.push_back("trajectory.line must constrain " + other);
          }
        }
      }
    }
  }

  if (!j.contains("sizes") || !j["sizes"].is_array() || j["sizes"].empty()) {
    errors.push_back("'sizes' (non-empty array) is required");
  } else if (schema != nullptr) {
    for (const auto& s : j["sizes"]) {
      if (!s.is_number()) {
        errors.push_back("sizes: entries must be numbers");
        continue;
      }
      const double v = s.get<double>();
      if (schema->integer_sizes && v != std::floor(v))
        errors.push_back("sizes: " + cfg.spec.model + " sizes must be integers");
      if (schema->integer_sizes && v < schema->min_size)
        errors.push_back("sizes: " + cfg.spec.model + " requires N >= " +
                         std::to_string(int(schema->min_size)));
      if (!schema->integer_sizes && v <= 0.0)
        errors.push_back("sizes: cusp K values must be positive");
      cfg.spec.sizes.push_back(v);
    }
  }

  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) {
      errors.push_back("'tolerances' must be an object");
    } else {
      const auto& t = j["tolerances"];
      detail::check_keys(t, {"eig_tol", "w_tol", "norm_tol", "e_tol", "tail_tol"},
                         "tolerances", &errors);
      auto grab = [&](const char* key, double* dst) {
        if (!t.contains(key)) return;
        if (!t[key].is_number() || t[key].get<double>() <= 0.0)
          errors.push_back(std::string("tolerances.") + key + " must be a positive number");
        else
          *dst = t[key].get<double>();
      };
      grab("eig_tol", &cfg.spec.tol.eig_tol);
      grab("w_tol", &cfg.spec.quad.w_tol);
      grab("norm_tol", &cfg.spec.quad.norm_tol);
      grab("e_tol", &cfg.spec.tol.e_tol);
      grab("tail_tol", &cfg.spec.tol.tail_tol);
    }
  }

  if (j.contains("levels")) {
    if (!j["levels"].is_number_integer() || j["levels"].get<int>() < 1)
      errors.push_back("'levels' must be a positive integer");
    else
      cfg.spec.levels = j["levels"].get<int>();
  }
  if (j.contains("workers")) {
    if (!j["workers"].is_number_integer() || j["workers"].get<int>() < 0)
      errors.push_back("'workers' must be a non-negative integer (0 = hardware)");
    else
      cfg.spec.workers = j["workers"].get<int>();
  }
  if (j.contains("output")) {
    if (!j["output"].is_object()) {
      errors.push_back("'output' must be an object");
    } else {
      detail::check_keys(j["output"], {"csv", "report"}, "output", &errors);
      if (j["output"].contains("csv")) cfg.csv_path = j["output"]["csv"].get<std::string>();
      if (j["output"].contains("report"))
        cfg.report_path = j["output"]["report"].get<std::string>();
    }
  }

  // model-specific range checks
  if (schema != nullptr && cfg.spec.model == "ibmlmg") {
    const double lo = std::min(cfg.spec.trajectory.start, cfg.spec.trajectory.stop);
    const double hi = std::max(cfg.spec.trajectory.start, cfg.spec.trajectory.stop);
    if (lo < 0.0 || hi > 1.0) errors.push_back("ibmlmg: x range must stay within [0, 1]");
    if (cfg.spec.fixed.count("y") && cfg.spec.fixed["y"] < 0.0)
      errors.push_back("ibmlmg: y must be non-negative");
  }
  if (schema != nullptr && cfg.spec.model == "vibron2d") {
    for (double s : cfg.spec.sizes) {
      const int N = int(s);
      const int l = int(std::lround(cfg.spec.fixed.count("l") ? cfg.spec.fixed["l"] : 0.0));
      if (std::abs(l) > N) errors.push_back("vibron2d: |l| exceeds N=" + std::to_string(N));
    }
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));

  // canonical echo with all defaults materialized
  nlohmann::json echo;
  echo["model"] = cfg.spec.model;
  echo["params"] = cfg.spec.fixed;
  echo["trajectory"] = {{"control", cfg.spec.trajectory.control},
                        {"start", cfg.spec.trajectory.start},
                        {"stop", cfg.spec.trajectory.stop},
                        {"steps", cfg.spec.trajectory.steps}};
  if (cfg.spec.trajectory.line) {
    const auto& l = *cfg.spec.trajectory.line;
    echo["trajectory"]["line"] = l.target + "=" + fmt17(l.slope) + "*" +
                                 cfg.spec.trajectory.control +
                                 (l.intercept < 0.0 ? "" : "+") + fmt17(l.intercept);
  }
  echo["sizes"] = cfg.spec.sizes;
  echo["tolerances"] = {{"eig_tol", cfg.spec.tol.eig_tol},
                        {"w_tol", cfg.spec.quad.w_tol},
                        {"norm_tol", cfg.spec.quad.norm_tol},
                        {"e_tol", cfg.spec.tol.e_tol},
                        {"tail_tol", cfg.spec.tol.tail_tol}};
  echo["levels"] = cfg.spec.levels;
  echo["workers"] = cfg.spec.workers;
  cfg.echo = echo;
  return cfg;
}

}  // namespace wqpt
