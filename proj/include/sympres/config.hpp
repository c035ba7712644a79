#pragma once

// Flat `key = value` experiment configs. `[section]` headers start a new
// experiment; keys before the first section set defaults inherited by every
// experiment. Unknown keys are rejected.

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "sympres/errors.hpp"
#include "sympres/spline.hpp"

namespace sympres {

struct ExperimentConfig {
  std::string name = "default";
  std::string spline_preset = "medium";  // or "custom" with explicit params
  SplineParams spline;
  std::string mesh = "uniform";  // uniform | sinusoidal
  int n1 = 20;
  int n2 = 20;
  int dimension = 2;
  double amplitude = 0.05;
  double dt = 0.0;  // <= 0: automatic
  double dt_max = 2e-4;
  double end_time = 10.0;
  double report_interval = 1.0;
  int quad_points = 10;
  std::string outdir = ".";
  unsigned long long seed = 12345;

  SplineParams spline_params() const {
    return spline_preset == "custom" ? spline : SplineParams::preset(spline_preset);
  }

  void validate() const {
    if (mesh != "uniform" && mesh != "sinusoidal")
      throw ConfigError("unknown mesh kind '" + mesh + "'");
    if (dimension != 1 && dimension != 2)
      throw ConfigError("dimension must be 1 or 2");
    if (n1 < 1 || n2 < 1) throw ConfigError("grid size must be positive");
    if (end_time <= 0.0 || report_interval <= 0.0)
      throw ConfigError("end_time and report_interval must be positive");
    if (quad_points < 1) throw ConfigError("quad_points must be positive");
    if (dt_max <= 0.0) throw ConfigError("dt_max must be positive");
    spline_params().validate();
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline void apply_key(ExperimentConfig& c, const std::string& key,
                      const std::string& value, int lineno) {
  auto bad = [&](const std::string& why) {
    throw ConfigError("line " + std::to_string(lineno) + ": " + why);
  };
  auto as_int = [&](const std::string& v) {
    try {
      size_t pos;
      int r = std::stoi(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return r;
    } catch (const std::exception&) {
      bad("expected integer for '" + key + "', got '" + v + "'");
      return 0;
    }
  };
  auto as_real = [&](const std::string& v) {
    try {
      size_t pos;
      double r = std::stod(v, &pos);
      if (pos != v.size() || !std::isfinite(r)) throw std::invalid_argument(v);
      return r;
    } catch (const std::exception&) {
      bad("expected number for '" + key + "', got '" + v + "'");
      return 0.0;
    }
  };

  if (key == "spline") c.spline_preset = value;
  else if (key == "n_span") { c.spline_preset = "custom"; c.spline.n_span = as_int(value); }
  else if (key == "n_cont") { c.spline_preset = "custom"; c.spline.n_cont = as_int(value); }
  else if (key == "order") { c.spline_preset = "custom"; c.spline.order = as_int(value); }
  else if (key == "n_consist") { c.spline_preset = "custom"; c.spline.n_consist = as_int(value); }
  else if (key == "w_max") { c.spline_preset = "custom"; c.spline.w_max = as_real(value); }
  else if (key == "mesh") c.mesh = value;
  else if (key == "n") { c.n1 = c.n2 = as_int(value); }
  else if (key == "n1") c.n1 = as_int(value);
  else if (key == "n2") c.n2 = as_int(value);
  else if (key == "dimension") c.dimension = as_int(value);
  else if (key == "amplitude") c.amplitude = as_real(value);
  else if (key == "dt") c.dt = as_real(value);
  else if (key == "dt_max") c.dt_max = as_real(value);
  else if (key == "end_time") c.end_time = as_real(value);
  else if (key == "report_interval") c.report_interval = as_real(value);
  else if (key == "quad_points") c.quad_points = as_int(value);
  else if (key == "outdir") c.outdir = value;
  else if (key == "seed") c.seed = std::strtoull(value.c_str(), nullptr, 10);
  else bad("unknown key '" + key + "'");
}

}  // namespace detail

inline std::vector<ExperimentConfig> parse_config(std::istream& in) {
  ExperimentConfig defaults;
  std::vector<ExperimentConfig> out;
  bool in_section = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      out.push_back(defaults);
      out.back().name = detail::trim(line.substr(1, line.size() - 2));
      in_section = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    detail::apply_key(in_section ? out.back() : defaults, key, value, lineno);
  }
  if (!in_section) out.push_back(defaults);
  for (const auto& c : out) c.validate();
  return out;
}

inline std::vector<ExperimentConfig> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace sympres
