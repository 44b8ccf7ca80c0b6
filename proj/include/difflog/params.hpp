#pragma once

#include <cmath>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "difflog/common.hpp"

namespace difflog {

/// Intrinsic growth rate r(t) = a*exp(-b*(t-1)) + c, defined for t >= 1.
/// A constant rate is the degenerate case a = 0 (or b = 0 with c folded in).
struct GrowthRate {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  static GrowthRate constant(double value) { return GrowthRate{0.0, 0.0, value}; }

  double at(double t) const {
    if (t < 1.0) throw input_error("growth rate requested at t < 1");
    return a * std::exp(-b * (t - 1.0)) + c;
  }

  bool is_constant() const { return a == 0.0 || b == 0.0; }

  // r(t) >= 0 everywhere follows from a, b, c >= 0. A rate that is
  // identically zero is allowed and turns the model into pure diffusion.
  void validate() const {
    if (a < 0.0 || b < 0.0 || c < 0.0)
      throw input_error("growth rate parameters a, b, c must be non-negative");
  }
};

/// Parameter bundle of the diffusive logistic equation
///   dI/dt = d * d2I/dx2 + r(t) * I * (1 - I/K)   on [l, L].
struct DLParams {
  double d = 0.01;   // diffusion rate, distance^2 per hour
  GrowthRate r;      // growth rate per hour
  double K = 25.0;   // carrying capacity, percent
  double l = 1.0;    // domain lower bound, distance units
  double L = 5.0;    // domain upper bound

  void validate() const {
    if (!(d >= 0.0)) throw input_error("diffusion rate d must be >= 0");
    if (!(K > 0.0)) throw input_error("carrying capacity K must be > 0");
    if (!(L > l)) throw input_error("domain bounds must satisfy L > l");
    r.validate();
  }
};

/// r(t) evaluation as a free function; errors for t < 1.
inline double growth_rate(const DLParams& params, double t) { return params.r.at(t); }

// ---------------------------------------------------------------------------
// Solver configuration files (JSON or TOML)
//
// keys: d, K, l, L, dx, dt, t_end and a table r = {a, b, c}.
// The TOML reader covers the flat `key = value` + `[r]` section subset.
// ---------------------------------------------------------------------------

struct SolverConfig {
  DLParams params;
  double dx = 0.05;
  double dt = 0.01;
  int t_end = 6;
  bool has_l = false;  // when absent, [l, L] is taken from the initial profile
  bool has_L = false;
};

namespace detail {

inline SolverConfig config_from_json(const nlohmann::json& j, const std::string& name) {
  SolverConfig cfg;
  try {
    if (j.contains("d")) cfg.params.d = j.at("d").get<double>();
    if (j.contains("K")) cfg.params.K = j.at("K").get<double>();
    if (j.contains("l")) {
      cfg.params.l = j.at("l").get<double>();
      cfg.has_l = true;
    }
    if (j.contains("L")) {
      cfg.params.L = j.at("L").get<double>();
      cfg.has_L = true;
    }
    if (j.contains("r")) {
      const auto& r = j.at("r");
      if (r.is_number()) {
        cfg.params.r = GrowthRate::constant(r.get<double>());
      } else {
        cfg.params.r.a = r.value("a", 0.0);
        cfg.params.r.b = r.value("b", 0.0);
        cfg.params.r.c = r.value("c", 0.0);
      }
    }
    if (j.contains("dx")) cfg.dx = j.at("dx").get<double>();
    if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
    if (j.contains("t_end")) cfg.t_end = j.at("t_end").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw input_error("bad parameter file " + name + ": " + e.what());
  }
  return cfg;
}

inline SolverConfig config_from_toml(std::istream& in, const std::string& name) {
  nlohmann::json j = nlohmann::json::object();
  nlohmann::json* scope = &j;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw input_error(name + ":" + std::to_string(lineno) + ": bad table header");
      auto table = std::string(trim(s.substr(1, s.size() - 2)));
      scope = &(j[table] = nlohmann::json::object());
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw input_error(name + ":" + std::to_string(lineno) + ": expected key = value");
    auto key = std::string(trim(s.substr(0, eq)));
    auto val = trim(s.substr(eq + 1));
    if (auto hash = val.find('#'); hash != std::string_view::npos) val = trim(val.substr(0, hash));
    (*scope)[key] = parse_double(val, name + ":" + std::to_string(lineno));
  }
  return config_from_json(j, name);
}

}  // namespace detail

inline SolverConfig load_solver_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open parameter file: " + path);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml")
    return detail::config_from_toml(in, path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw input_error("bad JSON in " + path + ": " + e.what());
  }
  return detail::config_from_json(j, path);
}

inline nlohmann::json params_to_json(const DLParams& p) {
  return nlohmann::json{{"d", p.d},
                        {"K", p.K},
                        {"l", p.l},
                        {"L", p.L},
                        {"r", {{"a", p.r.a}, {"b", p.r.b}, {"c", p.r.c}}}};
}

}  // namespace difflog
