#include "sing/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace sing {

namespace {

using njson = nlohmann::json;

njson load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  njson j;
  try {
    in >> j;
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("config parse failure: ") + ex.what());
  }
  return j;
}

DomainSpec parse_domain(const njson& j) {
  DomainSpec d;
  if (!j.contains("kind")) return d;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "interval") d.kind = DomainKind::interval;
  else if (kind == "radial_ball") d.kind = DomainKind::radial_ball;
  else throw ConfigError("unknown domain kind: " + kind);
  d.space_dim = j.value("space_dim", 1);
  if (d.space_dim < 1) throw ConfigError("space_dim must be >= 1");
  return d;
}

void apply_newton_overrides(const njson& j, NewtonSettings& n) {
  n.tol_residual = j.value("tol_residual", n.tol_residual);
  n.tol_step = j.value("tol_step", n.tol_step);
  n.max_iter = j.value("max_iter", n.max_iter);
  n.backtrack_factor = j.value("backtrack_factor", n.backtrack_factor);
  n.max_fallback_sweeps = j.value("max_fallback_sweeps", n.max_fallback_sweeps);
  if (n.tol_residual <= 0 || n.tol_step <= 0 || n.max_iter < 1)
    throw ConfigError("solver tolerances must be positive and max_iter >= 1");
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& path) {
  const njson j = load(path);
  ExperimentConfig cfg;
  try {
    const auto& e = j.at("exponents");
    cfg.exponents.m = e.at("m").get<double>();
    cfg.exponents.p = e.at("p").get<double>();
    cfg.exponents.q = e.at("q").get<double>();
    cfg.exponents.r = e.at("r").get<double>();
    cfg.exponents.s = e.at("s").get<double>();
    if (j.contains("domain")) cfg.domain = parse_domain(j.at("domain"));
    cfg.base_n = j.value("base_n", cfg.base_n);
    cfg.levels = j.value("levels", cfg.levels);
    if (j.contains("grading")) cfg.grading = j.at("grading").get<double>();
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      apply_newton_overrides(s, cfg.system.newton);
      cfg.system.tol_fp = s.value("tol_fp", cfg.system.tol_fp);
      cfg.system.max_outer = s.value("max_outer", cfg.system.max_outer);
    }
    if (j.contains("tau_grid"))
      cfg.tau_grid = j.at("tau_grid").get<std::vector<double>>();
    cfg.seed = j.value("seed", 0u);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("bad experiment config: ") + ex.what());
  }
  if (!cfg.exponents.well_formed())
    throw ConfigError("exponents must satisfy m > 1 and p, q, r, s > 0");
  if (cfg.base_n < 64) throw ConfigError("base_n must be >= 64");
  if (cfg.levels < 1 || cfg.levels > 6) throw ConfigError("levels must be in [1, 6]");
  if (cfg.grading && *cfg.grading < 1.0) throw ConfigError("grading must be >= 1");
  return cfg;
}

ScalarConfig parse_scalar_config(const std::string& path) {
  const njson j = load(path);
  ScalarConfig cfg;
  try {
    cfg.m = j.at("m").get<double>();
    cfg.p_exp = j.value("p_exp", 0.0);
    if (j.contains("weight")) {
      const auto& w = j.at("weight");
      cfg.weight.q_exp = w.value("q_exp", 0.0);
      if (w.contains("log_exp") && !w.at("log_exp").is_null())
        cfg.weight.log_exp = w.at("log_exp").get<double>();
      cfg.weight.scale = w.value("scale", 1.0);
      if (w.contains("tabulated_csv"))
        cfg.tabulated_csv = w.at("tabulated_csv").get<std::string>();
    }
    if (j.contains("manufactured_a"))
      cfg.manufactured_a = j.at("manufactured_a").get<double>();
    if (j.contains("domain")) cfg.domain = parse_domain(j.at("domain"));
    cfg.n = j.value("n", cfg.n);
    cfg.grading = j.value("grading", cfg.grading);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    if (j.contains("solver")) apply_newton_overrides(j.at("solver"), cfg.newton);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("bad scalar config: ") + ex.what());
  }
  if (cfg.m <= 1.0) throw ConfigError("m must be > 1");
  if (cfg.p_exp < 0.0) throw ConfigError("p_exp must be >= 0");
  if (cfg.weight.scale <= 0.0) throw ConfigError("weight scale must be > 0");
  if (cfg.weight.log_exp && cfg.weight.q_exp != 1.0)
    throw ConfigError("log-corrected weights require q_exp = 1");
  if (cfg.n < 4 || cfg.n % 2 != 0) throw ConfigError("n must be even and >= 4");
  if (cfg.grading < 1.0) throw ConfigError("grading must be >= 1");
  return cfg;
}

SweepConfig parse_sweep_config(const std::string& path) {
  const njson j = load(path);
  SweepConfig cfg;
  try {
    auto grab = [&](const char* key, std::vector<double>& dst) {
      dst = j.at(key).get<std::vector<double>>();
      if (dst.empty()) throw ConfigError(std::string(key) + " grid is empty");
    };
    grab("m", cfg.m);
    grab("p", cfg.p);
    grab("q", cfg.q);
    grab("r", cfg.r);
    grab("s", cfg.s);
    cfg.output_csv = j.value("output_csv", cfg.output_csv);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("bad sweep config: ") + ex.what());
  }
  return cfg;
}

double default_grading(const RegimePrediction& pred) {
  double alpha_min = 1.0;
  if (pred.u_law) alpha_min = std::min(alpha_min, pred.u_law->power);
  if (pred.v_law) alpha_min = std::min(alpha_min, pred.v_law->power);
  return std::max(1.0, 2.0 / alpha_min);
}

}  // namespace sing
