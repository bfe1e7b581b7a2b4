#include "sing/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "sing/config.hpp"
#include "sing/report.hpp"

namespace sing::cli {

namespace fs = std::filesystem;

namespace {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

json checks_json(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return arr;
}

void print_checks(const std::vector<Check>& checks, std::ostream& out) {
  for (const auto& c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << '\n';
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// log(M_k) must decrease over the trailing `tail` steps (float-noise slack)
bool ratios_decreasing_tail(const std::vector<double>& M, int tail) {
  const int n = static_cast<int>(M.size());
  if (n < 2) return false;
  const int start = std::max(1, n - tail);
  for (int i = start; i < n; ++i)
    if (!(std::log(M[i]) < std::log(M[i - 1]) + 1e-12)) return false;
  return true;
}

bool tau_check(const TauProbe& probe, const TauRange& range) {
  if (!std::isfinite(range.upper) || range.upper <= range.lower + 1e-12)
    return !std::isfinite(probe.tau_star_estimate);
  if (!probe.bracket) return false;
  return probe.bracket->first <= range.upper && range.upper <= probe.bracket->second;
}

json exponents_json(const ExponentTuple& e) {
  return {{"m", e.m}, {"p", e.p}, {"q", e.q}, {"r", e.r}, {"s", e.s}};
}

}  // namespace

int cmd_classify(double m, double p, double q, double r, double s,
                 std::ostream& out) {
  const ExponentTuple e{m, p, q, r, s};
  if (!e.well_formed()) {
    out << json{{"error", "exponents must satisfy m > 1 and p, q, r, s > 0"}}.dump(2)
        << '\n';
    return kExitUsage;
  }
  const auto violations = validate_structural(e);
  if (!violations.empty()) {
    out << classification_json(RegimePrediction{}, violations).dump(2) << '\n';
    return kExitStructuralViolation;
  }
  const RegimePrediction pred = classify(e);
  out << classification_json(pred, {}).dump(2) << '\n';
  return pred.covered() ? kExitOk : kExitNotCovered;
}

int cmd_solve_scalar(const std::string& config_path, std::ostream& out) {
  ScalarConfig cfg;
  try {
    cfg = parse_scalar_config(config_path);
  } catch (const ConfigError& ex) {
    out << json{{"error", ex.what()}}.dump(2) << '\n';
    return kExitUsage;
  }

  // hypothesis gate for analytic weights: p(1-1/m) + q < 2 - 1/m
  if (!cfg.tabulated_csv && !cfg.manufactured_a) {
    const double cap = 2.0 - 1.0 / cfg.m;
    if (!(cfg.p_exp * (1.0 - 1.0 / cfg.m) + cfg.weight.q_exp < cap)) {
      out << json{{"error", "violated: first structural"},
                  {"violations", {"first structural"}}}
                 .dump(2)
          << '\n';
      return kExitStructuralViolation;
    }
  }

  try {
    const MeshPtr mesh = build_graded_mesh(cfg.domain, cfg.n, cfg.grading);
    ScalarProblem prob;
    std::optional<GridFunction> exact;
    if (cfg.manufactured_a) {
      auto mc = make_manufactured(mesh, cfg.m, *cfg.manufactured_a);
      prob = std::move(mc.problem);
      exact = std::move(mc.exact);
    } else {
      prob.mesh = mesh;
      prob.m = cfg.m;
      prob.p_exp = cfg.p_exp;
      prob.weight = cfg.weight;
      if (cfg.tabulated_csv)
        prob.weight.tabulated = read_csv(mesh, *cfg.tabulated_csv);
    }

    const ScalarSolution sol = solve_scalar(prob, cfg.newton);

    fs::create_directories(cfg.output_dir);
    write_csv(sol.u, (fs::path(cfg.output_dir) / "u.csv").string());
    json rep = scalar_report_json(sol.report);
    if (exact) {
      double err = 0.0;
      for (int i = 0; i < sol.u.size(); ++i)
        err = std::max(err, std::fabs(sol.u[i] - (*exact)[i]));
      rep["sup_error"] = err;
    }
    write_json(rep, (fs::path(cfg.output_dir) / "report.json").string());
    out << rep.dump(2) << '\n';
    return sol.report.converged ? kExitOk : kExitSolveFailure;
  } catch (const std::exception& ex) {
    out << json{{"error", ex.what()}}.dump(2) << '\n';
    return kExitSolveFailure;
  }
}

namespace {

int classify_gate(const ExperimentConfig& cfg, RegimePrediction& pred,
                  std::ostream& out) {
  const auto violations = validate_structural(cfg.exponents);
  if (!violations.empty()) {
    out << classification_json(RegimePrediction{}, violations).dump(2) << '\n';
    return kExitStructuralViolation;
  }
  pred = classify(cfg.exponents);
  if (!pred.covered()) {
    out << classification_json(pred, {}).dump(2) << '\n';
    return kExitNotCovered;
  }
  return kExitOk;
}

}  // namespace

int cmd_solve_system(const std::string& config_path, std::ostream& out) {
  ExperimentConfig cfg;
  try {
    cfg = parse_experiment_config(config_path);
  } catch (const ConfigError& ex) {
    out << json{{"error", ex.what()}}.dump(2) << '\n';
    return kExitUsage;
  }
  RegimePrediction pred;
  if (int rc = classify_gate(cfg, pred, out); rc != kExitOk) return rc;

  try {
    const double grading = cfg.grading.value_or(default_grading(pred));
    const MeshPtr mesh = build_graded_mesh(cfg.domain, cfg.base_n, grading);
    const SystemSolution sol = solve_system(cfg.exponents, mesh, cfg.system);

    fs::create_directories(cfg.output_dir);
    write_csv(sol.state.u, (fs::path(cfg.output_dir) / "u.csv").string());
    write_csv(sol.state.v, (fs::path(cfg.output_dir) / "v.csv").string());
    write_history_csv(sol.state.history,
                      (fs::path(cfg.output_dir) / "history.csv").string());
    json rep;
    rep["config"] = {{"exponents", exponents_json(cfg.exponents)},
                     {"n", cfg.base_n},
                     {"grading", grading}};
    rep["classification"] = classification_json(pred, {});
    rep["solve"] = system_report_json(sol.report);
    write_json(rep, (fs::path(cfg.output_dir) / "report.json").string());
    out << rep.dump(2) << '\n';
    return sol.report.converged ? kExitOk : kExitSolveFailure;
  } catch (const std::exception& ex) {
    out << json{{"error", ex.what()}}.dump(2) << '\n';
    return kExitSolveFailure;
  }
}

int cmd_verify(const std::string& config_path, std::ostream& out) {
  ExperimentConfig cfg;
  try {
    cfg = parse_experiment_config(config_path);
  } catch (const ConfigError& ex) {
    out << json{{"error", ex.what()}}.dump(2) << '\n';
    return kExitUsage;
  }
  RegimePrediction pred;
  if (int rc = classify_gate(cfg, pred, out); rc != kExitOk) return rc;

  const double grading = cfg.grading.value_or(default_grading(pred));

  std::vector<MeshPtr> meshes;
  std::vector<SystemSolution> sols;
  try {
    fs::create_directories(cfg.output_dir);
    for (int l = 0; l < cfg.levels; ++l) {
      const int n = cfg.base_n << l;
      MeshPtr mesh = build_graded_mesh(cfg.domain, n, grading);
      const_cast<Mesh&>(*mesh).level = l;
      meshes.push_back(mesh);
      sols.push_back(solve_system(cfg.exponents, mesh, cfg.system));
      const auto tag = "_level" + std::to_string(l + 1);
      write_csv(sols.back().state.u,
                (fs::path(cfg.output_dir) / ("u" + tag + ".csv")).string());
      write_csv(sols.back().state.v,
                (fs::path(cfg.output_dir) / ("v" + tag + ".csv")).string());
      write_history_csv(sols.back().state.history,
                        (fs::path(cfg.output_dir) / ("history" + tag + ".csv")).string());
    }
  } catch (const std::exception& ex) {
    out << json{{"error", ex.what()}}.dump(2) << '\n';
    return kExitSolveFailure;
  }

  const SystemState& top = sols.back().state;
  json rep;
  rep["config"] = {{"exponents", exponents_json(cfg.exponents)},
                   {"base_n", cfg.base_n},
                   {"levels", cfg.levels},
                   {"grading", grading},
                   {"output_dir", cfg.output_dir}};
  rep["classification"] = classification_json(pred, {});
  {
    json lv = json::array();
    for (const auto& s : sols) lv.push_back(system_report_json(s.report));
    rep["levels"] = lv;
  }

  std::vector<Check> checks;
  auto add = [&](std::string name, bool pass, std::string detail = "") {
    checks.push_back({std::move(name), pass, std::move(detail)});
  };

  bool all_conv = true, all_band = true;
  double worst_ru = 0.0, worst_rv = 0.0;
  for (const auto& s : sols) {
    all_conv = all_conv && s.report.converged;
    all_band = all_band && s.report.band_ok;
    worst_ru = std::max(worst_ru, s.report.residual_u);
    worst_rv = std::max(worst_rv, s.report.residual_v);
  }
  add("converged", all_conv);
  add("residual_u_below_1e-6", worst_ru <= 1e-6, "max " + fmt(worst_ru));
  add("residual_v_below_1e-6", worst_rv <= 1e-6, "max " + fmt(worst_rv));
  add("band_containment", all_band);

  try {
    const RateFit fu = fit_boundary_exponent(top.u);
    const RateFit fv = fit_boundary_exponent(top.v);
    rep["rate_u"] = ratefit_json(fu);
    rep["rate_v"] = ratefit_json(fv);
    add("rate_u_within_0.05", std::fabs(fu.power - pred.u_law->power) <= 0.05,
        "fitted " + fmt(fu.power) + " predicted " + fmt(pred.u_law->power));
    add("rate_v_within_0.05", std::fabs(fv.power - pred.v_law->power) <= 0.05,
        "fitted " + fmt(fv.power) + " predicted " + fmt(pred.v_law->power));
    add("log_flag_u",
        fu.log_power.has_value() == pred.u_law->log_power.has_value(),
        "secondary slope " + fmt(fu.log_slope_raw));
    add("log_flag_v",
        fv.log_power.has_value() == pred.v_law->log_power.has_value(),
        "secondary slope " + fmt(fv.log_slope_raw));

    const SandwichResult su = sandwich_check(top.u, *pred.u_law);
    const SandwichResult sv = sandwich_check(top.v, *pred.v_law);
    rep["sandwich_u"] = sandwich_json(su);
    rep["sandwich_v"] = sandwich_json(sv);
    add("sandwich_u", su.pass, "ratio " + fmt(su.c_high / su.c_low));
    add("sandwich_v", sv.pass, "ratio " + fmt(sv.c_high / sv.c_low));
  } catch (const std::exception& ex) {
    add("rate_fits", false, ex.what());
  }

  if (cfg.levels >= 3) {
    const auto grid = cfg.tau_grid.value_or(default_tau_grid(cfg.exponents.m));
    std::vector<GridFunction> us, vs;
    for (const auto& s : sols) {
      us.push_back(s.state.u);
      vs.push_back(s.state.v);
    }
    const TauProbe pu = sobolev_tau_probe(us, grid);
    const TauProbe pv = sobolev_tau_probe(vs, grid);
    rep["tau_u"] = tauprobe_json(pu);
    rep["tau_v"] = tauprobe_json(pv);
    add("tau_u", tau_check(pu, *pred.u_tau),
        "estimate " + fmt(pu.tau_star_estimate));
    add("tau_v", tau_check(pv, *pred.v_tau),
        "estimate " + fmt(pv.tau_star_estimate));
  }

  if (pred.uniqueness) {
    try {
      const UniquenessReport uq =
          uniqueness_probe(cfg.exponents, meshes.front(), cfg.system);
      rep["uniqueness_probe"] = uniqueness_json(uq);
      add("uniqueness_distance_below_1e-4", uq.distance <= 1e-4,
          "distance " + fmt(uq.distance));
      add("uniqueness_ratio_decreasing",
          ratios_decreasing_tail(uq.scaling_ratio, 10));
    } catch (const std::exception& ex) {
      add("uniqueness_probe", false, ex.what());
    }
  }

  bool all_pass = true;
  for (const auto& c : checks) all_pass = all_pass && c.pass;
  rep["checks"] = checks_json(checks);
  rep["pass"] = all_pass;
  write_json(rep, (fs::path(cfg.output_dir) / "verify_report.json").string());
  print_checks(checks, out);
  out << (all_pass ? "PASS" : "FAIL") << " overall\n";
  return all_pass ? kExitOk : kExitSolveFailure;
}

int cmd_sweep(const std::string& config_path, std::ostream& out) {
  SweepConfig cfg;
  try {
    cfg = parse_sweep_config(config_path);
  } catch (const ConfigError& ex) {
    out << json{{"error", ex.what()}}.dump(2) << '\n';
    return kExitUsage;
  }

  std::ofstream csv(cfg.output_csv);
  if (!csv) {
    out << json{{"error", "cannot open for writing: " + cfg.output_csv}}.dump(2)
        << '\n';
    return kExitSolveFailure;
  }
  csv << "m,p,q,r,s,case,u_power,u_log_power,v_power,v_log_power,"
         "u_tau_upper,v_tau_upper,uniqueness,violations\n";
  csv.precision(12);
  int rows = 0;
  for (double m : cfg.m)
    for (double p : cfg.p)
      for (double q : cfg.q)
        for (double r : cfg.r)
          for (double s : cfg.s) {
            csv << m << ',' << p << ',' << q << ',' << r << ',' << s << ',';
            const ExponentTuple e{m, p, q, r, s};
            const auto violations =
                e.well_formed() ? validate_structural(e)
                                : std::vector<std::string>{"ill-formed"};
            if (!violations.empty()) {
              csv << "Invalid,,,,,,,false,";
              for (size_t i = 0; i < violations.size(); ++i)
                csv << (i ? ";" : "") << violations[i];
              csv << '\n';
            } else {
              const RegimePrediction pr = classify(e);
              csv << to_string(pr.case_id) << ',';
              auto law_cols = [&](const std::optional<DecayLaw>& law) {
                if (law) {
                  csv << law->power << ',';
                  if (law->log_power) csv << *law->log_power;
                  csv << ',';
                } else {
                  csv << ",,";
                }
              };
              law_cols(pr.u_law);
              law_cols(pr.v_law);
              auto tau_col = [&](const std::optional<TauRange>& t) {
                if (t && std::isfinite(t->upper)) csv << t->upper;
                else if (t) csv << "inf";
                csv << ',';
              };
              tau_col(pr.u_tau);
              tau_col(pr.v_tau);
              csv << (pr.uniqueness ? "true" : "false") << ",\n";
            }
            ++rows;
          }
  out << json{{"rows", rows}, {"output_csv", cfg.output_csv}}.dump(2) << '\n';
  return kExitOk;
}

}  // namespace sing::cli
