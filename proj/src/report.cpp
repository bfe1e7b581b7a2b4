#include "sing/report.hpp"

#include <cmath>
#include <fstream>

namespace sing {

namespace {
json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}
}  // namespace

json law_json(const DecayLaw& law) {
  json j;
  j["power"] = law.power;
  j["log_power"] = law.log_power ? json(*law.log_power) : json(nullptr);
  return j;
}

json tau_range_json(const TauRange& t) {
  json j;
  j["lower"] = t.lower;
  j["upper"] = finite_or_null(t.upper);
  j["upper_inclusive"] = t.upper_inclusive;
  return j;
}

json classification_json(const RegimePrediction& pred,
                         const std::vector<std::string>& violations) {
  json j;
  if (!violations.empty()) {
    j["case"] = "Invalid";
    j["violations"] = violations;
    return j;
  }
  j["case"] = to_string(pred.case_id);
  if (pred.covered()) {
    j["u_law"] = law_json(*pred.u_law);
    j["v_law"] = law_json(*pred.v_law);
    j["u_tau"] = tau_range_json(*pred.u_tau);
    j["v_tau"] = tau_range_json(*pred.v_tau);
    j["u_smooth_boundary"] = *pred.u_smooth_boundary;
    j["v_smooth_boundary"] = *pred.v_smooth_boundary;
  }
  j["uniqueness"] = pred.uniqueness;
  j["violations"] = violations;  // empty array
  return j;
}

json ratefit_json(const RateFit& fit) {
  json j;
  j["power"] = fit.power;
  j["power_stderr"] = fit.power_stderr;
  j["log_power"] = fit.log_power ? json(*fit.log_power) : json(nullptr);
  j["log_power_stderr"] = fit.log_power ? json(fit.log_power_stderr) : json(nullptr);
  j["raw_power"] = fit.raw_power;
  j["log_slope_raw"] = fit.log_slope_raw;
  j["window"] = {fit.window.delta_min, fit.window.delta_max};
  j["points_used"] = fit.points_used;
  return j;
}

json tauprobe_json(const TauProbe& probe) {
  json j;
  j["tau_grid"] = probe.tau_grid;
  j["energy_by_level"] = probe.energy_by_level;
  j["divergent"] = probe.divergent;
  j["tau_star_estimate"] = finite_or_null(probe.tau_star_estimate);
  if (probe.bracket)
    j["bracket"] = {probe.bracket->first, probe.bracket->second};
  else
    j["bracket"] = nullptr;
  return j;
}

json sandwich_json(const SandwichResult& s) {
  json j;
  j["c_low"] = s.c_low;
  j["c_high"] = s.c_high;
  j["pass"] = s.pass;
  return j;
}

json scalar_report_json(const ScalarSolveReport& rep) {
  json j;
  j["converged"] = rep.converged;
  j["residual"] = rep.residual;
  j["residual_node_rel"] = rep.residual_node_rel;
  j["iters"] = rep.newton_iters;
  j["sigma_stages"] = rep.sigma_stages;
  j["fallback_sweeps"] = rep.fallback_sweeps;
  j["sandwich_ok"] = rep.sandwich_ok;
  j["barriers_used"] = rep.barriers_used;
  j["barrier_c"] = rep.barrier_c;
  return j;
}

json system_report_json(const SystemReport& rep) {
  json j;
  j["converged"] = rep.converged;
  j["iters"] = rep.iters;
  j["band_refits"] = rep.band_refits;
  j["band_ok"] = rep.band_ok;
  j["residual_u"] = rep.residual_u;
  j["residual_v"] = rep.residual_v;
  j["final_du"] = rep.final_du;
  j["final_dv"] = rep.final_dv;
  j["band_constants"] = {{"c1", rep.band.c1},
                         {"c2", rep.band.c2},
                         {"m1", rep.band.m1},
                         {"m2", rep.band.m2},
                         {"eps_u", rep.band.eps_u},
                         {"eps_v", rep.band.eps_v}};
  return j;
}

json uniqueness_json(const UniquenessReport& rep) {
  json j;
  j["distance"] = rep.distance;
  j["iters"] = rep.iters;
  j["both_converged"] = rep.both_converged;
  j["scaling_ratio"] = rep.scaling_ratio;
  return j;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace sing
