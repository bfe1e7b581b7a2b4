#include "sing/coupled_solver.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace sing {

namespace k = kernels;

namespace {

double sup_interior(const Mesh& mesh, const std::vector<double>& v) {
  const auto& g = mesh.geom;
  return k::sup_abs(v.data(), g.first_interior, g.last_interior + 1, k::default_exec());
}

double rel_change(const Mesh& mesh, const GridFunction& a, const GridFunction& b) {
  const auto& g = mesh.geom;
  const double d = k::sup_diff(a.values.data(), b.values.data(), g.first_interior,
                               g.last_interior + 1, k::default_exec());
  return d / std::max(sup_interior(mesh, b.values), 1e-300);
}

// envelope slack exponent for a log-corrected component, half the structural
// margin consumed by the other equation
double envelope_eps(const ExponentTuple& e, Component which) {
  const double cap = 2.0 - 1.0 / e.m;
  double eps;
  if (which == Component::u)
    eps = 0.5 * (cap - (e.s * (1.0 - 1.0 / e.m) - e.r)) / e.r;
  else
    eps = 0.5 * (cap - (e.p * (1.0 - 1.0 / e.m) + e.q)) / e.q;
  return std::clamp(eps, 0.01, 0.45);
}

void fill_envelopes(const MeshPtr& mesh, const DecayLaw& law, double eps,
                    double lo_c, double hi_c, GridFunction& lower,
                    GridFunction& upper) {
  lower = GridFunction(mesh);
  upper = GridFunction(mesh);
  const auto& g = mesh->geom;
  for (int i = g.first_interior; i <= g.last_interior; ++i) {
    const double d = mesh->delta[i];
    if (law.log_power) {
      lower[i] = lo_c * d;
      upper[i] = hi_c * std::pow(d, 1.0 - eps);
    } else {
      lower[i] = lo_c * std::pow(d, law.power);
      upper[i] = hi_c * std::pow(d, law.power);
    }
  }
}

GridFunction geometric_mean(const GridFunction& a, const GridFunction& b) {
  GridFunction out(a.mesh);
  const auto& g = a.mesh->geom;
  for (int i = g.first_interior; i <= g.last_interior; ++i)
    out[i] = std::sqrt(a[i] * b[i]);
  return out;
}

GridFunction scaled(const GridFunction& a, double c) {
  GridFunction out = a;
  for (auto& v : out.values) v *= c;
  return out;
}

struct BandViolation {
  double u_low = 1.0, u_high = 1.0, v_low = 1.0, v_high = 1.0;  // worst ratios
  bool any() const {
    return u_low < 1.0 || u_high > 1.0 || v_low < 1.0 || v_high > 1.0;
  }
};

BandViolation check_band(const InvariantBand& band, const SystemState& st) {
  BandViolation out;
  const auto& g = st.u.mesh->geom;
  for (int i = g.first_interior; i <= g.last_interior; ++i) {
    out.u_low = std::min(out.u_low, st.u[i] / band.u_lower[i]);
    out.u_high = std::max(out.u_high, st.u[i] / band.u_upper[i]);
    out.v_low = std::min(out.v_low, st.v[i] / band.v_lower[i]);
    out.v_high = std::max(out.v_high, st.v[i] / band.v_upper[i]);
  }
  return out;
}

}  // namespace

bool InvariantBand::contains(const SystemState& st, double rel_slack) const {
  const auto& g = st.u.mesh->geom;
  const double su = rel_slack * sup_interior(*st.u.mesh, u_upper.values);
  const double sv = rel_slack * sup_interior(*st.v.mesh, v_upper.values);
  for (int i = g.first_interior; i <= g.last_interior; ++i) {
    if (st.u[i] < u_lower[i] - su || st.u[i] > u_upper[i] + su) return false;
    if (st.v[i] < v_lower[i] - sv || st.v[i] > v_upper[i] + sv) return false;
  }
  return true;
}

InvariantBand build_band(const ExponentTuple& e, const RegimePrediction& pred,
                         const MeshPtr& mesh) {
  if (!pred.covered())
    throw std::invalid_argument("cannot build an invariant band for NotCovered");
  InvariantBand band;
  band.eps_u = pred.u_law->log_power ? envelope_eps(e, Component::u) : 0.0;
  band.eps_v = pred.v_law->log_power ? envelope_eps(e, Component::v) : 0.0;
  fill_envelopes(mesh, *pred.u_law, band.eps_u, band.c1, band.c2, band.u_lower,
                 band.u_upper);
  fill_envelopes(mesh, *pred.v_law, band.eps_v, band.m1, band.m2, band.v_lower,
                 band.v_upper);
  return band;
}

ScalarProblem frozen_u_problem(const GridFunction& v, const ExponentTuple& e,
                               const RegimePrediction& pred) {
  ScalarProblem prob;
  prob.mesh = v.mesh;
  prob.m = e.m;
  prob.p_exp = e.p;
  prob.barrier_law = *pred.u_law;
  GridFunction w(v.mesh);
  const auto& g = v.mesh->geom;
  for (int i = g.first_interior; i <= g.last_interior; ++i)
    w[i] = std::pow(v[i], -e.q);
  prob.weight.q_exp = e.q * pred.v_law->power;  // shape metadata
  prob.weight.tabulated = std::move(w);
  return prob;
}

ScalarProblem frozen_v_problem(const GridFunction& u, const ExponentTuple& e,
                               const RegimePrediction& pred) {
  ScalarProblem prob;
  prob.mesh = u.mesh;
  prob.m = e.m;
  prob.p_exp = e.s;
  prob.barrier_law = *pred.v_law;
  GridFunction w(u.mesh);
  const auto& g = u.mesh->geom;
  for (int i = g.first_interior; i <= g.last_interior; ++i)
    w[i] = std::pow(u[i], e.r);
  prob.weight.q_exp = -e.r * pred.u_law->power;
  prob.weight.tabulated = std::move(w);
  return prob;
}

SystemState apply_T(const SystemState& state, const ExponentTuple& e,
                    const RegimePrediction& pred, const SystemSettings& settings) {
  const MeshPtr mesh = state.u.mesh;
  SystemState next;
  next.iter = state.iter + 1;
  next.history = state.history;

  ScalarSolveReport rep_u, rep_v;
  try {
    auto sol = solve_scalar(frozen_u_problem(state.v, e, pred), settings.newton,
                            &state.u);
    next.u = std::move(sol.u);
    rep_u = sol.report;
  } catch (const std::exception& ex) {
    throw std::runtime_error(std::string("u-component solve failed: ") + ex.what());
  }
  try {
    auto sol = solve_scalar(frozen_v_problem(state.u, e, pred), settings.newton,
                            &state.v);
    next.v = std::move(sol.u);
    rep_v = sol.report;
  } catch (const std::exception& ex) {
    throw std::runtime_error(std::string("v-component solve failed: ") + ex.what());
  }

  IterationRecord rec;
  rec.du = rel_change(*mesh, next.u, state.u);
  rec.dv = rel_change(*mesh, next.v, state.v);
  rec.residual_u = rep_u.residual_node_rel;
  rec.residual_v = rep_v.residual_node_rel;
  next.history.push_back(rec);
  return next;
}

std::pair<double, double> system_residuals(const SystemState& state,
                                           const ExponentTuple& e) {
  const Mesh& mesh = *state.u.mesh;
  const auto& g = mesh.geom;
  GridFunction mlap_u = minus_m_laplacian(state.u, e.m);
  GridFunction mlap_v = minus_m_laplacian(state.v, e.m);
  double ru = 0.0, rv = 0.0;
  for (int i = g.first_interior; i <= g.last_interior; ++i) {
    const double fu = std::pow(state.u[i], -e.p) * std::pow(state.v[i], -e.q);
    const double fv = std::pow(state.u[i], e.r) * std::pow(state.v[i], -e.s);
    ru = std::max(ru, std::fabs(mlap_u[i] - fu) / std::fabs(fu));
    rv = std::max(rv, std::fabs(mlap_v[i] - fv) / std::fabs(fv));
  }
  return {ru, rv};
}

SystemSolution solve_system(const ExponentTuple& e, const MeshPtr& mesh,
                            const SystemSettings& settings, const SystemState* init) {
  const RegimePrediction pred = classify(e);
  if (!pred.covered())
    throw std::invalid_argument("exponent tuple is not covered by any case");

  SystemSolution out;
  SystemReport& rep = out.report;
  rep.prediction = pred;
  InvariantBand band = build_band(e, pred, mesh);

  for (int refit = 0;; ++refit) {
    SystemState state;
    if (init) {
      state.u = init->u;
      state.v = init->v;
    } else {
      state.u = geometric_mean(band.u_lower, band.u_upper);
      state.v = geometric_mean(band.v_lower, band.v_upper);
    }

    bool run_in_band = band.contains(state);
    BandViolation worst = check_band(band, state);
    bool converged = false;
    while (state.iter < settings.max_outer) {
      state = apply_T(state, e, pred, settings);
      const bool inside = band.contains(state);
      state.history.back().in_band = inside;
      run_in_band = run_in_band && inside;
      const BandViolation bv = check_band(band, state);
      worst.u_low = std::min(worst.u_low, bv.u_low);
      worst.u_high = std::max(worst.u_high, bv.u_high);
      worst.v_low = std::min(worst.v_low, bv.v_low);
      worst.v_high = std::max(worst.v_high, bv.v_high);
      const auto& last = state.history.back();
      if (std::max(last.du, last.dv) < settings.tol_fp) {
        converged = true;
        break;
      }
    }

    if (run_in_band || !settings.refit_restart || refit >= settings.max_band_refits) {
      rep.converged = converged;
      rep.iters = state.iter;
      rep.band_refits = refit;
      rep.band_ok = run_in_band;
      if (!state.history.empty()) {
        rep.final_du = state.history.back().du;
        rep.final_dv = state.history.back().dv;
      }
      std::tie(rep.residual_u, rep.residual_v) = system_residuals(state, e);
      rep.band = band;
      out.state = std::move(state);
      return out;
    }

    // widen whichever side the iterates crossed and start over
    if (worst.u_low < 1.0) band.c1 *= 0.5;
    if (worst.u_high > 1.0) band.c2 *= 2.0;
    if (worst.v_low < 1.0) band.m1 *= 0.5;
    if (worst.v_high > 1.0) band.m2 *= 2.0;
    fill_envelopes(mesh, *pred.u_law, band.eps_u, band.c1, band.c2, band.u_lower,
                   band.u_upper);
    fill_envelopes(mesh, *pred.v_law, band.eps_v, band.m1, band.m2, band.v_lower,
                   band.v_upper);
  }
}

UniquenessReport uniqueness_probe(const ExponentTuple& e, const MeshPtr& mesh,
                                  const SystemSettings& settings) {
  const RegimePrediction pred = classify(e);
  if (!pred.uniqueness)
    throw std::invalid_argument("uniqueness probe requires a uniqueness regime");
  const InvariantBand band = build_band(e, pred, mesh);

  SystemState a, b;
  a.u = scaled(band.u_lower, 0.5);
  a.v = scaled(band.v_lower, 0.5);
  b.u = scaled(band.u_upper, 2.0);
  b.v = scaled(band.v_upper, 2.0);

  const auto& g = mesh->geom;
  auto ratio = [&](const SystemState& x, const SystemState& y) {
    const double r1 = k::sup_ratio(x.u.values.data(), y.u.values.data(),
                                   g.first_interior, g.last_interior + 1,
                                   k::default_exec());
    const double r2 = k::sup_ratio(y.u.values.data(), x.u.values.data(),
                                   g.first_interior, g.last_interior + 1,
                                   k::default_exec());
    return std::max(r1, r2);
  };

  UniquenessReport rep;
  rep.scaling_ratio.push_back(ratio(a, b));
  bool a_done = false, b_done = false;
  for (int it = 0; it < settings.max_outer && !(a_done && b_done); ++it) {
    a = apply_T(a, e, pred, settings);
    b = apply_T(b, e, pred, settings);
    rep.scaling_ratio.push_back(ratio(a, b));
    a_done = std::max(a.history.back().du, a.history.back().dv) < settings.tol_fp;
    b_done = std::max(b.history.back().du, b.history.back().dv) < settings.tol_fp;
    rep.iters = it + 1;
  }
  rep.both_converged = a_done && b_done;

  const double du = rel_change(*mesh, a.u, b.u);
  const double dv = rel_change(*mesh, a.v, b.v);
  rep.distance = std::max(du, dv);
  return rep;
}

void write_history_csv(const std::vector<IterationRecord>& history,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "iter,du,dv,residual_u,residual_v\n";
  out.precision(17);
  for (size_t i = 0; i < history.size(); ++i)
    out << i + 1 << ',' << history[i].du << ',' << history[i].dv << ','
        << history[i].residual_u << ',' << history[i].residual_v << '\n';
}

}  // namespace sing
