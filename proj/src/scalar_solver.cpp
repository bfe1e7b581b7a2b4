#include "sing/scalar_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sing {

namespace k = kernels;

namespace {

constexpr double kTiny = 1e-300;

double log_offset(const Mesh& mesh) {
  return std::numbers::e * (1.0 + mesh.domain.diameter());
}

// sup over interior nodes
double sup_interior(const Mesh& mesh, const std::vector<double>& v) {
  const auto& g = mesh.geom;
  return k::sup_abs(v.data(), g.first_interior, g.last_interior + 1,
                    k::default_exec());
}

std::vector<double> rhs_values(const Mesh& mesh, const std::vector<double>& K,
                               double p, const std::vector<double>& u) {
  std::vector<double> rhs(u.size(), 0.0);
  const auto& g = mesh.geom;
  for (int i = g.first_interior; i <= g.last_interior; ++i)
    rhs[i] = p == 0.0 ? K[i] : K[i] * std::pow(u[i], -p);
  return rhs;
}

}  // namespace

std::vector<double> SingularWeight::node_values(const Mesh& mesh) const {
  std::vector<double> vals(mesh.nodes.size(), 0.0);
  const auto& g = mesh.geom;
  if (tabulated) {
    if (tabulated->size() != static_cast<int>(vals.size()))
      throw std::invalid_argument("tabulated weight size does not match mesh");
    for (int i = g.first_interior; i <= g.last_interior; ++i)
      vals[i] = tabulated->values[i];
    return vals;
  }
  const double A = log_offset(mesh);
  for (int i = g.first_interior; i <= g.last_interior; ++i) {
    const double d = mesh.delta[i];
    double v = scale * std::pow(d, -q_exp);
    if (log_exp) v *= std::pow(std::log(A / d), -*log_exp);
    vals[i] = v;
  }
  return vals;
}

bool SingularWeight::strictly_positive(const Mesh& mesh) const {
  if (!tabulated) return scale > 0.0;
  const auto& g = mesh.geom;
  for (int i = g.first_interior; i <= g.last_interior; ++i)
    if (!(tabulated->values[i] > 0.0)) return false;
  return true;
}

DecayLaw barrier_law_for(const ScalarProblem& prob) {
  if (prob.barrier_law) return *prob.barrier_law;
  const double m = prob.m, p = prob.p_exp;
  if (prob.weight.log_exp) {
    if (p != 0.0)
      throw std::invalid_argument("log-corrected weights are supported with p = 0 only");
    return DecayLaw{1.0, (1.0 - *prob.weight.log_exp) / (m - 1.0)};
  }
  const double rho = p + prob.weight.q_exp;
  if (std::fabs(rho - 1.0) <= kClassifyEps)
    return DecayLaw{1.0, 1.0 / (m + p - 1.0)};
  if (rho < 1.0) return DecayLaw{1.0, std::nullopt};
  return DecayLaw{(m - prob.weight.q_exp) / (m + p - 1.0), std::nullopt};
}

GridFunction minus_m_laplacian(const GridFunction& u, double m) {
  const Mesh& mesh = *u.mesh;
  GridFunction out(u.mesh);
  std::vector<double> scratch;
  k::minus_mlap(mesh.geom, u.values.data(), m, 0.0, out.values.data(), scratch,
                k::default_exec());
  return out;
}

Barriers build_barriers(const ScalarProblem& prob) {
  const Mesh& mesh = *prob.mesh;
  const auto& g = mesh.geom;
  const DecayLaw law = barrier_law_for(prob);
  const GridFunction phi = boundary_profile(prob.mesh);
  const double A = log_offset(mesh);

  // profile the sub barrier scales down and the lower-exponent profile the
  // super barrier scales up; identical except in the delta^1 regime, where
  // the supersolution needs a strictly sublinear bend near the boundary
  GridFunction prof_sub(prob.mesh), prof_super(prob.mesh);
  if (law.log_power) {
    for (int i = g.first_interior; i <= g.last_interior; ++i)
      prof_sub[i] = phi[i] * std::pow(std::log(A / phi[i]), *law.log_power);
    prof_super = prof_sub;
  } else if (law.power < 1.0) {
    for (int i = g.first_interior; i <= g.last_interior; ++i)
      prof_sub[i] = std::pow(phi[i], law.power);
    prof_super = prof_sub;
  } else {
    const double rho = prob.p_exp + prob.weight.q_exp;
    const double kappa = 1.0 - std::min(0.25, std::max(0.0, 1.0 - rho) / 4.0);
    for (int i = g.first_interior; i <= g.last_interior; ++i) {
      prof_sub[i] = phi[i];
      prof_super[i] = std::pow(phi[i], kappa);
    }
  }

  const std::vector<double> K = prob.weight.node_values(mesh);
  std::vector<double> scratch, mlap(mesh.nodes.size(), 0.0);
  const double p = prob.p_exp;

  auto sub_ok = [&](const GridFunction& sub) {
    k::minus_mlap(g, sub.values.data(), prob.m, 0.0, mlap.data(), scratch,
                  k::default_exec());
    for (int i = g.first_interior; i <= g.last_interior; ++i) {
      const double rhs = p == 0.0 ? K[i] : K[i] * std::pow(sub[i], -p);
      if (mlap[i] > rhs + 1e-12 * (std::fabs(mlap[i]) + std::fabs(rhs))) return false;
    }
    return true;
  };
  auto super_ok = [&](const GridFunction& super) {
    k::minus_mlap(g, super.values.data(), prob.m, 0.0, mlap.data(), scratch,
                  k::default_exec());
    for (int i = g.first_interior; i <= g.last_interior; ++i) {
      const double rhs = p == 0.0 ? K[i] : K[i] * std::pow(super[i], -p);
      if (mlap[i] < rhs - 1e-12 * (std::fabs(mlap[i]) + std::fabs(rhs))) return false;
    }
    return true;
  };

  Barriers out;
  out.law = law;
  GridFunction sub(prob.mesh), super(prob.mesh);
  for (double c = 2.0; c <= 1048576.0 + 0.5; c *= 2.0) {
    for (int i = g.first_interior; i <= g.last_interior; ++i) {
      sub[i] = prof_sub[i] / c;
      super[i] = prof_super[i] * c;
    }
    if (sub_ok(sub) && super_ok(super)) {
      out.sub = std::move(sub);
      out.super = std::move(super);
      out.c = c;
      return out;
    }
  }
  throw BarrierFailure("barrier constant exceeded 2^20 without satisfying the discrete inequalities");
}

namespace {

struct NewtonWork {
  std::vector<double> resid, lower, diag, upper, step, trial, scratch;
  explicit NewtonWork(size_t n)
      : resid(n, 0.0), lower(n, 0.0), diag(n, 0.0), upper(n, 0.0),
        step(n, 0.0), trial(n, 0.0) {}
};

enum class StageStatus { converged, stalled, out_of_iters };

// One Newton run at fixed sigma. u is updated in place.
StageStatus newton_stage(const ScalarProblem& prob, const std::vector<double>& K,
                         double sigma, const NewtonSettings& st,
                         const std::vector<double>* lo_bound,
                         const std::vector<double>* hi_bound,
                         std::vector<double>& u, int& iters_used) {
  const Mesh& mesh = *prob.mesh;
  const auto& g = mesh.geom;
  const auto exec = k::default_exec();
  NewtonWork w(u.size());

  for (int it = 0; it < st.max_iter; ++it) {
    k::newton_rows(g, u.data(), prob.m, sigma, K.data(), prob.p_exp,
                   w.resid.data(), w.lower.data(), w.diag.data(), w.upper.data(),
                   w.scratch, exec);
    const double res = sup_interior(mesh, w.resid);
    const auto rhs = rhs_values(mesh, K, prob.p_exp, u);
    const double rhs_sup = sup_interior(mesh, rhs);
    if (res <= st.tol_residual * std::max(rhs_sup, kTiny)) {
      iters_used += it;
      return StageStatus::converged;
    }

    for (size_t i = 0; i < u.size(); ++i) w.step[i] = -w.resid[i];
    k::thomas_solve(g, w.lower.data(), w.diag.data(), w.upper.data(),
                    w.step.data(), w.step.data());

    // largest step fraction keeping the iterate inside the sandwich box
    double alpha = 1.0;
    if (lo_bound && hi_bound) {
      for (int i = g.first_interior; i <= g.last_interior; ++i) {
        const double d = w.step[i];
        if (d < 0.0) alpha = std::min(alpha, 0.999 * ((*lo_bound)[i] - u[i]) / d);
        else if (d > 0.0) alpha = std::min(alpha, 0.999 * ((*hi_bound)[i] - u[i]) / d);
      }
      if (!(alpha > 1e-14)) {
        iters_used += it;
        return StageStatus::stalled;
      }
    }

    bool accepted = false;
    while (alpha > 1e-13) {
      w.trial = u;
      for (int i = g.first_interior; i <= g.last_interior; ++i)
        w.trial[i] = u[i] + alpha * w.step[i];
      k::newton_rows(g, w.trial.data(), prob.m, sigma, K.data(), prob.p_exp,
                     w.resid.data(), w.lower.data(), w.diag.data(), w.upper.data(),
                     w.scratch, exec);
      const double res_new = sup_interior(mesh, w.resid);
      if (std::isfinite(res_new) && res_new <= (1.0 - 1e-4 * alpha) * res) {
        accepted = true;
        break;
      }
      alpha *= st.backtrack_factor;
    }
    if (!accepted) {
      iters_used += it + 1;
      return StageStatus::stalled;
    }

    const double step_sup = alpha * sup_interior(mesh, w.step);
    u = w.trial;
    if (step_sup <= st.tol_step * std::max(sup_interior(mesh, u), kTiny)) {
      iters_used += it + 1;
      return StageStatus::converged;
    }
  }
  iters_used += st.max_iter;
  return StageStatus::out_of_iters;
}

void final_residuals(const ScalarProblem& prob, const std::vector<double>& K,
                     const std::vector<double>& u, ScalarSolveReport& rep) {
  const Mesh& mesh = *prob.mesh;
  const auto& g = mesh.geom;
  std::vector<double> mlap(u.size(), 0.0), scratch;
  k::minus_mlap(g, u.data(), prob.m, 0.0, mlap.data(), scratch, k::default_exec());
  const auto rhs = rhs_values(mesh, K, prob.p_exp, u);
  const double rhs_sup = sup_interior(mesh, rhs);
  double res_sup = 0.0, node_rel = 0.0;
  for (int i = g.first_interior; i <= g.last_interior; ++i) {
    const double r = std::fabs(mlap[i] - rhs[i]);
    res_sup = std::max(res_sup, r);
    node_rel = std::max(node_rel, r / std::max(std::fabs(rhs[i]), 1e-12 * rhs_sup + kTiny));
  }
  rep.residual = res_sup / std::max(rhs_sup, kTiny);
  rep.residual_node_rel = node_rel;
}

}  // namespace

GridFunction monotone_relax(const ScalarProblem& prob, const GridFunction& start,
                            int sweeps, std::vector<double>* sup_changes) {
  const Mesh& mesh = *prob.mesh;
  const auto& g = mesh.geom;
  const std::vector<double> K = prob.weight.node_values(mesh);
  const double m = prob.m, p = prob.p_exp;
  GridFunction u = start;

  auto G_and_dG = [&](int i, double t, double& G, double& dG) {
    const bool mirror = g.mirrored_origin && i == 0;
    const double h_hi = g.edge_len[i];
    const double du_hi = (u[i + 1] - t) / h_hi;
    const double f_hi = g.edge_weight[i] * k::flux(du_hi, m, 0.0);
    const double fp_hi = g.edge_weight[i] * k::flux_deriv(du_hi, m, 0.0) / h_hi;
    double f_lo, fp_lo;
    if (mirror) {
      f_lo = -f_hi;
      fp_lo = fp_hi;  // both legs move with t the same way
    } else {
      const double h_lo = g.edge_len[i - 1];
      const double du_lo = (t - u[i - 1]) / h_lo;
      f_lo = g.edge_weight[i - 1] * k::flux(du_lo, m, 0.0);
      fp_lo = g.edge_weight[i - 1] * k::flux_deriv(du_lo, m, 0.0) / h_lo;
    }
    const double W = g.dual_measure[i];
    const double rhs = p == 0.0 ? K[i] : K[i] * std::pow(t, -p);
    G = (f_lo - f_hi) / W - rhs;
    dG = (fp_lo + fp_hi) / W + (p == 0.0 ? 0.0 : p * K[i] * std::pow(t, -p - 1.0));
  };

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double change = 0.0;
    for (int i = g.first_interior; i <= g.last_interior; ++i) {
      double hi = u[i];
      double lo = std::min(hi, kTiny);
      // walk the bracket down until the row function changes sign
      {
        double G, dG;
        double probe = 0.5 * hi;
        for (int tries = 0; tries < 200; ++tries) {
          G_and_dG(i, probe, G, dG);
          if (G <= 0.0 || probe <= 1e-280) {
            lo = probe;
            break;
          }
          probe *= 0.5;
        }
      }
      double t = hi;
      for (int it = 0; it < 80; ++it) {
        double G, dG;
        G_and_dG(i, t, G, dG);
        if (G > 0.0) hi = t;
        else lo = t;
        const double scale =
            std::fabs(K[i] * (p == 0.0 ? 1.0 : std::pow(t, -p))) + std::fabs(G) + kTiny;
        if (std::fabs(G) <= 1e-13 * scale || hi - lo <= 1e-15 * hi + kTiny) break;
        double t_new = t - G / dG;
        if (!(t_new > lo && t_new < hi)) t_new = 0.5 * (lo + hi);
        t = t_new;
      }
      change = std::max(change, std::fabs(u[i] - t));
      u[i] = std::min(t, u[i]);  // relaxation never moves up from a supersolution
    }
    if (sup_changes) sup_changes->push_back(change);
    if (change <= 1e-15 * std::max(1.0, sup_interior(mesh, u.values))) break;
  }
  return u;
}

ScalarSolution solve_scalar(const ScalarProblem& prob, const NewtonSettings& settings,
                            const GridFunction* warm_start) {
  const Mesh& mesh = *prob.mesh;
  const auto& g = mesh.geom;
  ScalarSolution out;
  out.u = GridFunction(prob.mesh);
  ScalarSolveReport& rep = out.report;

  const std::vector<double> K = prob.weight.node_values(mesh);
  const bool weight_positive = prob.weight.strictly_positive(mesh);
  if (!weight_positive && prob.p_exp != 0.0)
    throw std::invalid_argument("sign-changing weights require p = 0");

  std::optional<Barriers> barriers;
  std::vector<double> lo_bound, hi_bound;
  if (weight_positive) {
    barriers = build_barriers(prob);
    rep.barriers_used = true;
    rep.barrier_c = barriers->c;
    lo_bound.assign(mesh.nodes.size(), 0.0);
    hi_bound.assign(mesh.nodes.size(), 0.0);
    for (int i = g.first_interior; i <= g.last_interior; ++i) {
      lo_bound[i] = settings.floor_fraction * barriers->sub[i];
      hi_bound[i] = settings.ceil_factor * barriers->super[i];
    }
  }

  std::vector<double>& u = out.u.values;
  bool warm = false;
  if (warm_start) {
    u = warm_start->values;
    if (barriers)
      for (int i = g.first_interior; i <= g.last_interior; ++i)
        u[i] = std::clamp(u[i], barriers->sub[i], barriers->super[i]);
    warm = true;
  } else if (barriers) {
    u = barriers->super.values;
  } else {
    u = boundary_profile(prob.mesh).values;  // any smooth positive seed
  }

  const std::vector<double>* lo = barriers ? &lo_bound : nullptr;
  const std::vector<double>* hi = barriers ? &hi_bound : nullptr;

  bool solved = false;
  if (!settings.force_fallback) {
    if (warm || prob.m == 2.0) {
      // direct attempt with the exact flux
      std::vector<double> u_try = u;
      int iters = 0;
      if (newton_stage(prob, K, 0.0, settings, lo, hi, u_try, iters) ==
          StageStatus::converged) {
        u = u_try;
        rep.newton_iters += iters;
        rep.sigma_stages = 1;
        solved = true;
      }
    }
    if (!solved) {
      std::vector<double> u_try = barriers ? barriers->super.values : u;
      StageStatus last = StageStatus::out_of_iters;
      for (double sigma : settings.sigma_schedule) {
        if (prob.m == 2.0 && sigma != 0.0) continue;
        int iters = 0;
        last = newton_stage(prob, K, sigma, settings, lo, hi, u_try, iters);
        rep.newton_iters += iters;
        ++rep.sigma_stages;
      }
      if (last == StageStatus::converged) {
        u = u_try;
        solved = true;
      }
    }
  }

  if (!solved && barriers) {
    std::vector<double> changes;
    GridFunction relaxed =
        monotone_relax(prob, barriers->super, settings.max_fallback_sweeps, &changes);
    rep.fallback_sweeps = static_cast<int>(changes.size());
    u = relaxed.values;
    // polish with the exact-flux Newton now that we are close
    int iters = 0;
    newton_stage(prob, K, 0.0, settings, lo, hi, u, iters);
    rep.newton_iters += iters;
  }

  final_residuals(prob, K, u, rep);
  rep.converged = rep.residual <= 10.0 * settings.tol_residual ||
                  rep.residual_node_rel <= 1e-6;

  if (barriers) {
    const double tol = 1e-10 * sup_interior(mesh, barriers->super.values);
    rep.sandwich_ok = true;
    for (int i = g.first_interior; i <= g.last_interior; ++i)
      if (u[i] < barriers->sub[i] - tol || u[i] > barriers->super[i] + tol) {
        rep.sandwich_ok = false;
        break;
      }
  }
  return out;
}

ComparisonVerdict comparison_check(const GridFunction& u_sub,
                                   const GridFunction& u_super,
                                   const ScalarProblem& prob) {
  const Mesh& mesh = *prob.mesh;
  const auto& g = mesh.geom;
  const std::vector<double> K = prob.weight.node_values(mesh);
  std::vector<double> scratch, mlap(mesh.nodes.size(), 0.0);

  auto satisfies = [&](const GridFunction& f, bool as_sub) {
    k::minus_mlap(g, f.values.data(), prob.m, 0.0, mlap.data(), scratch,
                  k::default_exec());
    for (int i = g.first_interior; i <= g.last_interior; ++i) {
      const double rhs =
          prob.p_exp == 0.0 ? K[i] : K[i] * std::pow(f[i], -prob.p_exp);
      const double slack = 1e-9 * (std::fabs(mlap[i]) + std::fabs(rhs)) + kTiny;
      if (as_sub ? mlap[i] > rhs + slack : mlap[i] < rhs - slack) return false;
    }
    return true;
  };
  if (!satisfies(u_sub, true) || !satisfies(u_super, false))
    return ComparisonVerdict::not_applicable;

  const double tol = 1e-12 * std::max(1.0, sup_interior(mesh, u_super.values));
  for (int i = 0; i < u_sub.size(); ++i)
    if (u_sub[i] > u_super[i] + tol) return ComparisonVerdict::violated;
  return ComparisonVerdict::ordered;
}

ManufacturedCase make_manufactured(const MeshPtr& mesh, double m, double a) {
  if (mesh->domain.kind != DomainKind::interval)
    throw std::invalid_argument("manufactured case is defined on the interval");
  if (m < 2.0) throw std::invalid_argument("manufactured case requires m >= 2");
  const double b = (m - a) / (m - 1.0);
  const double amp = std::pow(b * std::numbers::pi, m - 1.0);
  const double E = (b - 1.0) * (m - 1.0);

  ManufacturedCase mc;
  mc.exact = GridFunction(mesh);
  GridFunction theta(mesh);
  const int n = mesh->n_cells();
  for (int i = 0; i <= n; ++i) {
    const double S = std::sin(std::numbers::pi * mesh->nodes[i]);
    const double C = std::cos(std::numbers::pi * mesh->nodes[i]);
    if (mesh->is_dirichlet(i)) continue;
    mc.exact[i] = std::pow(S, b);
    theta[i] = amp * std::numbers::pi * std::pow(S, E - 1.0) *
               std::pow(std::fabs(C), m - 2.0) * ((m - 1.0) * S * S - E * C * C);
  }
  mc.problem.mesh = mesh;
  mc.problem.m = m;
  mc.problem.p_exp = 0.0;
  mc.problem.weight.q_exp = a;
  mc.problem.weight.tabulated = std::move(theta);
  return mc;
}

}  // namespace sing
