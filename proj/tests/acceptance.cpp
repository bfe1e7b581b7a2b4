// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "sing/analyzer.hpp"
#include "sing/config.hpp"
#include "sing/coupled_solver.hpp"

using namespace sing;
using clk = std::chrono::steady_clock;

namespace {

int g_failures = 0;

struct Criterion {
  std::string name;
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back(what);
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void report(const Criterion& c, double seconds) {
  std::printf("[%s] %-58s (%.1f s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
              seconds);
  for (const auto& n : c.notes) std::printf("       - %s\n", n.c_str());
  if (!c.pass) ++g_failures;
}

template <typename Fn>
void run(const std::string& name, Fn&& fn, double time_budget = 0.0) {
  Criterion c;
  c.name = name;
  const auto t0 = clk::now();
  try {
    fn(c);
  } catch (const std::exception& ex) {
    c.require(false, std::string("exception: ") + ex.what());
  }
  const double secs = std::chrono::duration<double>(clk::now() - t0).count();
  if (time_budget > 0.0)
    c.require(secs < time_budget,
              "runtime " + fmt(secs) + " s exceeds " + fmt(time_budget) + " s");
  report(c, secs);
}

// ---------------------------------------------------------------------------
// criterion 1: classification truth table
// ---------------------------------------------------------------------------

void criterion_classification(Criterion& c) {
  struct Row {
    ExponentTuple e;
    CaseId expected;
    bool unique;
  };
  const std::vector<Row> table = {
      {{2, 0.2, 0.3, 1, 3}, CaseId::I, true},
      {{1.5, 0.3, 0.4, 0.5, 2.6}, CaseId::I, true},
      {{3, 0.5, 0.25, 2, 3.2}, CaseId::I, true},
      {{2, 0.7, 0.4, 1, 3}, CaseId::II, false},          // blend = 1 exactly
      {{2, 0.3, 0.2, 0.2, 0.3}, CaseId::III, true},
      {{2, 0.5, 0.5, 0.2, 0.5}, CaseId::IV, true},       // p+q = 1
      {{2, 0.5, 0.5, 0.5, 0.5}, CaseId::IV, true},
      {{2, 0.3, 0.3, 1, 2}, CaseId::V, true},            // s-r = 1
      {{2, 0.5, 0.5, 1, 2}, CaseId::VI, false},          // both equalities
      {{3, 1.5, 0.25, 1, 1.5}, CaseId::VII, true},
      {{4, 1, 0.5, 1, 1.2}, CaseId::VII, true},
      {{2, 1, 0.5, 1, 1.75}, CaseId::VIII, false},       // tilt = 1 exactly
      {{2, 1, 0.4, 0.1, 2.5}, CaseId::NotCovered, false},
      {{2, 0.6, 0.8, 0.5, 3}, CaseId::NotCovered, false},
      {{2, 1, 0.3, 1, 2}, CaseId::NotCovered, false},
      {{2, 0.3, 0.3, 1, 2 - 1e-7}, CaseId::III, true},   // just below s-r = 1
      {{2, 0.3, 0.3, 1, 2 + 1e-7}, CaseId::I, true},     // just above
  };
  for (const auto& row : table) {
    const auto pred = classify(row.e);
    c.require(pred.case_id == row.expected,
              "tuple (" + fmt(row.e.m) + "," + fmt(row.e.p) + "," + fmt(row.e.q) +
                  "," + fmt(row.e.r) + "," + fmt(row.e.s) + ") classified " +
                  to_string(pred.case_id) + " expected " + to_string(row.expected));
    c.require(pred.uniqueness == row.unique,
              "uniqueness flag wrong for case " + to_string(row.expected));
  }

  // structural violations, one per named inequality
  c.require(validate_structural({2, 2, 1, 0.1, 3}) ==
                std::vector<std::string>{"first structural"},
            "first structural violation not flagged");
  c.require(validate_structural({2, 0.2, 0.2, 0.1, 3.5}) ==
                std::vector<std::string>{"second structural"},
            "second structural violation not flagged");
  c.require(validate_structural({2, 0.1, 1.4, 8, 0.5}) ==
                std::vector<std::string>{"coupling"},
            "coupling violation not flagged");
}

// ---------------------------------------------------------------------------
// criterion 2: operator exactness and homogeneity
// ---------------------------------------------------------------------------

void criterion_operator(Criterion& c) {
  for (int n : {64, 256, 1024}) {
    auto mesh = build_graded_mesh(DomainSpec{}, n, 1.0);
    GridFunction u(mesh);
    for (int i = 0; i <= n; ++i)
      u[i] = 0.5 * mesh->nodes[i] * (1.0 - mesh->nodes[i]);
    auto out = minus_m_laplacian(u, 2.0);
    double worst = 0.0;
    for (int i = 1; i < n; ++i) worst = std::max(worst, std::fabs(out[i] - 1.0));
    c.require(worst <= 1e-12, "torsion exactness " + fmt(worst) + " at n=" +
                                  std::to_string(n));
  }

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(0.2, 1.5);
  auto mesh = build_graded_mesh(DomainSpec{}, 128, 2.0);
  GridFunction u(mesh);
  for (int i = 1; i < 128; ++i) u[i] = dist(rng) * mesh->delta[i];
  for (double m : {1.5, 2.0, 3.0, 4.0}) {
    for (double scale : {0.5, 3.0}) {
      GridFunction su = u;
      for (auto& v : su.values) v *= scale;
      auto base = minus_m_laplacian(u, m);
      auto scaled = minus_m_laplacian(su, m);
      const double factor = std::pow(scale, m - 1.0);
      double worst = 0.0;
      for (int i = 1; i < 128; ++i)
        worst = std::max(worst,
                         std::fabs(scaled[i] - factor * base[i]) /
                             std::max(std::fabs(factor * base[i]), 1e-300));
      c.require(worst <= 1e-12,
                "homogeneity m=" + fmt(m) + " c=" + fmt(scale) + ": " + fmt(worst));
    }
  }
}

// ---------------------------------------------------------------------------
// criterion 3: analytic scalar solves
// ---------------------------------------------------------------------------

void criterion_analytic_solves(Criterion& c) {
  {
    const auto t0 = clk::now();
    auto mesh = build_graded_mesh(DomainSpec{}, 512, 1.0);
    ScalarProblem prob;
    prob.mesh = mesh;
    prob.m = 2.0;
    auto sol = solve_scalar(prob, NewtonSettings{});
    c.require(sol.report.converged, "m=2 torsion did not converge");
    const double err = std::fabs(sol.u[256] - 0.125);
    c.require(err <= 1e-8, "m=2: |u(1/2) - 0.125| = " + fmt(err));
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    c.require(secs < 10.0, "m=2 solve took " + fmt(secs) + " s");
  }
  {
    const auto t0 = clk::now();
    auto mesh = build_graded_mesh(DomainSpec{}, 1024, 1.0);
    ScalarProblem prob;
    prob.mesh = mesh;
    prob.m = 3.0;
    auto sol = solve_scalar(prob, NewtonSettings{});
    c.require(sol.report.converged, "m=3 torsion did not converge");
    const double expected = (2.0 / 3.0) * std::pow(0.5, 1.5);  // 0.235702...
    const double err = std::fabs(sol.u[512] - expected);
    c.require(err <= 1e-5, "m=3: |u(1/2) - 0.23570| = " + fmt(err));
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    c.require(secs < 10.0, "m=3 solve took " + fmt(secs) + " s");
  }
}

// ---------------------------------------------------------------------------
// criterion 4: manufactured singular solutions
// ---------------------------------------------------------------------------

void criterion_manufactured(Criterion& c) {
  struct Case {
    double a, grading;
  };
  for (const Case k : {Case{0.5, 2.0}, Case{1.2, 2.5}}) {
    const auto t0 = clk::now();
    auto mesh = build_graded_mesh(DomainSpec{}, 2048, k.grading);
    auto mc = make_manufactured(mesh, 2.0, k.a);
    auto sol = solve_scalar(mc.problem, NewtonSettings{});
    c.require(sol.report.converged, "a=" + fmt(k.a) + " did not converge");
    double err = 0.0;
    for (int i = 0; i < sol.u.size(); ++i)
      err = std::max(err, std::fabs(sol.u[i] - mc.exact[i]));
    c.require(err <= 1e-4, "a=" + fmt(k.a) + ": sup error " + fmt(err));
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    c.require(secs < 30.0, "a=" + fmt(k.a) + " took " + fmt(secs) + " s");
  }
}

// ---------------------------------------------------------------------------
// criteria 5 + 8: rate reproduction and band containment
// ---------------------------------------------------------------------------

struct RateCase {
  const char* label;
  ExponentTuple e;
};

const std::vector<RateCase> kRateCases = {
    {"I", {2, 0.2, 0.3, 1, 3}},
    {"III", {2, 0.3, 0.2, 0.2, 0.3}},
    {"IV", {2, 0.5, 0.5, 0.2, 0.5}},
    {"VII", {3, 1.5, 0.25, 1, 1.5}},
};

void criterion_rates_and_band(Criterion& c, Criterion& band_criterion) {
  for (const auto& rc : kRateCases) {
    const auto t0 = clk::now();
    const auto pred = classify(rc.e);
    const double grading = default_grading(pred);
    SystemSettings settings;
    SystemSolution top;
    bool all_band = true;
    for (int l = 0; l < 3; ++l) {
      auto mesh = build_graded_mesh(DomainSpec{}, 256 << l, grading);
      auto sol = solve_system(rc.e, mesh, settings);
      c.require(sol.report.converged,
                std::string("case ") + rc.label + " level " +
                    std::to_string(l + 1) + " did not converge");
      all_band = all_band && sol.report.band_ok;
      if (l == 2) top = std::move(sol);
    }
    band_criterion.require(all_band, std::string("case ") + rc.label +
                                         ": iterates left the invariant band");

    const auto fit_u = fit_boundary_exponent(top.state.u);
    const auto fit_v = fit_boundary_exponent(top.state.v);
    const double du = std::fabs(fit_u.power - pred.u_law->power);
    const double dv = std::fabs(fit_v.power - pred.v_law->power);
    c.require(du <= 0.05, std::string("case ") + rc.label + ": u power off by " +
                              fmt(du) + " (fit " + fmt(fit_u.power) + ")");
    c.require(dv <= 0.05, std::string("case ") + rc.label + ": v power off by " +
                              fmt(dv) + " (fit " + fmt(fit_v.power) + ")");
    c.require(fit_u.log_power.has_value() == pred.u_law->log_power.has_value(),
              std::string("case ") + rc.label + ": u log flag wrong (slope " +
                  fmt(fit_u.log_slope_raw) + ")");
    c.require(fit_v.log_power.has_value() == pred.v_law->log_power.has_value(),
              std::string("case ") + rc.label + ": v log flag wrong (slope " +
                  fmt(fit_v.log_slope_raw) + ")");
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    c.require(secs < 300.0, std::string("case ") + rc.label + " runtime " +
                                fmt(secs) + " s exceeds 5 min");
  }
}

// ---------------------------------------------------------------------------
// criterion 6: Sobolev threshold bracket and probe calibration
// ---------------------------------------------------------------------------

void criterion_tau(Criterion& c) {
  const ExponentTuple e{3, 1.5, 0.25, 1, 1.5};
  // deeper grading than the rate-fit default: near the critical tau the
  // energy tail shrinks like delta_min^{1-(1-alpha)tau}, and the 5% rule
  // needs the gap between 4.5 and 4.75 resolved within 4 levels
  const double grading = 4.0;
  SystemSettings settings;
  std::vector<GridFunction> us;
  for (int l = 0; l < 4; ++l) {
    auto mesh = build_graded_mesh(DomainSpec{}, 256 << l, grading);
    auto sol = solve_system(e, mesh, settings);
    c.require(sol.report.converged,
              "case VII level " + std::to_string(l + 1) + " did not converge");
    us.push_back(sol.state.u);
  }
  const auto probe = sobolev_tau_probe(us, default_tau_grid(3.0));
  const double predicted = 3.5 / 0.75;  // (m+p-1)/(p+q-1) = 4.666...
  if (!probe.bracket) {
    c.require(false, "tau probe found no divergence at all");
  } else {
    const auto [lo, hi] = *probe.bracket;
    c.require(lo <= predicted && predicted <= hi,
              "bracket [" + fmt(lo) + ", " + fmt(hi) + "] misses " + fmt(predicted));
    c.require(hi - lo <= 1.0, "bracket width " + fmt(hi - lo) + " exceeds 1.0");
  }

  // probe calibration on the integrability grid
  std::vector<MeshPtr> levels;
  for (int l = 0; l < 4; ++l)
    levels.push_back(build_graded_mesh(DomainSpec{}, 128 << l, 4.0));
  for (double a : {0.25, 0.5, 0.75, 0.9}) {
    c.require(delta_integrability_check(a, levels).convergent,
              "a=" + fmt(a) + " misclassified divergent");
  }
  for (double a : {1.1, 1.5}) {
    c.require(!delta_integrability_check(a, levels).convergent,
              "a=" + fmt(a) + " misclassified convergent");
  }
  c.require(!delta_integrability_check(1.0, levels).convergent,
            "a=1 (log-divergent) misclassified convergent");
}

// ---------------------------------------------------------------------------
// criterion 7: uniqueness probes
// ---------------------------------------------------------------------------

void criterion_uniqueness(Criterion& c) {
  for (const auto& rc : kRateCases) {
    const auto pred = classify(rc.e);
    auto mesh = build_graded_mesh(DomainSpec{}, 256, default_grading(pred));
    const auto rep = uniqueness_probe(rc.e, mesh, SystemSettings{});
    c.require(rep.distance <= 1e-4, std::string("case ") + rc.label +
                                        ": distance " + fmt(rep.distance));
    const auto& M = rep.scaling_ratio;
    bool decreasing = M.size() >= 2;
    for (size_t k = std::max<size_t>(1, M.size() - 10); k < M.size(); ++k)
      decreasing = decreasing && std::log(M[k]) < std::log(M[k - 1]) + 1e-12;
    c.require(decreasing, std::string("case ") + rc.label +
                              ": log scaling ratio not decreasing");
  }
}

// ---------------------------------------------------------------------------
// criterion 9: randomized discrete comparison principle
// ---------------------------------------------------------------------------

unsigned g_seed = 20260808;

void criterion_comparison(Criterion& c) {
  std::mt19937_64 rng(g_seed);
  std::uniform_real_distribution<double> base(0.1, 2.0), bump(0.0, 2.0);
  const double ms[4] = {1.5, 2.0, 3.0, 4.0};
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double m = ms[trial % 4];
    const DomainSpec dom = trial % 3 == 0 ? DomainSpec{DomainKind::radial_ball, 2}
                                          : DomainSpec{};
    auto mesh = build_graded_mesh(dom, 32, 1.0 + (trial % 5) * 0.5);
    GridFunction f1(mesh), f2(mesh);
    const auto& g = mesh->geom;
    for (int i = g.first_interior; i <= g.last_interior; ++i) {
      f1[i] = base(rng);
      f2[i] = f1[i] + bump(rng);
    }
    NewtonSettings tight;
    tight.tol_residual = 1e-12;
    ScalarProblem prob;
    prob.mesh = mesh;
    prob.m = m;
    prob.weight.tabulated = f1;
    auto u1 = solve_scalar(prob, tight);
    prob.weight.tabulated = f2;
    auto u2 = solve_scalar(prob, tight);
    c.require(u1.report.converged && u2.report.converged,
              "trial " + std::to_string(trial) + " did not converge");
    for (int i = 0; i < u1.u.size(); ++i)
      if (u1.u[i] > u2.u[i] + 1e-12) ++violations;
  }
  c.require(violations == 0,
            std::to_string(violations) + " ordering violations beyond 1e-12");
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc - 1; ++i)
    if (std::string(argv[i]) == "--seed") g_seed = std::stoul(argv[i + 1]);
  std::printf("acceptance suite (seed %u)\n================\n", g_seed);
  run("criterion-1 classification-truth-table", criterion_classification, 1.0);
  run("criterion-2 operator-exactness-and-homogeneity", criterion_operator);
  run("criterion-3 analytic-scalar-solves", criterion_analytic_solves);
  run("criterion-4 manufactured-singular-solutions", criterion_manufactured);

  // criteria 5 and 8 share the same runs
  {
    Criterion rates, band;
    rates.name = "criterion-5 rate-reproduction-four-regimes";
    band.name = "criterion-8 invariant-band-containment";
    const auto t0 = clk::now();
    try {
      criterion_rates_and_band(rates, band);
    } catch (const std::exception& ex) {
      rates.require(false, std::string("exception: ") + ex.what());
    }
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    report(rates, secs);
    report(band, secs);
  }

  run("criterion-6 sobolev-threshold-and-calibration", criterion_tau);
  run("criterion-7 uniqueness-two-starts", criterion_uniqueness);
  run("criterion-9 discrete-comparison-principle", criterion_comparison);

  if (g_failures == 0) {
    std::printf("\nall acceptance criteria passed\n");
    return 0;
  }
  std::printf("\n%d criterion(s) FAILED\n", g_failures);
  return 1;
}
