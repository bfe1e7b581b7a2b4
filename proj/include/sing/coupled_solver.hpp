// Fixed-point solver for the coupled system: (u, v) -> (Tu, Tv) where each
// component solves its scalar equation with the other frozen, iterated inside
// an invariant band of decay-law envelopes.
#pragma once

#include <optional>
#include <vector>

#include "sing/exponents.hpp"
#include "sing/scalar_solver.hpp"

namespace sing {

struct IterationRecord {
  double du = 0.0, dv = 0.0;            // relative sup-norm changes
  double residual_u = 0.0, residual_v = 0.0;
  bool in_band = true;
};

struct SystemState {
  GridFunction u, v;
  int iter = 0;
  std::vector<IterationRecord> history;
};

// Two-sided envelopes c1*prof <= u <= c2*prof built from the case's decay
// laws. Log-corrected components get a delta^{1-eps} upper envelope.
struct InvariantBand {
  GridFunction u_lower, u_upper, v_lower, v_upper;
  double c1 = 0.5, c2 = 2.0, m1 = 0.5, m2 = 2.0;
  double eps_u = 0.0, eps_v = 0.0;

  bool contains(const SystemState& st, double rel_slack = 1e-12) const;
};

InvariantBand build_band(const ExponentTuple& e, const RegimePrediction& pred,
                         const MeshPtr& mesh);

struct SystemSettings {
  NewtonSettings newton;
  double tol_fp = 1e-7;
  int max_outer = 200;
  int max_band_refits = 10;   // each refit doubles/halves the failing constants
  bool refit_restart = true;  // restart from the band midpoint after a refit
};

// The two frozen scalar problems of one fixed-point application. Exposed so
// tests can reproduce apply_T bitwise.
ScalarProblem frozen_u_problem(const GridFunction& v, const ExponentTuple& e,
                               const RegimePrediction& pred);
ScalarProblem frozen_v_problem(const GridFunction& u, const ExponentTuple& e,
                               const RegimePrediction& pred);

// One application of the map: both components read the incoming state.
// Scalar failures are rethrown tagged with the failing component.
SystemState apply_T(const SystemState& state, const ExponentTuple& e,
                    const RegimePrediction& pred, const SystemSettings& settings);

struct SystemReport {
  bool converged = false;
  int iters = 0;
  int band_refits = 0;
  bool band_ok = false;     // every iterate of the final run stayed in band
  double residual_u = 0.0;  // per-node relative, final state
  double residual_v = 0.0;
  double final_du = 0.0, final_dv = 0.0;
  RegimePrediction prediction;
  InvariantBand band;
};

struct SystemSolution {
  SystemState state;
  SystemReport report;
};

// Iterates apply_T from the band midpoint (or `init`) until the relative
// change drops below tol_fp. Throws std::invalid_argument on NotCovered.
SystemSolution solve_system(const ExponentTuple& e, const MeshPtr& mesh,
                            const SystemSettings& settings,
                            const SystemState* init = nullptr);

// Per-node relative residuals of both equations at a given state.
std::pair<double, double> system_residuals(const SystemState& state,
                                           const ExponentTuple& e);

struct UniquenessReport {
  double distance = HUGE_VAL;        // relative sup distance between the runs
  std::vector<double> scaling_ratio; // M_k = sup-ratio between the two u iterates
  int iters = 0;
  bool both_converged = false;
};

// Runs the fixed-point iteration from two deliberately different starts
// (shrunk lower envelopes / inflated upper envelopes) in lockstep and tracks
// how the scaling ratio between them decays toward 1.
UniquenessReport uniqueness_probe(const ExponentTuple& e, const MeshPtr& mesh,
                                  const SystemSettings& settings);

void write_history_csv(const std::vector<IterationRecord>& history,
                       const std::string& path);

}  // namespace sing
