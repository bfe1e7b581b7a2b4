// Solver for the scalar singular problem
//   -Delta_m u = K(x) u^{-p},  u = 0 on the boundary,
// by sub/supersolution barriers plus a damped regularized Newton solver with
// flux continuation, and a monotone nodewise relaxation fallback.
#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "sing/exponents.hpp"
#include "sing/mesh.hpp"

namespace sing {

// Weight K ~ scale * delta^{-q_exp}, optionally with a log factor
// log^{-log_exp}(A/delta) (then q_exp = 1). A tabulated grid function
// overrides the analytic form for evaluation; q_exp/log_exp stay around as
// shape metadata for the barrier regime. q_exp < 0 (a bounded decaying
// weight) arises when the coupled map freezes u^r.
struct SingularWeight {
  double q_exp = 0.0;
  std::optional<double> log_exp;
  double scale = 1.0;
  std::optional<GridFunction> tabulated;

  // Nodal values; Dirichlet entries are set to 0 and never read.
  std::vector<double> node_values(const Mesh& mesh) const;
  bool strictly_positive(const Mesh& mesh) const;
};

struct ScalarProblem {
  MeshPtr mesh;
  SingularWeight weight;
  double p_exp = 0.0;
  double m = 2.0;
  // When set (the coupled map does), dictates the barrier profile family
  // instead of the p+q trichotomy.
  std::optional<DecayLaw> barrier_law;
};

// Thrown when doubling c up to 2^20 never satisfies the discrete barrier
// inequalities (mis-set regime or under-resolved mesh).
struct BarrierFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Barriers {
  GridFunction sub, super;
  double c = 0.0;
  DecayLaw law;
};

// Decay law the barriers imitate: the override if present, else the
// p+q trichotomy of the scalar theory (q taken from the weight metadata).
DecayLaw barrier_law_for(const ScalarProblem& prob);

Barriers build_barriers(const ScalarProblem& prob);

struct NewtonSettings {
  std::vector<double> sigma_schedule{1e-1, 1e-2, 1e-3, 1e-4,
                                     1e-5, 1e-6, 1e-7, 1e-8, 0.0};
  double backtrack_factor = 0.5;
  double tol_residual = 1e-9;   // relative to sup |rhs|
  double tol_step = 1e-11;      // relative step size
  int max_iter = 200;           // Newton steps per sigma stage
  double floor_fraction = 0.5;  // iterate stays >= floor_fraction * sub
  double ceil_factor = 2.0;     // ... and <= ceil_factor * super
  int max_fallback_sweeps = 500;
  bool force_fallback = false;  // skip Newton, exercise the monotone path
};

struct ScalarSolveReport {
  bool converged = false;
  int newton_iters = 0;
  int sigma_stages = 0;
  int fallback_sweeps = 0;
  double residual = HUGE_VAL;           // sup |R| / sup |rhs|
  double residual_node_rel = HUGE_VAL;  // sup_i |R_i| / max(|rhs_i|, floor)
  bool sandwich_ok = false;
  bool barriers_used = false;
  double barrier_c = 0.0;
};

struct ScalarSolution {
  GridFunction u;
  ScalarSolveReport report;
};

// -Delta_m u at interior nodes (boundary rows unset, i.e. zero-filled).
GridFunction minus_m_laplacian(const GridFunction& u, double m);

// Solves the problem. Initial guess is the supersolution unless a warm start
// is supplied (clamped into the sandwich). Barriers are skipped when the
// weight is tabulated and not strictly positive (then p_exp must be 0).
ScalarSolution solve_scalar(const ScalarProblem& prob, const NewtonSettings& settings,
                            const GridFunction* warm_start = nullptr);

// One monotone relaxation pass per sweep: each interior node solves its own
// scalar equation with neighbors frozen. Started from a discrete
// supersolution the iterates decrease monotonically. Returns the final
// iterate; per-sweep sup changes appended to *sup_changes when given.
GridFunction monotone_relax(const ScalarProblem& prob, const GridFunction& start,
                            int sweeps, std::vector<double>* sup_changes = nullptr);

enum class ComparisonVerdict { ordered, violated, not_applicable };

// Checks the discrete sub/supersolution inequalities for (u_sub, u_super);
// when they hold, reports whether u_sub <= u_super nodewise.
ComparisonVerdict comparison_check(const GridFunction& u_sub,
                                   const GridFunction& u_super,
                                   const ScalarProblem& prob);

// Manufactured verification pair: exact solution w = sin(pi x)^{(m-a)/(m-1)}
// on the interval and the tabulated forcing theta = -Delta_m w (symbolic).
struct ManufacturedCase {
  ScalarProblem problem;
  GridFunction exact;
};
ManufacturedCase make_manufactured(const MeshPtr& mesh, double m, double a);

}  // namespace sing
