// Quantitative verdicts on computed solutions: boundary decay exponents and
// log corrections via log-log regression, critical Sobolev exponent bracketing
// via multi-level gradient energies, sandwich comparability, and the
// distance-power integrability check that calibrates the probe methodology.
#pragma once

#include <optional>
#include <vector>

#include "sing/exponents.hpp"
#include "sing/mesh.hpp"

namespace sing {

struct FitWindow {
  double delta_min = 0.0;
  double delta_max = 0.05;
};

// Default window: delta in [3 * smallest boundary spacing, 0.05].
FitWindow default_fit_window(const Mesh& mesh);

struct RateFit {
  double power = 0.0;
  double power_stderr = 0.0;
  std::optional<double> log_power;
  double log_power_stderr = 0.0;
  double raw_power = 0.0;      // single-regressor slope before any log handling
  double log_slope_raw = 0.0;  // secondary slope even when below threshold
  FitWindow window;
  int points_used = 0;
};

// Least-squares slope of log u against log delta over the boundary-layer
// window. If the raw power sits near 1, a secondary fit of log(u/delta)
// against loglog(1/delta) tests for a log correction (threshold 0.2, stderr
// below a third of the slope); when detected, power/log_power come from the
// joint two-regressor fit. Throws on fewer than 8 window nodes or
// nonpositive values.
RateFit fit_boundary_exponent(const GridFunction& u, const FitWindow& window);
RateFit fit_boundary_exponent(const GridFunction& u);  // default window

struct TauProbe {
  std::vector<double> tau_grid;
  std::vector<std::vector<double>> energy_by_level;  // [level][tau]
  std::vector<bool> divergent;                       // per tau
  double tau_star_estimate = HUGE_VAL;               // HUGE_VAL = +infinity
  std::optional<std::pair<double, double>> bracket;  // empty when all converge
};

// Default grid: m, m + 0.5, ..., m + 10.
std::vector<double> default_tau_grid(double m);

// Discrete integral of |grad u|^tau per refinement level; tau is classified
// divergent when the last inter-level relative increase is >= 5%. Requires
// at least 3 levels of doubling meshes.
TauProbe sobolev_tau_probe(const std::vector<GridFunction>& levels,
                           const std::vector<double>& tau_grid);

struct SandwichResult {
  double c_low = 0.0;
  double c_high = 0.0;
  bool pass = false;
};

// Two-sided comparability of u against the predicted law: min/max of
// u / profile(delta) over interior nodes, passing when the ratio spread is
// within a factor 100.
SandwichResult sandwich_check(const GridFunction& u, const DecayLaw& law);

struct IntegrabilityVerdict {
  bool convergent = false;
  std::vector<double> values;  // quadrature per level
  double last_increase = 0.0;  // relative
};

// Quadrature of delta^{-a} over interior nodes across levels, classified by
// the same 5% rule; finite exactly when a < 1, which validates the rule.
IntegrabilityVerdict delta_integrability_check(double a,
                                               const std::vector<MeshPtr>& levels);

}  // namespace sing
