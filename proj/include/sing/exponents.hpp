// Exponent-regime classification for the coupled system
//   -Delta_m u = u^{-p} v^{-q},   -Delta_m v = u^{r} v^{-s},   u = v = 0 on the boundary.
//
// Maps an exponent tuple to its structural validity, the matching decay /
// regularity case, and the uniqueness verdict. Pure functions over immutable
// values; thread-safe.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sing {

struct ExponentTuple {
  double m = 2.0;  // diffusion exponent, > 1
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0;  // nonlinearity exponents, > 0

  bool well_formed() const { return m > 1.0 && p > 0.0 && q > 0.0 && r > 0.0 && s > 0.0; }
};

// Asymptotic profile delta^power * log^{log_power}(1/delta). Log corrections
// only ever attach to power = 1.
struct DecayLaw {
  double power = 1.0;
  std::optional<double> log_power;

  // Throws std::domain_error unless delta is in (0, 1/2].
  double evaluate(double delta) const;
};

struct TauRange {
  double lower = 0.0;              // always m
  double upper = 0.0;              // HUGE_VAL when unbounded
  bool upper_inclusive = false;

  bool unbounded() const { return !std::isfinite(upper); }
};

enum class CaseId { I, II, III, IV, V, VI, VII, VIII, NotCovered };

std::string to_string(CaseId id);

struct RegimePrediction {
  CaseId case_id = CaseId::NotCovered;
  std::optional<DecayLaw> u_law, v_law;
  std::optional<TauRange> u_tau, v_tau;
  std::optional<bool> u_smooth_boundary, v_smooth_boundary;  // C^{1,.} vs C^{0,.}
  bool uniqueness = false;

  bool covered() const { return case_id != CaseId::NotCovered; }
};

// Comparisons against the case-defining equalities use this tolerance.
inline constexpr double kClassifyEps = 1e-9;

// Checks the three structural inequalities
//   p(1 - 1/m) + q < 2 - 1/m        ("first structural")
//   s(1 - 1/m) - r < 2 - 1/m        ("second structural")
//   qr / ((1+p)(1+s)) < 1           ("coupling")
// with exact floating comparison. Returns the names of violated ones.
std::vector<std::string> validate_structural(const ExponentTuple& e);

// Classifies against the eight-case table. Throws std::invalid_argument when
// validate_structural is nonempty. NotCovered is a normal outcome.
RegimePrediction classify(const ExponentTuple& e);

enum class Component { u, v };

// Evaluates the predicted profile of one component at boundary distance delta.
double predicted_profile(const RegimePrediction& pred, Component which, double delta);

}  // namespace sing
