#include "sing/exponents.hpp"

#include <cmath>

namespace sing {

double DecayLaw::evaluate(double delta) const {
  if (!(delta > 0.0) || delta > 0.5)
    throw std::domain_error("profile evaluation requires delta in (0, 1/2]");
  double v = std::pow(delta, power);
  if (log_power) v *= std::pow(std::log(1.0 / delta), *log_power);
  return v;
}

std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::I: return "I";
    case CaseId::II: return "II";
    case CaseId::III: return "III";
    case CaseId::IV: return "IV";
    case CaseId::V: return "V";
    case CaseId::VI: return "VI";
    case CaseId::VII: return "VII";
    case CaseId::VIII: return "VIII";
    case CaseId::NotCovered: return "NotCovered";
  }
  return "?";
}

std::vector<std::string> validate_structural(const ExponentTuple& e) {
  std::vector<std::string> bad;
  const double cap = 2.0 - 1.0 / e.m;
  if (!(e.p * (1.0 - 1.0 / e.m) + e.q < cap)) bad.emplace_back("first structural");
  if (!(e.s * (1.0 - 1.0 / e.m) - e.r < cap)) bad.emplace_back("second structural");
  if (!(e.q * e.r / ((1.0 + e.p) * (1.0 + e.s)) < 1.0)) bad.emplace_back("coupling");
  return bad;
}

namespace {

enum class Cmp { below, equal, above };

Cmp cmp1(double x) {
  if (std::fabs(x - 1.0) <= kClassifyEps) return Cmp::equal;
  return x < 1.0 ? Cmp::below : Cmp::above;
}

DecayLaw pure(double power) { return DecayLaw{power, std::nullopt}; }
DecayLaw logged(double log_power) { return DecayLaw{1.0, log_power}; }

TauRange tau_only_m(double m) { return TauRange{m, m, true}; }
TauRange tau_unbounded(double m) { return TauRange{m, HUGE_VAL, false}; }
TauRange tau_to(double m, double upper, bool inclusive) {
  return TauRange{m, upper, inclusive};
}

bool thm12_unique(const ExponentTuple& e) {
  const Cmp sr = cmp1(e.s - e.r);
  const Cmp pq = cmp1(e.p + e.q);
  if (sr == Cmp::above &&
      cmp1(e.p + e.q * (e.m + e.r) / (e.m + e.s - 1.0)) == Cmp::below)
    return true;                                             // (i)
  if (pq == Cmp::below && sr != Cmp::above) return true;     // (ii)
  if (pq == Cmp::equal && sr == Cmp::below) return true;     // (iii)
  if (pq == Cmp::above &&
      cmp1(e.s - e.r * (e.m - e.q) / (e.m + e.p - 1.0)) == Cmp::below)
    return true;                                             // (iv)
  return false;
}

}  // namespace

RegimePrediction classify(const ExponentTuple& e) {
  if (auto bad = validate_structural(e); !bad.empty()) {
    std::string msg = "structural violation:";
    for (const auto& b : bad) msg += " [" + b + "]";
    throw std::invalid_argument(msg);
  }

  const double m = e.m, p = e.p, q = e.q, r = e.r, s = e.s;
  RegimePrediction out;

  const Cmp sr = cmp1(s - r);
  const Cmp pq = cmp1(p + q);

  auto smooth_u = [&](TauRange t) {
    out.u_law = pure(1.0);
    out.u_smooth_boundary = true;
    out.u_tau = t;
  };
  auto smooth_v = [&](TauRange t) {
    out.v_law = pure(1.0);
    out.v_smooth_boundary = true;
    out.v_tau = t;
  };

  if (sr == Cmp::above) {
    const double v_pow = (m + r) / (m + s - 1.0);
    const Cmp blend = cmp1(p + q * v_pow);
    const TauRange v_range = tau_to(m, (m + s - 1.0) / (s - r - 1.0), true);
    if (blend == Cmp::below) {
      out.case_id = CaseId::I;
      smooth_u(tau_only_m(m));
      out.v_law = pure(v_pow);
      out.v_smooth_boundary = false;
      out.v_tau = v_range;
    } else if (blend == Cmp::equal) {
      out.case_id = CaseId::II;
      out.u_law = logged(1.0 / (m + p - 1.0));
      out.u_smooth_boundary = false;
      out.u_tau = tau_unbounded(m);
      out.v_law = pure(v_pow);
      out.v_smooth_boundary = false;
      out.v_tau = v_range;
    }
  } else if (sr == Cmp::below) {
    if (pq == Cmp::below) {
      out.case_id = CaseId::III;
      smooth_u(tau_only_m(m));
      smooth_v(tau_only_m(m));
    } else if (pq == Cmp::equal) {
      out.case_id = CaseId::IV;
      out.u_law = logged(1.0 / (m + p - 1.0));
      out.u_smooth_boundary = false;
      out.u_tau = tau_unbounded(m);
      smooth_v(tau_only_m(m));
    }
  } else {  // s - r = 1
    if (pq == Cmp::below) {
      out.case_id = CaseId::V;
      smooth_u(tau_only_m(m));
      out.v_law = logged(1.0 / (m + s - 1.0));
      out.v_smooth_boundary = false;
      out.v_tau = tau_unbounded(m);
    } else if (pq == Cmp::equal) {
      out.case_id = CaseId::VI;
      out.u_law = logged(1.0 / (m + p - 1.0));
      out.u_smooth_boundary = false;
      out.u_tau = tau_unbounded(m);
      out.v_law = logged(1.0 / (m + s - 1.0));
      out.v_smooth_boundary = false;
      out.v_tau = tau_unbounded(m);
    }
  }

  if (out.case_id == CaseId::NotCovered && pq == Cmp::above) {
    const double u_pow = (m - q) / (m + p - 1.0);
    const Cmp tilt = cmp1(s - r * u_pow);
    if (tilt == Cmp::below) {
      out.case_id = CaseId::VII;
      out.u_law = pure(u_pow);
      out.u_smooth_boundary = false;
      out.u_tau = tau_to(m, (m + p - 1.0) / (p + q - 1.0), false);
      smooth_v(tau_only_m(m));
    } else if (tilt == Cmp::equal) {
      out.case_id = CaseId::VIII;
      out.u_law = pure(u_pow);
      out.u_smooth_boundary = false;
      out.u_tau = tau_to(m, (m + p - 1.0) / (p + q - 1.0), false);
      out.v_law = logged(1.0 / (m + s - 1.0));
      out.v_smooth_boundary = false;
      out.v_tau = tau_unbounded(m);
    }
  }

  if (out.case_id == CaseId::NotCovered) {
    out = RegimePrediction{};  // all prediction fields absent
    out.uniqueness = false;
    return out;
  }
  out.uniqueness = thm12_unique(e);
  return out;
}

double predicted_profile(const RegimePrediction& pred, Component which, double delta) {
  const auto& law = which == Component::u ? pred.u_law : pred.v_law;
  if (!law) throw std::invalid_argument("prediction has no law for this component");
  return law->evaluate(delta);
}

}  // namespace sing
