// JSON views of predictions, fits and solver reports. ordered_json keeps
// emission order stable so reports round-trip byte-identically.
#pragma once

#include <json.hpp>

#include "sing/analyzer.hpp"
#include "sing/coupled_solver.hpp"
#include "sing/exponents.hpp"
#include "sing/scalar_solver.hpp"

namespace sing {

using json = nlohmann::ordered_json;

json law_json(const DecayLaw& law);
json tau_range_json(const TauRange& t);

// {case, u_law, v_law, u_tau, v_tau, uniqueness, violations}; prediction
// fields are omitted for NotCovered or when violations are present.
json classification_json(const RegimePrediction& pred,
                         const std::vector<std::string>& violations);

json ratefit_json(const RateFit& fit);
json tauprobe_json(const TauProbe& probe);
json sandwich_json(const SandwichResult& s);
json scalar_report_json(const ScalarSolveReport& rep);
json system_report_json(const SystemReport& rep);
json uniqueness_json(const UniquenessReport& rep);

void write_json(const json& j, const std::string& path);

}  // namespace sing
