#pragma once

#include <json.hpp>
#include <string>

#include "rsgame/birthdeath.hpp"
#include "rsgame/checks.hpp"
#include "rsgame/montecarlo.hpp"
#include "rsgame/shapley.hpp"

namespace rsgame {

// JSON views of every report. Non-finite numbers are written as null.

nlohmann::json to_json(const ValidationReport& r);
nlohmann::json to_json(const LyapunovReport& r);
nlohmann::json to_json(const IrreducibilityReport& r);
nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const EstimatorReport& r);
nlohmann::json to_json(const SaddleVerdict& r);
nlohmann::json to_json(const RepresentationVerdict& r);
nlohmann::json to_json(const Prop52Report& r);
nlohmann::json to_json(const StationaryStrategy& s);

/// Reads back what to_json(SolveReport) wrote: rho, psi, domain, selectors.
SolveReport solve_report_from_json(const nlohmann::json& doc);
SolveReport load_solve_report(const std::string& path);

/// Ladder trace with header n,domain_size,rho_n,bracket_width,iterations.
std::string ladder_csv(const SolveReport& r);

}  // namespace rsgame
