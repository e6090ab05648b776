#pragma once

#include "aggtreat/chains.hpp"
#include "aggtreat/congruence.hpp"
#include "aggtreat/estimands.hpp"
#include "aggtreat/inference.hpp"
#include "aggtreat/simulate.hpp"
#include "aggtreat/transport.hpp"

#include <json.hpp>

#include <string>

namespace aggtreat {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

/// Every report starts with the same header block; no timestamps, so repeated
/// runs with the same inputs are byte-identical.
Json report_header(const std::string& command, const Json& config_echo = Json::object());

Json rational_json(const Rational& r);  // {"value": double, "exact": "p/q"}

Json to_json(const CountReport& report);
Json to_json(const std::vector<FractionPoint>& series);
Json to_json(const WeightScheme& scheme);
Json to_json(const DecreasingMeansReport& report, const GridSpec& grid);
Json to_json(const IncongruencyReport& report, const GridSpec& grid);
Json to_json(const Decomposition& decomposition);
Json to_json(const Estimand& estimand);
Json to_json(const BootstrapResult& result);
Json to_json(const SutvaTestReport& report, const GridSpec& grid);
Json to_json(const RegressionDecomposition& regression, const GridSpec& grid);
Json to_json(const OracleReport& report);
Json to_json(const PopulationStats& stats);
Json to_json(const LatentJoint& joint);

CountReport count_report_from_json(const Json& j);
WeightScheme weight_scheme_from_json(const Json& j);

std::string fraction_series_csv(const std::vector<FractionPoint>& series);
std::string figure_profile_csv(const DecreasingMeansReport& report, const GridSpec& grid);
std::string count_report_csv(const CountReport& report);

/// Summary table with one row per estimand: Parameter, Estimate (se),
/// sub-treatment-data flag, incongruity flag.
std::string estimate_markdown(const std::vector<BootstrapResult>& rows);

}  // namespace aggtreat
