#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "probevol/calibration.hpp"
#include "probevol/cordon_optimizer.hpp"
#include "probevol/distribution_engine.hpp"
#include "probevol/estimator.hpp"
#include "probevol/probe_simulator.hpp"
#include "probevol/speed_model.hpp"

namespace probevol {

using json = nlohmann::json;

// Speed distributions: {"components": [{mean, sd, weight}], "lower", "upper"}.
// With "renormalize": true the weights are divided by their sum first, for
// published mixtures whose printed weights do not quite add up.
SpeedDistribution speed_distribution_from_json(const json& doc);
json to_json(const SpeedDistribution& dist);
SpeedDistribution load_speed_distribution(const std::filesystem::path& path);
void save_speed_distribution(const std::filesystem::path& path, const SpeedDistribution& dist);

/// A preset name, otherwise a path to a distribution JSON file.
SpeedDistribution resolve_speed_distribution(std::string_view name_or_path);

// Scenarios: {"d", "t", "dist": <preset name | distribution object>}.
// m, trials and seed are left at their defaults for the caller to set.
ScenarioConfig scenario_from_json(const json& doc);
json to_json(const ScenarioConfig& config);
/// "s1", "s2", otherwise a path to a scenario JSON file.
ScenarioConfig resolve_scenario(std::string_view name_or_path);

// Sites: {"sites": [{"site_id", "adt", "m", "d", "t", "dist"}]}.
std::vector<SiteConfig> sites_from_json(const json& doc);
json to_json(const std::vector<SiteConfig>& sites);
/// "table2", otherwise a path to a sites JSON file.
std::vector<SiteConfig> resolve_sites(std::string_view name_or_path);

/// Calibration pairs with header m_hat,adt[,weight]. Malformed rows throw IoError.
std::vector<CalibrationPair> read_pairs_csv(std::istream& in);
std::vector<CalibrationPair> read_pairs_csv(const std::filesystem::path& path);
void write_pairs_csv(std::ostream& out, const std::vector<CalibrationPair>& pairs);

json to_json(const VolumeEstimate& e);
json to_json(const PrecisionReport& r);
json to_json(const OptimumReport& r);
json to_json(const CalibrationModel& m);
json to_json(const ExperimentReport& r, bool include_trials);

// Plot-grade CSV writers (9 significant digits).
inline constexpr int kCsvDigits = 9;

/// Header comment "# atom=..,mean=..,variance=..,vmr=..,cv=.." then m_hat,density rows.
void write_pdf_csv(std::ostream& out, const VolumePdf& pdf, std::int64_t m);
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve, Objective kind);
void write_histogram_csv(std::ostream& out, const Histogram& h);

/// Opens path for writing, throwing IoError on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace probevol
