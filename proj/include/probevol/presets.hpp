#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "probevol/probe_simulator.hpp"
#include "probevol/speed_model.hpp"

namespace probevol {

/// Built-in speed distributions: "park-i35", "table2-60mph", "table2-30mph".
bool is_speed_preset(std::string_view name);
SpeedDistribution speed_preset(std::string_view name);
std::vector<std::string> speed_preset_names();

/// Built-in scenarios "s1" (d=300, t=4) and "s2" (d=40, t=1), both on park-i35.
bool is_scenario_preset(std::string_view name);
ScenarioConfig scenario_preset(std::string_view name);

/// The 34 rural sites used by the calibration experiment.
std::vector<SiteConfig> table2_sites();

}  // namespace probevol
