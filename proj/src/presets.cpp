#include "probevol/presets.hpp"

#include "probevol/config_io.hpp"
#include "probevol/embedded_sites.hpp"
#include "probevol/embedded_speed_presets.hpp"
#include "probevol/errors.hpp"

namespace probevol {

namespace {

const json& speed_presets() {
  static const json doc = json::parse(embedded::kSpeedPresetsJson);
  return doc;
}

struct ScenarioPreset {
  std::string_view name;
  double d;
  double t;
};

constexpr ScenarioPreset kScenarios[] = {{"s1", 300.0, 4.0}, {"s2", 40.0, 1.0}};

}  // namespace

bool is_speed_preset(std::string_view name) {
  return speed_presets().contains(std::string(name));
}

SpeedDistribution speed_preset(std::string_view name) {
  if (!is_speed_preset(name))
    throw InvalidArgument("unknown speed distribution preset: " + std::string(name));
  return speed_distribution_from_json(speed_presets().at(std::string(name)));
}

std::vector<std::string> speed_preset_names() {
  std::vector<std::string> names;
  for (const auto& item : speed_presets().items()) names.push_back(item.key());
  return names;
}

bool is_scenario_preset(std::string_view name) {
  for (const auto& s : kScenarios)
    if (s.name == name) return true;
  return false;
}

ScenarioConfig scenario_preset(std::string_view name) {
  for (const auto& s : kScenarios)
    if (s.name == name) return ScenarioConfig{s.d, s.t, 0, speed_preset("park-i35"), 1, 0};
  throw InvalidArgument("unknown scenario preset: " + std::string(name));
}

std::vector<SiteConfig> table2_sites() {
  static const json doc = json::parse(embedded::kTable2SitesJson);
  return sites_from_json(doc);
}

}  // namespace probevol
