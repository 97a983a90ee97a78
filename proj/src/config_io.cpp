#include "probevol/config_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "probevol/errors.hpp"
#include "probevol/presets.hpp"

namespace probevol {

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

const json& field(const json& doc, const char* key, const std::string& where) {
  if (!doc.is_object() || !doc.contains(key))
    throw InvalidArgument(where + ": missing field '" + key + "'");
  return doc.at(key);
}

double number(const json& doc, const char* key, const std::string& where) {
  const auto& v = field(doc, key, where);
  if (!v.is_number()) throw InvalidArgument(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t integer(const json& doc, const char* key, const std::string& where) {
  const auto& v = field(doc, key, where);
  if (!v.is_number_integer()) throw InvalidArgument(where + ": '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

SpeedDistribution dist_field(const json& doc, const std::string& where) {
  const auto& v = field(doc, "dist", where);
  if (v.is_string()) return speed_preset(v.get<std::string>());
  return speed_distribution_from_json(v);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool parse_double(const std::string& text, double& out) {
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

SpeedDistribution speed_distribution_from_json(const json& doc) {
  const std::string where = "speed distribution";
  const auto& comps = field(doc, "components", where);
  if (!comps.is_array() || comps.empty())
    throw InvalidArgument(where + ": 'components' must be a non-empty array");
  std::vector<SpeedComponent> components;
  for (const auto& c : comps)
    components.push_back({number(c, "mean", where), number(c, "sd", where),
                          number(c, "weight", where)});
  if (doc.contains("renormalize")) {
    const auto& flag = doc.at("renormalize");
    if (!flag.is_boolean()) throw InvalidArgument(where + ": 'renormalize' must be a boolean");
    if (flag.get<bool>()) {
      double total = 0.0;
      for (const auto& c : components) total += c.weight;
      if (!(total > 0.0)) throw InvalidArgument(where + ": weights sum to zero");
      for (auto& c : components) c.weight /= total;
    }
  }
  return SpeedDistribution(std::move(components), number(doc, "lower", where),
                           number(doc, "upper", where));
}

json to_json(const SpeedDistribution& dist) {
  json comps = json::array();
  for (const auto& c : dist.components())
    comps.push_back({{"mean", c.mean}, {"sd", c.sd}, {"weight", c.weight}});
  return {{"components", comps}, {"lower", dist.lower()}, {"upper", dist.upper()}};
}

SpeedDistribution load_speed_distribution(const std::filesystem::path& path) {
  return speed_distribution_from_json(read_json_file(path));
}

void save_speed_distribution(const std::filesystem::path& path, const SpeedDistribution& dist) {
  auto out = open_output(path);
  out << to_json(dist).dump(2) << '\n';
}

SpeedDistribution resolve_speed_distribution(std::string_view name_or_path) {
  if (is_speed_preset(name_or_path)) return speed_preset(name_or_path);
  const std::filesystem::path path(name_or_path);
  if (!std::filesystem::exists(path))
    throw InvalidArgument("--dist is neither a preset (" + [] {
      std::string names;
      for (const auto& n : speed_preset_names()) names += (names.empty() ? "" : ", ") + n;
      return names;
    }() + ") nor an existing file: " + std::string(name_or_path));
  return load_speed_distribution(path);
}

ScenarioConfig scenario_from_json(const json& doc) {
  const std::string where = "scenario";
  return ScenarioConfig{number(doc, "d", where), number(doc, "t", where), 0,
                        dist_field(doc, where), 1, 0};
}

json to_json(const ScenarioConfig& config) {
  return {{"d", config.d}, {"t", config.t}, {"dist", to_json(config.dist)}};
}

ScenarioConfig resolve_scenario(std::string_view name_or_path) {
  if (is_scenario_preset(name_or_path)) return scenario_preset(name_or_path);
  const std::filesystem::path path(name_or_path);
  if (!std::filesystem::exists(path))
    throw InvalidArgument("--scenario is neither s1, s2 nor an existing file: " +
                          std::string(name_or_path));
  return scenario_from_json(read_json_file(path));
}

std::vector<SiteConfig> sites_from_json(const json& doc) {
  const auto& list = field(doc, "sites", "sites file");
  if (!list.is_array()) throw InvalidArgument("sites file: 'sites' must be an array");
  std::vector<SiteConfig> sites;
  for (const auto& s : list) {
    const auto& id = field(s, "site_id", "site");
    if (!id.is_string()) throw InvalidArgument("site: 'site_id' must be a string");
    const std::string where = "site " + id.get<std::string>();
    const double t = s.contains("t") ? number(s, "t", where) : 1.0;
    sites.push_back(SiteConfig{id.get<std::string>(), number(s, "adt", where),
                               integer(s, "m", where), number(s, "d", where),
                               dist_field(s, where), t});
  }
  return sites;
}

json to_json(const std::vector<SiteConfig>& sites) {
  json list = json::array();
  for (const auto& s : sites)
    list.push_back({{"site_id", s.site_id},
                    {"adt", s.adt},
                    {"m", s.m},
                    {"d", s.d},
                    {"t", s.t},
                    {"dist", to_json(s.dist)}});
  return {{"sites", list}};
}

std::vector<SiteConfig> resolve_sites(std::string_view name_or_path) {
  if (name_or_path == "table2") return table2_sites();
  const std::filesystem::path path(name_or_path);
  if (!std::filesystem::exists(path))
    throw InvalidArgument("--sites is neither table2 nor an existing file: " +
                          std::string(name_or_path));
  return sites_from_json(read_json_file(path));
}

std::vector<CalibrationPair> read_pairs_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool has_weight = false;
  bool seen_header = false;
  std::vector<CalibrationPair> pairs;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (!seen_header) {
      if (cells.size() >= 2 && cells[0] == "m_hat" && cells[1] == "adt" &&
          (cells.size() == 2 || (cells.size() == 3 && cells[2] == "weight"))) {
        has_weight = cells.size() == 3;
        seen_header = true;
        continue;
      }
      throw IoError("pairs CSV line " + std::to_string(line_no) +
                    ": expected header m_hat,adt[,weight]");
    }
    const std::size_t want = has_weight ? 3 : 2;
    CalibrationPair p;
    if (cells.size() != want || !parse_double(cells[0], p.m_hat) ||
        !parse_double(cells[1], p.known_volume) || (has_weight && !parse_double(cells[2], p.weight)))
      throw IoError("pairs CSV line " + std::to_string(line_no) + ": malformed row");
    pairs.push_back(p);
  }
  if (!seen_header) throw IoError("pairs CSV is empty");
  return pairs;
}

std::vector<CalibrationPair> read_pairs_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_pairs_csv(in);
}

void write_pairs_csv(std::ostream& out, const std::vector<CalibrationPair>& pairs) {
  out << "m_hat,adt,weight\n";
  out.precision(17);
  for (const auto& p : pairs) out << p.m_hat << ',' << p.known_volume << ',' << p.weight << '\n';
}

json to_json(const VolumeEstimate& e) {
  return {{"m_hat", e.m_hat}, {"n", e.n}, {"d", e.d}, {"t", e.t}};
}

json to_json(const PrecisionReport& r) {
  return {{"m", r.m},     {"d", r.d},     {"t", r.t},  {"mean", r.mean},
          {"variance", r.variance}, {"vmr", r.vmr}, {"cv", r.cv}};
}

json to_json(const OptimumReport& r) {
  json curve = json::array();
  for (const auto& p : r.curve) curve.push_back({p.d, p.value});
  json doc = {{"best_d", r.best_d},
              {"best_objective", r.best_objective},
              {"objective", std::string(to_string(r.objective_kind))},
              {"t", r.t},
              {"curve", curve}};
  if (r.objective_kind == Objective::Cv) doc["m"] = r.m;
  return doc;
}

json to_json(const CalibrationModel& m) {
  return {{"beta", m.beta},
          {"method", std::string(to_string(m.method))},
          {"pairs", m.pairs},
          {"zero_m_hat_pairs", m.zero_m_hat_pairs}};
}

json to_json(const ExperimentReport& r, bool include_trials) {
  json sites = json::array();
  for (std::size_t i = 0; i < r.site_ids.size(); ++i)
    sites.push_back({{"site_id", r.site_ids[i]}, {"vmr", r.site_vmr[i]}});
  json doc = {{"trials", r.trials},
              {"pairs_per_trial", r.pairs_per_trial},
              {"wls_win_fraction", r.wls_win_fraction},
              {"mean_avg_mape_ols", r.mean_avg_mape_ols},
              {"mean_avg_mape_wls", r.mean_avg_mape_wls},
              {"sites", sites}};
  if (include_trials) {
    json ols = json::array();
    json wls = json::array();
    for (const auto& o : r.per_trial) {
      ols.push_back(o.avg_mape_ols);
      wls.push_back(o.avg_mape_wls);
    }
    doc["per_trial"] = {{"avg_mape_ols", ols}, {"avg_mape_wls", wls}};
  }
  return doc;
}

void write_pdf_csv(std::ostream& out, const VolumePdf& pdf, std::int64_t m) {
  const auto mom = pdf_moments(pdf);
  const auto flags = out.flags();
  out.precision(kCsvDigits);
  out << "# atom=" << pdf.atom_at_zero << ",mean=" << mom.mean << ",variance=" << mom.variance
      << ",vmr=" << (m > 0 ? mom.variance / static_cast<double>(m) : 0.0)
      << ",cv=" << (mom.mean > 0 ? std::sqrt(mom.variance) / mom.mean : 0.0) << '\n';
  out << "m_hat,density\n";
  for (std::size_t i = 0; i < pdf.size(); ++i) out << pdf.x(i) << ',' << pdf.densities[i] << '\n';
  out.flags(flags);
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve, Objective kind) {
  const auto flags = out.flags();
  out.precision(kCsvDigits);
  out << "d," << to_string(kind) << '\n';
  for (const auto& p : curve) out << p.d << ',' << p.value << '\n';
  out.flags(flags);
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  const auto flags = out.flags();
  out.precision(kCsvDigits);
  const auto probs = h.probabilities();
  out << "bin_lo,bin_hi,count,probability\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double lo = h.bin_start + static_cast<double>(i) * h.bin_width;
    out << lo << ',' << lo + h.bin_width << ',' << h.counts[i] << ',' << probs[i] << '\n';
  }
  out.flags(flags);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.exceptions(std::ios::badbit);
  return out;
}

}  // namespace probevol
