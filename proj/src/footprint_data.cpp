#include "probevol/footprint_data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>

#include "probevol/errors.hpp"

namespace probevol {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::optional<double> parse_double(std::string_view s) {
  double value = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return value;
}

}  // namespace

bool in_cordon(const FootprintRecord& record, const CordonSpec& cordon) noexcept {
  if (!(record.position > cordon.start && record.position <= cordon.start + cordon.length))
    return false;
  if (cordon.label_filter) return record.label && *record.label == *cordon.label_filter;
  return true;
}

std::vector<FootprintRecord> filter_records(const std::vector<FootprintRecord>& records,
                                            const CordonSpec& cordon, std::size_t* dropped) {
  detail::require(std::isfinite(cordon.start), "cordon start must be finite");
  detail::require(cordon.length > 0.0 && std::isfinite(cordon.length),
                  "cordon length must be > 0");
  std::vector<FootprintRecord> kept;
  std::size_t bad = 0;
  for (const auto& r : records) {
    if (!in_cordon(r, cordon)) continue;
    if (!(r.speed > 0.0) || !std::isfinite(r.speed)) {
      ++bad;
      continue;
    }
    kept.push_back(r);
  }
  if (dropped) *dropped = bad;
  return kept;
}

CropResult crop_to_cordon(const std::vector<FootprintRecord>& records, const CordonSpec& cordon,
                          double t) {
  detail::require(t > 0.0 && std::isfinite(t), "recording interval t must be > 0");
  CropResult result;
  const auto kept = filter_records(records, cordon, &result.dropped_nonpositive_speed);
  result.sample.d = cordon.length;
  result.sample.t = t;
  result.sample.speeds.reserve(kept.size());
  for (const auto& r : kept) result.sample.speeds.push_back(r.speed);
  return result;
}

FootprintCsv read_footprints_csv(std::istream& in, bool strict) {
  FootprintCsv out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;

  auto reject = [&](std::string message) {
    if (strict) {
      std::ostringstream msg;
      msg << "footprint CSV line " << line_no << ": " << message;
      throw IoError(msg.str());
    }
    out.skipped.push_back({line_no, std::move(message)});
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
      line.erase(0, 3);
    const auto view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_commas(view);
    if (!header_seen) {
      header_seen = true;
      const bool ok = fields.size() >= 2 && fields.size() <= 3 && fields[0] == "position_m" &&
                      fields[1] == "speed_mps" && (fields.size() == 2 || fields[2] == "label");
      if (!ok) throw IoError("footprint CSV header must be position_m,speed_mps[,label]");
      continue;
    }
    if (fields.size() < 2 || fields.size() > 3) {
      reject("expected 2 or 3 fields");
      continue;
    }
    const auto position = parse_double(fields[0]);
    const auto speed = parse_double(fields[1]);
    if (!position || !std::isfinite(*position)) {
      reject("unparseable position");
      continue;
    }
    if (!speed || !std::isfinite(*speed)) {
      reject("unparseable speed");
      continue;
    }
    FootprintRecord rec{*position, *speed, std::nullopt};
    if (fields.size() == 3 && !fields[2].empty()) rec.label = std::string(fields[2]);
    out.records.push_back(std::move(rec));
  }
  return out;
}

FootprintCsv read_footprints_csv(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open footprint CSV: " + path.string());
  return read_footprints_csv(in, strict);
}

void write_footprints_csv(std::ostream& out, const std::vector<FootprintRecord>& records) {
  bool any_label = false;
  for (const auto& r : records) any_label = any_label || r.label.has_value();
  out << (any_label ? "position_m,speed_mps,label\n" : "position_m,speed_mps\n");
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : records) {
    out << r.position << ',' << r.speed;
    if (any_label) out << ',' << r.label.value_or("");
    out << '\n';
  }
  out.precision(old_precision);
}

void write_footprints_csv(const std::filesystem::path& path,
                          const std::vector<FootprintRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write footprint CSV: " + path.string());
  write_footprints_csv(out, records);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace probevol
