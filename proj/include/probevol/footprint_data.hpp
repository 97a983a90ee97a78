#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace probevol {

/// A single probe point: where it was recorded along the segment axis and
/// the speed it reported. No probe identifier is kept.
struct FootprintRecord {
  double position = 0.0;             ///< m along the segment axis
  double speed = 0.0;                ///< m/s
  std::optional<std::string> label;  ///< nominal time-range tag
};

/// Virtual cordon (start, start + length] with an optional label filter.
struct CordonSpec {
  double start = 0.0;
  double length = 0.0;
  std::optional<std::string> label_filter;
};

/// Speeds of the records found inside one cordon for one observation window.
struct CordonSample {
  std::vector<double> speeds;  ///< m/s, all > 0
  double d = 0.0;              ///< cordon length, m
  double t = 0.0;              ///< recording interval, s

  std::size_t n() const noexcept { return speeds.size(); }
};

struct CropResult {
  CordonSample sample;
  std::size_t dropped_nonpositive_speed = 0;
};

bool in_cordon(const FootprintRecord& record, const CordonSpec& cordon) noexcept;

/// Records that fall inside the cordon and match its label filter, in input
/// order. Records with speed <= 0 are excluded and counted in *dropped.
std::vector<FootprintRecord> filter_records(const std::vector<FootprintRecord>& records,
                                            const CordonSpec& cordon,
                                            std::size_t* dropped = nullptr);

CropResult crop_to_cordon(const std::vector<FootprintRecord>& records, const CordonSpec& cordon,
                          double t);

struct CsvIssue {
  std::size_t line = 0;
  std::string message;
};

struct FootprintCsv {
  std::vector<FootprintRecord> records;
  std::vector<CsvIssue> skipped;
};

/// Reads `position_m,speed_mps[,label]`. Malformed rows are skipped and
/// reported, or raise IoError when strict is set.
FootprintCsv read_footprints_csv(std::istream& in, bool strict = false);
FootprintCsv read_footprints_csv(const std::filesystem::path& path, bool strict = false);

/// Writes with round-trip precision so a reread reproduces every double.
void write_footprints_csv(std::ostream& out, const std::vector<FootprintRecord>& records);
void write_footprints_csv(const std::filesystem::path& path,
                          const std::vector<FootprintRecord>& records);

}  // namespace probevol
