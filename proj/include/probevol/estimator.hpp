#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "probevol/footprint_data.hpp"

namespace probevol {

/// Probe-volume estimate m_hat = (t/d) * sum of in-cordon speeds.
struct VolumeEstimate {
  double m_hat = 0.0;
  std::size_t n = 0;
  double d = 0.0;
  double t = 0.0;
};

VolumeEstimate estimate_probe_volume(const CordonSample& sample);

/// Neumaier-compensated sum. Result does not depend on summation order
/// beyond rounding of the final value.
double compensated_sum(std::span<const double> values) noexcept;

/// Values of d/(s*t) within this distance of an integer are snapped to it
/// before taking floor or fractional part.
inline constexpr double kIntegerSnap = 1e-12;

/// d/(s*t) with the integer snap applied.
double records_per_pass(double s, double d, double t);

/// Guaranteed number of records a probe at speed s leaves: floor(d/(s*t)).
std::int64_t min_records(double s, double d, double t);

/// Probability of one extra record: d/(s*t) mod 1, in [0, 1).
double extra_record_prob(double s, double d, double t);

}  // namespace probevol
