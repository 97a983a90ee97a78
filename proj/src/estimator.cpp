#include "probevol/estimator.hpp"

#include <cmath>

#include "probevol/errors.hpp"

namespace probevol {

namespace {
void require_positive(double s, double d, double t) {
  detail::require(s > 0.0 && std::isfinite(s), "speed s must be > 0");
  detail::require(d > 0.0 && std::isfinite(d), "cordon length d must be > 0");
  detail::require(t > 0.0 && std::isfinite(t), "recording interval t must be > 0");
}
}  // namespace

double compensated_sum(std::span<const double> values) noexcept {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double next = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - next) + v;
    else
      carry += (v - next) + sum;
    sum = next;
  }
  return sum + carry;
}

VolumeEstimate estimate_probe_volume(const CordonSample& sample) {
  detail::require(sample.d > 0.0 && std::isfinite(sample.d), "sample d must be > 0");
  detail::require(sample.t > 0.0 && std::isfinite(sample.t), "sample t must be > 0");
  for (double s : sample.speeds)
    detail::require(s > 0.0 && std::isfinite(s), "sample speeds must be > 0");
  VolumeEstimate est;
  est.n = sample.speeds.size();
  est.d = sample.d;
  est.t = sample.t;
  est.m_hat = est.n == 0 ? 0.0 : (sample.t / sample.d) * compensated_sum(sample.speeds);
  return est;
}

double records_per_pass(double s, double d, double t) {
  require_positive(s, d, t);
  const double r = d / (s * t);
  const double nearest = std::round(r);
  return std::abs(r - nearest) < kIntegerSnap ? nearest : r;
}

std::int64_t min_records(double s, double d, double t) {
  return static_cast<std::int64_t>(std::floor(records_per_pass(s, d, t)));
}

double extra_record_prob(double s, double d, double t) {
  const double r = records_per_pass(s, d, t);
  return r - std::floor(r);
}

}  // namespace probevol
