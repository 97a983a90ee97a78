#include "probevol/distribution_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "probevol/errors.hpp"
#include "probevol/estimator.hpp"

namespace probevol {

namespace {

constexpr double kKinkFloorFraction = 1e-3;
constexpr double kNegligibleTailMass = 1e-15;
constexpr std::size_t kMinGridPoints = 100;
constexpr double kNormalizationTolerance = 1e-6;

void require_geometry(double d, double t) {
  detail::require(d > 0.0 && std::isfinite(d), "cordon length d must be > 0");
  detail::require(t > 0.0 && std::isfinite(t), "recording interval t must be > 0");
}

}  // namespace

double VolumePdf::continuous_mass() const noexcept {
  return grid_step * std::accumulate(densities.begin(), densities.end(), 0.0);
}

double bernoulli_var_term(double s, double d, double t) {
  const double p = extra_record_prob(s, d, t);
  return s * s * p * (1.0 - p);
}

std::vector<double> variance_breakpoints(double d, double t, const SpeedDistribution& dist) {
  require_geometry(d, t);
  const double floor_speed = std::max(dist.lower(), kKinkFloorFraction * dist.upper());
  const double ratio = d / t;
  std::vector<double> kinks;
  auto j = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(ratio / dist.upper())));
  for (;; ++j) {
    const double s = ratio / static_cast<double>(j);
    if (s >= dist.upper()) continue;
    if (s <= floor_speed) break;
    kinks.push_back(s);
  }
  std::reverse(kinks.begin(), kinks.end());
  return kinks;
}

double variance_kernel_integral(double d, double t, const SpeedDistribution& dist) {
  const auto kinks = variance_breakpoints(d, t, dist);
  return integrate_weighted(
      dist, [d, t](double s) { return bernoulli_var_term(s, d, t); }, kinks);
}

double vmr(double d, double t, const SpeedDistribution& dist) {
  require_geometry(d, t);
  return (t * t) / (d * d) * variance_kernel_integral(d, t, dist);
}

double variance(std::int64_t m, double d, double t, const SpeedDistribution& dist) {
  detail::require(m >= 0, "probe count m must be >= 0");
  require_geometry(d, t);
  if (m == 0) return 0.0;
  return static_cast<double>(m) * vmr(d, t, dist);
}

double cv(std::int64_t m, double d, double t, const SpeedDistribution& dist) {
  detail::require(m >= 1, "CV is undefined for m = 0");
  return std::sqrt(variance(m, d, t, dist)) / static_cast<double>(m);
}

PrecisionReport precision(std::int64_t m, double d, double t, const SpeedDistribution& dist) {
  detail::require(m >= 1, "precision report needs m >= 1");
  PrecisionReport r;
  r.m = m;
  r.d = d;
  r.t = t;
  r.mean = static_cast<double>(m);
  r.vmr = vmr(d, t, dist);
  r.variance = static_cast<double>(m) * r.vmr;
  r.cv = std::sqrt(r.variance) / static_cast<double>(m);
  return r;
}

SingleProbeBuild build_single_probe_pdf(double d, double t, const SpeedDistribution& dist,
                                        double grid_step) {
  require_geometry(d, t);
  detail::require(grid_step > 0.0 && std::isfinite(grid_step), "grid_step must be > 0");
  const double h = grid_step;
  const double max_mhat = std::max(2.0, dist.upper() * t * (1.0 + h) / d);
  const double cells = std::ceil(max_mhat / h) + 1.0;
  detail::require(cells >= static_cast<double>(kMinGridPoints),
                  "grid_step too coarse: fewer than 100 grid points cover the support");
  detail::require(cells < 5e7, "grid_step too fine for the m_hat support");
  const auto n = static_cast<std::size_t>(cells);

  SingleProbeBuild build;
  std::vector<double> mass(n, 0.0);
  const auto cell_of = [&](double x) {
    const double i = std::floor(x / h + 0.5);
    return static_cast<std::size_t>(std::clamp(i, 0.0, static_cast<double>(n - 1)));
  };

  // m_hat = c * s on s in (sa, sb]; each cell receives the g-mass of its
  // preimage weighted by the Bernoulli outcome probability.
  const auto deposit = [&](double sa, double sb, double c, const WeightFunction& w) {
    if (!(sb > sa)) return 0.0;
    const std::size_t first = cell_of(sa * c);
    const std::size_t last = cell_of(sb * c);
    const std::size_t i0 = first == 0 ? 0 : first - 1;
    const std::size_t i1 = std::min(n - 1, last + 1);
    double total = 0.0;
    for (std::size_t i = i0; i <= i1; ++i) {
      const double di = static_cast<double>(i);
      const double a = std::max(sa, (di - 0.5) * h / c);
      const double b = std::min(sb, (di + 0.5) * h / c);
      if (!(b > a)) continue;
      const double v = integrate_weighted(dist, w, {}, a, b);
      mass[i] += v;
      total += v;
    }
    return total;
  };

  const double one_record_speed = d / t;

  // u = 0: fast probes. Either one record (k = 1) or none at all.
  if (one_record_speed < dist.upper()) {
    const auto p = [=](double s) { return std::clamp(one_record_speed / s, 0.0, 1.0); };
    const double extra = deposit(one_record_speed, dist.upper(), t / d, p);
    build.bands.push_back({0, 1, extra});
    build.pdf.atom_at_zero = integrate_weighted(
        dist, [&](double s) { return 1.0 - p(s); }, {}, one_record_speed, dist.upper());
    build.bands.push_back({0, 0, build.pdf.atom_at_zero});
  }

  const auto last_band = static_cast<std::int64_t>(std::ceil(8.0 / h));
  std::int64_t u = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::floor(one_record_speed / dist.upper())) - 1);
  std::int64_t resolved = u - 1;
  for (; u <= last_band; ++u) {
    const double du = static_cast<double>(u);
    const double band_hi = one_record_speed / du;
    const double band_lo = one_record_speed / (du + 1.0);
    if (band_hi <= dist.lower()) break;
    resolved = u;
    const double sa = std::max(band_lo, dist.lower());
    const double sb = std::min(band_hi, dist.upper());
    if (!(sb > sa)) continue;
    const auto p = [=](double s) { return std::clamp(one_record_speed / s - du, 0.0, 1.0); };
    const double m0 = deposit(sa, sb, t * du / d, [&](double s) { return 1.0 - p(s); });
    const double m1 = deposit(sa, sb, t * (du + 1.0) / d, p);
    build.bands.push_back({u, 0, m0});
    build.bands.push_back({u, 1, m1});
    if (dist.cdf(sa) < kNegligibleTailMass) break;
  }
  build.last_band = resolved;
  const double residual_top = one_record_speed / (static_cast<double>(resolved) + 1.0);
  build.residual_mass = dist.mass(dist.lower(), residual_top);
  if (build.residual_mass > 0.0) mass[cell_of(1.0)] += build.residual_mass;

  build.pdf.grid_start = 0.0;
  build.pdf.grid_step = h;
  build.pdf.densities.resize(n);
  for (std::size_t i = 0; i < n; ++i) build.pdf.densities[i] = mass[i] / h;
  return build;
}

VolumePdf single_probe_pdf(double d, double t, const SpeedDistribution& dist, double grid_step) {
  return build_single_probe_pdf(d, t, dist, grid_step).pdf;
}

Moments normal_approx(std::int64_t m, double d, double t, const SpeedDistribution& dist) {
  detail::require(m >= 1, "normal approximation needs m >= 1");
  return {static_cast<double>(m), variance(m, d, t, dist)};
}

Moments pdf_moments(const VolumePdf& pdf) {
  double total = pdf.atom_at_zero;
  double first = 0.0;
  for (std::size_t i = 0; i < pdf.size(); ++i) {
    const double w = pdf.cell_mass(i);
    total += w;
    first += w * pdf.x(i);
  }
  Moments mo;
  if (!(total > 0.0)) return mo;
  mo.mean = first / total;
  double second = pdf.atom_at_zero * mo.mean * mo.mean;
  for (std::size_t i = 0; i < pdf.size(); ++i) {
    const double dx = pdf.x(i) - mo.mean;
    second += pdf.cell_mass(i) * dx * dx;
  }
  mo.variance = second / total;
  return mo;
}

double pdf_quantile(const VolumePdf& pdf, double p) {
  detail::require(p >= 0.0 && p <= 1.0, "quantile probability must lie in [0, 1]");
  double cum = pdf.atom_at_zero;
  if (pdf.atom_at_zero > 0.0 && p <= cum) return 0.0;
  const double half = 0.5 * pdf.grid_step;
  double last_edge = 0.0;
  for (std::size_t i = 0; i < pdf.size(); ++i) {
    const double w = pdf.cell_mass(i);
    if (!(w > 0.0)) continue;
    const double left = std::max(0.0, pdf.x(i) - half);
    const double right = pdf.x(i) + half;
    if (cum + w >= p) {
      const double frac = std::clamp((p - cum) / w, 0.0, 1.0);
      return left + frac * (right - left);
    }
    cum += w;
    last_edge = right;
  }
  return last_edge;
}

Interval interval_estimate(const VolumePdf& pdf, double level) {
  detail::require(level > 0.0 && level < 1.0, "interval level must lie in (0, 1)");
  detail::require(std::abs(pdf.total_mass() - 1.0) <= kNormalizationTolerance,
                  "interval_estimate needs a normalised pdf");
  const double tail = 0.5 * (1.0 - level);
  return {pdf_quantile(pdf, tail), pdf_quantile(pdf, 1.0 - tail)};
}

std::vector<double> bin_probabilities(const VolumePdf& pdf, double bin_start, double bin_width,
                                      std::size_t bins) {
  detail::require(bin_width > 0.0 && bins > 0, "bins need positive width and count");
  std::vector<double> out(bins, 0.0);
  const auto clamp_bin = [&](double pos) {
    const double b = std::floor((pos - bin_start) / bin_width);
    return static_cast<std::size_t>(std::clamp(b, 0.0, static_cast<double>(bins - 1)));
  };
  out[clamp_bin(0.0)] += pdf.atom_at_zero;
  const double half = 0.5 * pdf.grid_step;
  for (std::size_t i = 0; i < pdf.size(); ++i) {
    const double w = pdf.cell_mass(i);
    if (!(w > 0.0)) continue;
    const double left = std::max(0.0, pdf.x(i) - half);
    const double right = pdf.x(i) + half;
    const std::size_t b0 = clamp_bin(left);
    const std::size_t b1 = clamp_bin(right);
    if (b0 == b1) {
      out[b0] += w;
      continue;
    }
    const double span = right - left;
    double assigned = 0.0;
    for (std::size_t b = b0; b < b1; ++b) {
      const double edge = bin_start + static_cast<double>(b + 1) * bin_width;
      const double lo = std::max(left, bin_start + static_cast<double>(b) * bin_width);
      const double piece = w * std::max(0.0, std::min(edge, right) - lo) / span;
      out[b] += piece;
      assigned += piece;
    }
    out[b1] += w - assigned;
  }
  return out;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  detail::require(p.size() == q.size(), "total_variation needs equal-length inputs");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

bool is_multimodal(std::span<const double> values, double relative_trough) {
  const std::size_t n = values.size();
  if (n < 3) return false;
  std::vector<double> left(n), right(n);
  left[0] = values[0];
  for (std::size_t i = 1; i < n; ++i) left[i] = std::max(left[i - 1], values[i]);
  right[n - 1] = values[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) right[i] = std::max(right[i + 1], values[i]);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double lesser_peak = std::min(left[j - 1], right[j + 1]);
    if (lesser_peak > 0.0 && values[j] <= (1.0 - relative_trough) * lesser_peak) return true;
  }
  return false;
}

}  // namespace probevol
