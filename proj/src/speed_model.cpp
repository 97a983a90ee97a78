#include "probevol/speed_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "probevol/errors.hpp"

namespace probevol {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
constexpr double kWeightSumTolerance = 1e-9;
constexpr std::array<double, 13> kShapeOffsets = {-8, -6, -4, -3, -2, -1, 0, 1, 2, 3, 4, 6, 8};

double std_normal_pdf(double z) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// Newton iteration on the three-term Legendre recurrence.
GaussLegendreRule compute_rule(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

}  // namespace

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double normal_sf(double z) noexcept { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

const GaussLegendreRule& gauss_legendre(int order) {
  static std::mutex mutex;
  static std::map<int, GaussLegendreRule> cache;
  if (order < 1 || order > 512) throw InvalidArgument("quadrature order must be in [1, 512]");
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

SpeedDistribution::SpeedDistribution(std::vector<SpeedComponent> components, double lower,
                                     double upper)
    : components_(std::move(components)), lower_(lower), upper_(upper) {
  detail::require(!components_.empty(), "speed distribution needs at least one component");
  detail::require(std::isfinite(lower_) && std::isfinite(upper_),
                  "speed distribution bounds must be finite");
  detail::require(lower_ >= 0.0, "speed distribution lower bound must be >= 0");
  detail::require(lower_ < upper_, "speed distribution requires lower < upper");

  double total = 0.0;
  for (const auto& c : components_) {
    detail::require(std::isfinite(c.mean), "component mean must be finite");
    detail::require(std::isfinite(c.sd) && c.sd > 0.0, "component sd must be > 0");
    detail::require(c.weight >= 0.0 && c.weight <= 1.0, "component weight must lie in [0, 1]");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    std::ostringstream msg;
    msg << "component weights sum to " << total << ", expected 1 within "
        << kWeightSumTolerance;
    throw InvalidArgument(msg.str());
  }
  for (auto& c : components_) c.weight /= total;

  double running = 0.0;
  for (const auto& c : components_) {
    Truncation tr{};
    tr.z_lo = (lower_ - c.mean) / c.sd;
    tr.z_hi = (upper_ - c.mean) / c.sd;
    tr.upper_tail = tr.z_lo > 0.0;
    tr.norm = tr.upper_tail ? normal_sf(tr.z_lo) - normal_sf(tr.z_hi)
                            : normal_cdf(tr.z_hi) - normal_cdf(tr.z_lo);
    if (!(tr.norm > 0.0) && c.weight > 0.0) {
      throw InvalidArgument("component has no probability mass inside (lower, upper]");
    }
    trunc_.push_back(tr);
    running += c.weight;
    cumulative_weight_.push_back(running);
  }
  cumulative_weight_.back() = 1.0;

  for (const auto& c : components_) {
    for (double k : kShapeOffsets) {
      const double x = c.mean + k * c.sd;
      if (x > lower_ && x < upper_) shape_breakpoints_.push_back(x);
    }
  }
  std::sort(shape_breakpoints_.begin(), shape_breakpoints_.end());
  shape_breakpoints_.erase(std::unique(shape_breakpoints_.begin(), shape_breakpoints_.end()),
                           shape_breakpoints_.end());
}

double SpeedDistribution::pdf(double s) const noexcept {
  if (!(s > lower_ && s <= upper_)) return 0.0;
  double g = 0.0;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    const auto& c = components_[j];
    if (c.weight == 0.0) continue;
    g += c.weight * std_normal_pdf((s - c.mean) / c.sd) / (c.sd * trunc_[j].norm);
  }
  return g;
}

double SpeedDistribution::mass(double a, double b) const noexcept {
  a = std::max(a, lower_);
  b = std::min(b, upper_);
  if (!(b > a)) return 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    const auto& c = components_[j];
    if (c.weight == 0.0) continue;
    const double za = (a - c.mean) / c.sd;
    const double zb = (b - c.mean) / c.sd;
    const double piece = za > 0.0 ? normal_sf(za) - normal_sf(zb) : normal_cdf(zb) - normal_cdf(za);
    total += c.weight * piece / trunc_[j].norm;
  }
  return total;
}

double SpeedDistribution::cdf(double s) const noexcept {
  if (s <= lower_) return 0.0;
  if (s >= upper_) return 1.0;
  return mass(lower_, s);
}

double SpeedDistribution::mean() const noexcept {
  double total = 0.0;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    const auto& c = components_[j];
    const auto& tr = trunc_[j];
    if (c.weight == 0.0) continue;
    const double shift = (std_normal_pdf(tr.z_lo) - std_normal_pdf(tr.z_hi)) / tr.norm;
    total += c.weight * (c.mean + c.sd * shift);
  }
  return total;
}

double SpeedDistribution::quantile_draw(double u_component, double u_value) const noexcept {
  std::size_t j = 0;
  while (j + 1 < cumulative_weight_.size() && u_component >= cumulative_weight_[j]) ++j;
  const auto& c = components_[j];
  const auto& tr = trunc_[j];

  double z;
  if (tr.upper_tail) {
    const double q = normal_sf(tr.z_lo) - u_value * tr.norm;
    if (!(q > 0.0)) return upper_;
    if (q >= 1.0) return std::nextafter(lower_, upper_);
    z = std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
  } else {
    const double p = normal_cdf(tr.z_lo) + u_value * tr.norm;
    if (!(p > 0.0)) return std::nextafter(lower_, upper_);
    if (p >= 1.0) return upper_;
    z = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
  }
  const double x = c.mean + c.sd * z;
  if (x <= lower_) return std::nextafter(lower_, upper_);
  if (x > upper_) return upper_;
  return x;
}

double eval_pdf(const SpeedDistribution& dist, double s) noexcept { return dist.pdf(s); }

std::vector<double> sample(const SpeedDistribution& dist, std::size_t count, std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(count);
  CounterRng rng(seed);
  for (std::size_t i = 0; i < count; ++i) out.push_back(dist.draw(rng));
  return out;
}

double integrate_weighted(const SpeedDistribution& dist, const WeightFunction& weight,
                          std::span<const double> breakpoints, int order) {
  return integrate_weighted(dist, weight, breakpoints, dist.lower(), dist.upper(), order);
}

double integrate_weighted(const SpeedDistribution& dist, const WeightFunction& weight,
                          std::span<const double> breakpoints, double a, double b, int order) {
  const double lo = std::max(a, dist.lower());
  const double hi = std::min(b, dist.upper());
  if (!(hi > lo)) return 0.0;

  std::vector<double> cuts;
  cuts.reserve(breakpoints.size() + 16);
  cuts.push_back(lo);
  for (double x : breakpoints)
    if (x > lo && x < hi) cuts.push_back(x);
  const auto shape = dist.shape_breakpoints();
  auto first = std::upper_bound(shape.begin(), shape.end(), lo);
  for (auto it = first; it != shape.end() && *it < hi; ++it) cuts.push_back(*it);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto& rule = gauss_legendre(order);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double half = 0.5 * (cuts[i + 1] - cuts[i]);
    const double mid = 0.5 * (cuts[i + 1] + cuts[i]);
    double piece = 0.0;
    double density = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double s = mid + half * rule.nodes[k];
      const double w = weight(s);
      if (!std::isfinite(w)) {
        std::ostringstream msg;
        msg << "weight function returned " << w << " at s=" << s;
        throw NumericalError(msg.str());
      }
      const double g = rule.weights[k] * dist.pdf(s);
      piece += g * w;
      density += g;
    }
    // Normalise each panel to its exact mass; panels narrower than the
    // rounding of their nodes would otherwise lose probability.
    const double exact = dist.mass(cuts[i], cuts[i + 1]);
    total += density > 0.0 ? exact * (piece / density) : half * piece;
  }
  return total;
}

}  // namespace probevol
