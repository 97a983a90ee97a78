#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "probevol/rng.hpp"

namespace probevol {

/// One normal component of a speed mixture, parameterised before truncation.
struct SpeedComponent {
  double mean = 0.0;    ///< m/s
  double sd = 1.0;      ///< m/s, > 0
  double weight = 1.0;  ///< mixture proportion in [0, 1]
};

/// Probe speed population g(s): a finite mixture of normals, each truncated
/// to the common support (lower, upper].
///
/// Weights that sum to 1 within 1e-9 are renormalised to sum exactly to 1;
/// anything further off is rejected.
class SpeedDistribution {
 public:
  SpeedDistribution(std::vector<SpeedComponent> components, double lower, double upper);

  const std::vector<SpeedComponent>& components() const noexcept { return components_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

  /// Density at s; zero outside (lower, upper].
  double pdf(double s) const noexcept;
  /// P(S <= s), evaluated in closed form from the normal CDF.
  double cdf(double s) const noexcept;
  /// P(a < S <= b), closed form. Robust in both tails.
  double mass(double a, double b) const noexcept;
  /// Closed-form mean of the truncated mixture.
  double mean() const noexcept;

  /// Quadrature breakpoints that resolve each component's peak
  /// (mean + k*sd for a fixed set of k), clipped to the open support.
  std::span<const double> shape_breakpoints() const noexcept { return shape_breakpoints_; }

  /// Maps two uniforms in (0,1) to a draw: the first picks the component by
  /// weight, the second is pushed through that component's truncated inverse CDF.
  double quantile_draw(double u_component, double u_value) const noexcept;

  template <class Rng>
  double draw(Rng& rng) const {
    const double a = uniform_open01(rng);
    const double b = uniform_open01(rng);
    return quantile_draw(a, b);
  }

 private:
  struct Truncation {
    double z_lo;      // (lower - mean) / sd
    double z_hi;      // (upper - mean) / sd
    double norm;      // Phi(z_hi) - Phi(z_lo)
    bool upper_tail;  // interval lies above the mean; use survival functions
  };

  std::vector<SpeedComponent> components_;
  std::vector<Truncation> trunc_;
  std::vector<double> cumulative_weight_;
  std::vector<double> shape_breakpoints_;
  double lower_;
  double upper_;
};

/// Point density of g. Same as dist.pdf(s).
double eval_pdf(const SpeedDistribution& dist, double s) noexcept;

/// count i.i.d. draws from g; a pure function of (dist, count, seed).
std::vector<double> sample(const SpeedDistribution& dist, std::size_t count, std::uint64_t seed);

using WeightFunction = std::function<double(double)>;

inline constexpr int kDefaultQuadratureOrder = 32;

/// Integral of weight(s) * g(s) over the support.
///
/// The support is cut at every supplied breakpoint and at the distribution's
/// own shape breakpoints; each piece gets a fixed-order Gauss-Legendre rule.
/// Throws NumericalError if weight returns a non-finite value.
double integrate_weighted(const SpeedDistribution& dist, const WeightFunction& weight,
                          std::span<const double> breakpoints,
                          int order = kDefaultQuadratureOrder);

/// Same as above, restricted to (a, b] intersected with the support.
double integrate_weighted(const SpeedDistribution& dist, const WeightFunction& weight,
                          std::span<const double> breakpoints, double a, double b,
                          int order = kDefaultQuadratureOrder);

/// Gauss-Legendre nodes and weights on [-1, 1]. Cached per order.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendreRule& gauss_legendre(int order);

/// Standard normal CDF and survival function.
double normal_cdf(double z) noexcept;
double normal_sf(double z) noexcept;

}  // namespace probevol
