#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "probevol/speed_model.hpp"

namespace probevol {

/// Theoretical precision of m_hat for m probes through a d-metre cordon.
struct PrecisionReport {
  std::int64_t m = 0;
  double d = 0.0;
  double t = 0.0;
  double mean = 0.0;      ///< E[m_hat] = m
  double variance = 0.0;  ///< m * vmr
  double vmr = 0.0;
  double cv = 0.0;        ///< sqrt(variance) / m
};

/// Density of m_hat on the uniform grid x_i = grid_start + i * grid_step.
///
/// densities[i] is the average density over the cell
/// [x_i - step/2, x_i + step/2), so step * sum(densities) is the continuous
/// mass. Probes that leave no record at all contribute atom_at_zero, a point
/// mass at exactly m_hat = 0 kept outside the grid.
struct VolumePdf {
  double grid_start = 0.0;
  double grid_step = 0.0;
  std::vector<double> densities;
  double atom_at_zero = 0.0;

  std::size_t size() const noexcept { return densities.size(); }
  double x(std::size_t i) const noexcept { return grid_start + static_cast<double>(i) * grid_step; }
  double cell_mass(std::size_t i) const noexcept { return densities[i] * grid_step; }
  double continuous_mass() const noexcept;
  double total_mass() const noexcept { return atom_at_zero + continuous_mass(); }
};

inline constexpr double kDefaultGridStep = 1e-3;

/// s^2 * p * (1 - p) with p = extra_record_prob(s, d, t).
double bernoulli_var_term(double s, double d, double t);

/// Speeds d/(t*j) inside the support where the variance kernel has a kink,
/// ascending. Kinks below 1e-3 * upper are dropped: the kernel is bounded by
/// s^2/4 there, so the unresolved region contributes nothing measurable.
std::vector<double> variance_breakpoints(double d, double t, const SpeedDistribution& dist);

/// Integral of bernoulli_var_term(s, d, t) * g(s) over the support.
double variance_kernel_integral(double d, double t, const SpeedDistribution& dist);

double variance(std::int64_t m, double d, double t, const SpeedDistribution& dist);
double vmr(double d, double t, const SpeedDistribution& dist);
double cv(std::int64_t m, double d, double t, const SpeedDistribution& dist);
PrecisionReport precision(std::int64_t m, double d, double t, const SpeedDistribution& dist);

/// Mass one speed band deposited into the grid, split by extra-record outcome k.
struct BandMass {
  std::int64_t u = 0;  ///< guaranteed record count of speeds in the band
  int k = 0;           ///< 1 if the extra record occurred
  double mass = 0.0;
};

struct SingleProbeBuild {
  VolumePdf pdf;
  std::vector<BandMass> bands;
  /// g-mass below the last resolved band. Every such speed yields m_hat
  /// within step/8 of 1, so the mass is placed in the cell containing 1.
  double residual_mass = 0.0;
  std::int64_t last_band = 0;
};

/// Builds the m = 1 density band by band. Cell masses are exact quadratures
/// of g over each cell's preimage in speed, so jumps at band edges are
/// resolved without sub-sampling.
SingleProbeBuild build_single_probe_pdf(double d, double t, const SpeedDistribution& dist,
                                        double grid_step = kDefaultGridStep);

VolumePdf single_probe_pdf(double d, double t, const SpeedDistribution& dist,
                           double grid_step = kDefaultGridStep);

enum class ConvolutionMethod { Automatic, Direct, Spectral };

/// Direct convolution is used up to this many folds under Automatic.
inline constexpr std::int64_t kDirectConvolutionMaxFolds = 64;
inline constexpr double kFoldDriftWarning = 1e-4;

struct MFoldResult {
  VolumePdf pdf;
  /// Factor applied to restore unit mass: one per fold for the direct
  /// method, a single entry for the spectral method, empty for m = 1.
  std::vector<double> renormalization;
  std::vector<std::string> warnings;
};

/// Distribution of the sum of two independent m_hat contributions.
/// Both inputs must share grid_start = 0 and the same grid_step.
VolumePdf convolve(const VolumePdf& a, const VolumePdf& b);

MFoldResult m_fold_pdf(const VolumePdf& single, std::int64_t m,
                       ConvolutionMethod method = ConvolutionMethod::Automatic);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Limiting normal law: (m, variance(m, d, t, dist)).
Moments normal_approx(std::int64_t m, double d, double t, const SpeedDistribution& dist);

/// Grid mean and variance, counting the zero atom.
Moments pdf_moments(const VolumePdf& pdf);

/// Smallest x with CDF(x) >= p; mass is spread uniformly across each cell
/// and the atom sits at 0.
double pdf_quantile(const VolumePdf& pdf, double p);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Equal-tailed interval holding `level` of the probability.
Interval interval_estimate(const VolumePdf& pdf, double level);

/// Probability per histogram bin [start + b*width, start + (b+1)*width).
/// Mass outside the bin range is folded into the first or last bin.
std::vector<double> bin_probabilities(const VolumePdf& pdf, double bin_start, double bin_width,
                                      std::size_t bins);

double total_variation(std::span<const double> p, std::span<const double> q);

/// True when some value sits at least relative_trough below both the
/// highest value to its left and the highest value to its right, i.e. two
/// peaks separated by a trough that deep relative to the lesser peak.
bool is_multimodal(std::span<const double> values, double relative_trough);

}  // namespace probevol
