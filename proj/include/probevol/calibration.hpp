#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace probevol {

enum class FitMethod { Ols, Wls };

std::string_view to_string(FitMethod method) noexcept;
FitMethod parse_fit_method(std::string_view text);

/// A calibration site: estimated probe volume against a known traffic
/// volume. For WLS the weight is 1/VMR of that site's estimator.
struct CalibrationPair {
  double m_hat = 0.0;
  double known_volume = 0.0;  ///< vehicles/day, > 0
  double weight = 1.0;        ///< > 0
};

/// volume = beta * m_hat, no intercept.
struct CalibrationModel {
  double beta = 0.0;
  FitMethod method = FitMethod::Ols;
  std::size_t pairs = 0;
  std::size_t zero_m_hat_pairs = 0;  ///< kept in the fit but contribute nothing
};

/// beta = sum(w*x*y) / sum(w*x^2). OLS ignores the pair weights.
/// Throws InvalidArgument when every m_hat is zero.
CalibrationModel fit_through_origin(std::span<const CalibrationPair> pairs,
                                    FitMethod method = FitMethod::Wls);

double predict(const CalibrationModel& model, double m_hat) noexcept;

/// Mean of |pred - truth| / truth.
double mape(std::span<const double> predicted, std::span<const double> truth);

namespace detail {
/// Allocation-free core used by the experiment harness.
double through_origin_beta(std::span<const double> x, std::span<const double> y,
                           std::span<const double> w);
}  // namespace detail

}  // namespace probevol
