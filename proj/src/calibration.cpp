#include "probevol/calibration.hpp"

#include <cmath>

#include "probevol/errors.hpp"

namespace probevol {

std::string_view to_string(FitMethod method) noexcept {
  return method == FitMethod::Ols ? "ols" : "wls";
}

FitMethod parse_fit_method(std::string_view text) {
  if (text == "ols" || text == "OLS") return FitMethod::Ols;
  if (text == "wls" || text == "WLS") return FitMethod::Wls;
  throw InvalidArgument("method must be ols or wls");
}

double detail::through_origin_beta(std::span<const double> x, std::span<const double> y,
                                   std::span<const double> w) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    num += wi * x[i] * y[i];
    den += wi * x[i] * x[i];
  }
  if (!(den > 0.0)) throw InvalidArgument("cannot fit: every m_hat is zero");
  return num / den;
}

CalibrationModel fit_through_origin(std::span<const CalibrationPair> pairs, FitMethod method) {
  detail::require(!pairs.empty(), "calibration needs at least one pair");
  std::vector<double> x, y, w;
  CalibrationModel model;
  model.method = method;
  model.pairs = pairs.size();
  for (const auto& p : pairs) {
    detail::require(std::isfinite(p.m_hat) && p.m_hat >= 0.0, "m_hat must be finite and >= 0");
    detail::require(p.known_volume > 0.0 && std::isfinite(p.known_volume),
                    "known volume must be > 0");
    detail::require(p.weight > 0.0 && std::isfinite(p.weight), "pair weight must be > 0");
    if (p.m_hat == 0.0) ++model.zero_m_hat_pairs;
    x.push_back(p.m_hat);
    y.push_back(p.known_volume);
    w.push_back(method == FitMethod::Ols ? 1.0 : p.weight);
  }
  model.beta = detail::through_origin_beta(x, y, w);
  return model;
}

double predict(const CalibrationModel& model, double m_hat) noexcept { return model.beta * m_hat; }

double mape(std::span<const double> predicted, std::span<const double> truth) {
  detail::require(predicted.size() == truth.size(), "mape needs equal-length inputs");
  detail::require(!truth.empty(), "mape needs at least one value");
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    detail::require(truth[i] > 0.0, "mape truth values must be > 0");
    sum += std::abs(predicted[i] - truth[i]) / truth[i];
  }
  return sum / static_cast<double>(truth.size());
}

}  // namespace probevol
