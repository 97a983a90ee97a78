#include "probevol/cordon_optimizer.hpp"

#include <cmath>

#include "probevol/distribution_engine.hpp"
#include "probevol/errors.hpp"
#include "probevol/parallel.hpp"

namespace probevol {

std::string_view to_string(Objective kind) noexcept {
  return kind == Objective::Vmr ? "vmr" : "cv";
}

Objective parse_objective(std::string_view text) {
  if (text == "vmr" || text == "VMR") return Objective::Vmr;
  if (text == "cv" || text == "CV") return Objective::Cv;
  throw InvalidArgument("objective must be cv or vmr");
}

std::vector<CurvePoint> objective_curve(double d_min, double d_max, double step, double t,
                                        const SpeedDistribution& dist, Objective kind,
                                        std::int64_t m, unsigned threads) {
  detail::require(d_min > 0.0 && d_min < d_max, "need 0 < d_min < d_max");
  detail::require(step > 0.0 && std::isfinite(step), "step must be > 0");
  detail::require(t > 0.0 && std::isfinite(t), "recording interval t must be > 0");
  if (kind == Objective::Cv) detail::require(m >= 1, "CV objective needs m >= 1");

  // Tolerate d_max landing a rounding error short of a grid point.
  const double span = (d_max - d_min) / step;
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  detail::require(count < 50'000'000, "cordon grid is too large");

  std::vector<CurvePoint> curve(count);
  parallel_for_blocks(count, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double d = std::min(d_max, d_min + static_cast<double>(i) * step);
      const double v = vmr(d, t, dist);
      curve[i] = {d, kind == Objective::Vmr ? v : std::sqrt(v / static_cast<double>(m))};
    }
  });
  return curve;
}

OptimumReport optimize_cordon(double d_max, double t, const SpeedDistribution& dist,
                              Objective kind, std::int64_t m, double step, unsigned threads) {
  detail::require(step > 0.0 && d_max > step, "need d_max > step > 0");
  OptimumReport report;
  report.objective_kind = kind;
  report.m = m;
  report.t = t;
  report.curve = objective_curve(step, d_max, step, t, dist, kind, m, threads);
  report.best_d = report.curve.front().d;
  report.best_objective = report.curve.front().value;
  for (const auto& pt : report.curve) {
    if (pt.value <= report.best_objective) {
      report.best_objective = pt.value;
      report.best_d = pt.d;
    }
  }
  return report;
}

}  // namespace probevol
