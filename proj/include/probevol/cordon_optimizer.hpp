#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "probevol/speed_model.hpp"

namespace probevol {

enum class Objective { Vmr, Cv };

std::string_view to_string(Objective kind) noexcept;
Objective parse_objective(std::string_view text);

struct CurvePoint {
  double d = 0.0;
  double value = 0.0;
};

struct OptimumReport {
  double best_d = 0.0;
  double best_objective = 0.0;
  std::vector<CurvePoint> curve;
  Objective objective_kind = Objective::Cv;
  std::int64_t m = 1;  ///< only meaningful for CV
  double t = 0.0;
};

inline constexpr double kDefaultCordonStep = 0.5;

/// obj(d) on {d_min, d_min + step, ...} up to d_max inclusive. Grid points
/// are d_min + i*step (no accumulated increments).
std::vector<CurvePoint> objective_curve(double d_min, double d_max, double step, double t,
                                        const SpeedDistribution& dist, Objective kind,
                                        std::int64_t m = 1, unsigned threads = 0);

/// Exhaustive grid minimum over (0, d_max] starting at d = step.
/// obj(d) has dense local minima, so no local refinement is attempted.
/// Ties go to the larger d.
OptimumReport optimize_cordon(double d_max, double t, const SpeedDistribution& dist,
                              Objective kind, std::int64_t m = 1,
                              double step = kDefaultCordonStep, unsigned threads = 0);

}  // namespace probevol
