#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "probevol/cordon_optimizer.hpp"
#include "probevol/distribution_engine.hpp"
#include "probevol/errors.hpp"
#include "probevol/presets.hpp"

using namespace probevol;

namespace {

const SpeedDistribution& park() {
  static const auto g = speed_preset("park-i35");
  return g;
}

}  // namespace

TEST_CASE("CV at 110 m beats CV at 150 m") {
  const auto curve = objective_curve(10, 150, 10, 4, park(), Objective::Cv, 1);
  double v110 = -1.0;
  double v150 = -1.0;
  for (const auto& p : curve) {
    if (p.d == 110.0) v110 = p.value;
    if (p.d == 150.0) v150 = p.value;
  }
  REQUIRE(v110 > 0.0);
  REQUIRE(v150 > 0.0);
  CHECK(v110 < v150);
}

TEST_CASE("curve grid is inclusive and strictly increasing") {
  const auto curve = objective_curve(0.5, 150, 0.5, 4, park(), Objective::Vmr);
  REQUIRE(curve.size() == 300);
  CHECK(curve.front().d == 0.5);
  CHECK(curve.back().d == 150.0);
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].d > curve[i - 1].d);
  // A range that is not a whole number of steps stops short of d_max.
  const auto ragged = objective_curve(1, 10.7, 1, 1, park(), Objective::Vmr);
  CHECK(ragged.back().d == 10.0);
}

TEST_CASE("CV equals sqrt(VMR) at m = 1 and scales by 1/sqrt(m)") {
  const auto v = objective_curve(1, 200, 1, 4, park(), Objective::Vmr);
  const auto c1 = objective_curve(1, 200, 1, 4, park(), Objective::Cv, 1);
  const auto c4 = objective_curve(1, 200, 1, 4, park(), Objective::Cv, 4);
  REQUIRE(v.size() == c1.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(c1[i].value == doctest::Approx(std::sqrt(v[i].value)).epsilon(1e-12));
    CHECK(c1[i].value == doctest::Approx(2.0 * c4[i].value).epsilon(1e-12));
  }
}

TEST_CASE("optimum on the 150 m range") {
  const auto r = optimize_cordon(150, 4, park(), Objective::Cv, 1, 1.0);
  CHECK(std::abs(r.best_d - 110.0) <= 1.0);
  CHECK(std::abs(r.best_objective - 0.230) < 0.001);
  CHECK(r.objective_kind == Objective::Cv);
  CHECK(r.m == 1);
  CHECK(r.t == 4.0);
}

TEST_CASE("best_d attains the curve minimum") {
  const auto r = optimize_cordon(300, 4, park(), Objective::Vmr, 1, 0.5);
  double lo = r.curve.front().value;
  for (const auto& p : r.curve) lo = std::min(lo, p.value);
  CHECK(r.best_objective == lo);
  bool found = false;
  for (const auto& p : r.curve)
    if (p.d == r.best_d) found = p.value == r.best_objective;
  CHECK(found);

  // Point mass at 20 m/s, t = 1: VMR is (numerically) zero at every multiple of 20.
  const SpeedDistribution point({{20.0, 1e-9, 1.0}}, 0.0, 40.0);
  const auto z = optimize_cordon(100, 1, point, Objective::Vmr, 1, 1.0);
  CHECK(z.best_objective < 1e-9);
  CHECK(std::fmod(z.best_d, 20.0) == 0.0);
}

TEST_CASE("matches an exhaustive finer-grid oracle") {
  const auto ref = oracle::park();
  const auto r = optimize_cordon(300, 4, park(), Objective::Cv, 1, 1.0);
  double best_d = 0.0;
  double best = 1e300;
  for (int i = 1; i <= 3000; ++i) {
    const double d = 0.1 * i;
    const double v = std::sqrt(oracle::vmr(ref, d, 4.0));
    if (v <= best) {
      best = v;
      best_d = d;
    }
  }
  CHECK(std::abs(r.best_d - best_d) <= 1.0);
  CHECK(r.best_objective >= best - 1e-9);
}

TEST_CASE("halving the step never worsens the optimum") {
  for (double step : {4.0, 2.0, 1.0}) {
    const auto coarse = optimize_cordon(160, 4, park(), Objective::Cv, 1, step);
    const auto fine = optimize_cordon(160, 4, park(), Objective::Cv, 1, step / 2);
    CHECK(fine.best_objective <= coarse.best_objective + 1e-9);
  }
}

TEST_CASE("argmin of CV and VMR coincide") {
  for (double t : {1.0, 4.0}) {
    for (std::int64_t m : {1, 3, 10}) {
      const auto a = optimize_cordon(200, t, park(), Objective::Cv, m, 0.5);
      const auto b = optimize_cordon(200, t, park(), Objective::Vmr, m, 0.5);
      CHECK(a.best_d == b.best_d);
    }
  }
}

TEST_CASE("thread count does not change the curve") {
  const auto a = objective_curve(1, 120, 0.5, 4, park(), Objective::Cv, 2, 1);
  const auto b = objective_curve(1, 120, 0.5, 4, park(), Objective::Cv, 2, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].d == b[i].d);
    CHECK(a[i].value == b[i].value);
  }
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(objective_curve(0, 10, 1, 1, park(), Objective::Vmr), InvalidArgument);
  CHECK_THROWS_AS(objective_curve(10, 5, 1, 1, park(), Objective::Vmr), InvalidArgument);
  CHECK_THROWS_AS(objective_curve(1, 10, 0, 1, park(), Objective::Vmr), InvalidArgument);
  CHECK_THROWS_AS(objective_curve(1, 10, 1, 0, park(), Objective::Vmr), InvalidArgument);
  CHECK_THROWS_AS(objective_curve(1, 10, 1, 1, park(), Objective::Cv, 0), InvalidArgument);
  CHECK_THROWS_AS(optimize_cordon(0.5, 1, park(), Objective::Vmr, 1, 1.0), InvalidArgument);
  CHECK(parse_objective("cv") == Objective::Cv);
  CHECK(parse_objective("VMR") == Objective::Vmr);
  CHECK_THROWS_AS(parse_objective("mse"), InvalidArgument);
}
