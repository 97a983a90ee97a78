#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "probevol/errors.hpp"
#include "probevol/estimator.hpp"
#include "probevol/rng.hpp"

using namespace probevol;

TEST_CASE("worked examples for m_hat") {
  CordonSample two{{20, 20, 20, 20, 20, 30, 30, 30}, 100.0, 1.0};
  CHECK(estimate_probe_volume(two).m_hat == doctest::Approx(1.9).epsilon(1e-14));
  CordonSample one{{30, 30, 30}, 100.0, 1.0};
  CHECK(estimate_probe_volume(one).m_hat == doctest::Approx(0.9).epsilon(1e-14));
  const auto e = estimate_probe_volume(CordonSample{{}, 100.0, 1.0});
  CHECK(e.m_hat == 0.0);
  CHECK(e.n == 0);
  CHECK(e.d == 100.0);
  CHECK(e.t == 1.0);
}

TEST_CASE("estimate rejects bad samples") {
  CHECK_THROWS_AS(estimate_probe_volume(CordonSample{{10.0}, 0.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(estimate_probe_volume(CordonSample{{10.0}, 10.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(estimate_probe_volume(CordonSample{{-1.0}, 10.0, 1.0}), InvalidArgument);
}

TEST_CASE("compensated sum is exact where naive summation is not") {
  std::vector<double> xs = {1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(xs) == 2.0);
  std::vector<double> many(1'000'000, 0.1);
  CHECK(compensated_sum(many) == doctest::Approx(100000.0).epsilon(1e-15));
}

TEST_CASE("estimate is invariant to record order") {
  CounterRng rng(3);
  std::vector<double> speeds;
  for (int i = 0; i < 100000; ++i) speeds.push_back(1e-3 + uniform01(rng) * 40.0);
  const double a = estimate_probe_volume({speeds, 250.0, 2.0}).m_hat;
  std::reverse(speeds.begin(), speeds.end());
  const double b = estimate_probe_volume({speeds, 250.0, 2.0}).m_hat;
  CHECK(a == b);
}

TEST_CASE("min_records") {
  CHECK(min_records(30, 100, 1) == 3);
  CHECK(min_records(40, 300, 4) == 1);
  CHECK(min_records(100, 100, 1) == 1);
  CHECK(min_records(100.0001, 100, 1) == 0);
  CHECK(min_records(20, 100, 1) == 5);
  CHECK_THROWS_AS(min_records(0, 100, 1), InvalidArgument);
  CHECK_THROWS_AS(min_records(10, -1, 1), InvalidArgument);
}

TEST_CASE("extra_record_prob") {
  CHECK(extra_record_prob(30, 100, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(extra_record_prob(20, 100, 1) == 0.0);
  CHECK(extra_record_prob(40, 300, 4) == doctest::Approx(0.875).epsilon(1e-14));
  CHECK_THROWS_AS(extra_record_prob(10, 100, 0), InvalidArgument);
}

TEST_CASE("integer boundary snapping") {
  // 0.1 * 3 is not exactly 0.3, so d/(s t) lands an ulp away from 10.
  CHECK(min_records(0.1, 3.0, 3.0) == 10);
  CHECK(extra_record_prob(0.1, 3.0, 3.0) == 0.0);
  CHECK(min_records(0.7, 2.1, 1.0) == 3);
  CHECK(extra_record_prob(0.7, 2.1, 1.0) == 0.0);
  CHECK(records_per_pass(0.7, 2.1, 1.0) == 3.0);
}

TEST_CASE("unbiasedness identity over a randomized sweep") {
  CounterRng rng(2025);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double s = std::exp(uniform01(rng) * 8.0 - 3.0);
    const double d = std::exp(uniform01(rng) * 8.0 - 1.0);
    const double t = std::exp(uniform01(rng) * 4.0 - 1.0);
    const double lhs = (s * t / d) * (static_cast<double>(min_records(s, d, t)) +
                                      extra_record_prob(s, d, t));
    worst = std::max(worst, std::abs(lhs - 1.0));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("scale invariance of records per pass") {
  CounterRng rng(8);
  for (int i = 0; i < 2000; ++i) {
    const double s = 0.5 + uniform01(rng) * 40.0;
    const double d = 1.0 + uniform01(rng) * 500.0;
    const double t = 0.5 + uniform01(rng) * 5.0;
    const double c = 0.25 + uniform01(rng) * 4.0;
    // d and s*t both scaled by c: scale d and s.
    CHECK(min_records(s * c, d * c, t) == min_records(s, d, t));
    CHECK(std::abs(extra_record_prob(s * c, d * c, t) - extra_record_prob(s, d, t)) < 1e-9);
  }
}
