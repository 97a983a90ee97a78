#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "probevol/distribution_engine.hpp"
#include "probevol/errors.hpp"
#include "probevol/presets.hpp"
#include "probevol/speed_model.hpp"

using namespace probevol;

namespace {

SpeedDistribution to_dist(const oracle::Mix& g) {
  std::vector<SpeedComponent> comps;
  for (const auto& c : g.comps) comps.push_back({c.mu, c.sd, c.w});
  return SpeedDistribution(comps, g.lo, g.hi);
}

double one(double) { return 1.0; }

}  // namespace

TEST_CASE("pdf is zero outside the support") {
  const auto park = speed_preset("park-i35");
  CHECK(eval_pdf(park, 50.0) == 0.0);
  CHECK(eval_pdf(park, 0.0) == 0.0);
  CHECK(eval_pdf(park, -3.0) == 0.0);
  CHECK(eval_pdf(park, 40.0) > 0.0);
  CHECK(eval_pdf(park, std::nextafter(40.0, 41.0)) == 0.0);
}

TEST_CASE("near-untruncated single component peaks at phi(0)/sd") {
  const SpeedDistribution g({{20.0, 1.0, 1.0}}, 0.0, 40.0);
  CHECK(eval_pdf(g, 20.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("park mixture density matches a direct erf evaluation") {
  const auto park = speed_preset("park-i35");
  const auto ref = oracle::park();
  CHECK(eval_pdf(park, 27.042) == doctest::Approx(oracle::pdf(ref, 27.042)).epsilon(1e-13));
  for (double s = 0.05; s <= 40.0; s += 0.37) {
    CAPTURE(s);
    CHECK(park.pdf(s) == doctest::Approx(oracle::pdf(ref, s)).epsilon(1e-12));
    CHECK(park.cdf(s) == doctest::Approx(oracle::cdf(ref, s)).epsilon(1e-12));
    CHECK(park.pdf(s) >= 0.0);
  }
}

TEST_CASE("mass is accurate deep in an upper tail") {
  // The whole support sits 8 to 12 sd above the mean.
  const SpeedDistribution g({{0.0, 1.0, 1.0}}, 8.0, 12.0);
  const oracle::Mix ref{{{0.0, 1.0, 1.0}}, 8.0, 12.0};
  CHECK(g.mass(8.0, 12.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.mass(8.0, 8.5) == doctest::Approx(oracle::partial_moments(ref, 8.0, 8.5).m0).epsilon(1e-10));
  CHECK(g.pdf(9.0) == doctest::Approx(oracle::pdf(ref, 9.0)).epsilon(1e-10));
  CHECK(integrate_weighted(g, one, {}) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("closed-form mean agrees with component truncated means") {
  for (const auto& [name, ref] : {std::pair{"park-i35", oracle::park()},
                                  std::pair{"table2-60mph", oracle::fast60()},
                                  std::pair{"table2-30mph", oracle::slow30()}}) {
    CAPTURE(name);
    const auto g = speed_preset(name);
    CHECK(g.mean() == doctest::Approx(oracle::mean(ref)).epsilon(1e-12));
    const double quad = integrate_weighted(g, [](double s) { return s; }, {});
    CHECK(quad == doctest::Approx(oracle::mean(ref)).epsilon(1e-10));
  }
}

TEST_CASE("integrate_weighted normalisation over assorted mixtures") {
  std::vector<SpeedDistribution> dists = {
      speed_preset("park-i35"),
      speed_preset("table2-60mph"),
      speed_preset("table2-30mph"),
      SpeedDistribution({{20.0, 1e-9, 1.0}}, 0.0, 40.0),
      SpeedDistribution({{-5.0, 2.0, 1.0}}, 0.0, 30.0),
      SpeedDistribution({{3.0, 0.01, 0.5}, {35.0, 0.5, 0.5}}, 0.0, 40.0),
      SpeedDistribution({{60.0, 4.0, 1.0}}, 10.0, 40.0),
  };
  CounterRng rng(99);
  for (int i = 0; i < 40; ++i) {
    std::vector<SpeedComponent> comps;
    const int k = 1 + static_cast<int>(uniform01(rng) * 4);
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
      comps.push_back({uniform01(rng) * 45.0, 0.05 + uniform01(rng) * 8.0, 0.1 + uniform01(rng)});
      total += comps.back().weight;
    }
    for (auto& c : comps) c.weight /= total;
    dists.emplace_back(comps, 0.0, 40.0);
  }
  for (const auto& g : dists) CHECK(integrate_weighted(g, one, {}) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("variance kernel integral reproduces 0.019 for d=300, t=4") {
  const auto park = speed_preset("park-i35");
  std::vector<double> breaks;
  for (int j = 1; j <= 200; ++j) breaks.push_back(300.0 / (4.0 * j));
  std::sort(breaks.begin(), breaks.end());
  const double integral =
      integrate_weighted(park, [](double s) { return bernoulli_var_term(s, 300.0, 4.0); }, breaks);
  const double var = 16.0 / (300.0 * 300.0) * integral;
  CHECK(var == doctest::Approx(0.019).epsilon(0.001 / 0.019));
  CHECK(var == doctest::Approx(oracle::vmr(oracle::park(), 300.0, 4.0)).epsilon(1e-8));
}

TEST_CASE("non-finite weight aborts with a diagnostic") {
  const auto park = speed_preset("park-i35");
  auto bad = [](double s) { return s > 20.0 ? std::numeric_limits<double>::quiet_NaN() : 1.0; };
  CHECK_THROWS_AS(integrate_weighted(park, bad, {}), NumericalError);
  auto inf = [](double) { return std::numeric_limits<double>::infinity(); };
  CHECK_THROWS_AS(integrate_weighted(park, inf, {}), NumericalError);
}

TEST_CASE("restricted integration splits the support additively") {
  const auto park = speed_preset("park-i35");
  const double a = integrate_weighted(park, one, {}, 0.0, 17.3);
  const double b = integrate_weighted(park, one, {}, 17.3, 40.0);
  CHECK(a + b == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a == doctest::Approx(oracle::cdf(oracle::park(), 17.3)).epsilon(1e-10));
}

TEST_CASE("gauss-legendre rule is exact for polynomials of degree 2n-1") {
  const auto& rule = gauss_legendre(32);
  REQUIRE(rule.nodes.size() == 32);
  double wsum = 0.0;
  double x62 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    wsum += rule.weights[i];
    x62 += rule.weights[i] * std::pow(rule.nodes[i], 62);
  }
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(x62 == doctest::Approx(2.0 / 63.0).epsilon(1e-12));
  CHECK_THROWS_AS(gauss_legendre(0), InvalidArgument);
}

TEST_CASE("construction validates its inputs") {
  CHECK_THROWS_AS(SpeedDistribution({}, 0.0, 40.0), InvalidArgument);
  CHECK_THROWS_AS(SpeedDistribution({{20.0, 0.0, 1.0}}, 0.0, 40.0), InvalidArgument);
  CHECK_THROWS_AS(SpeedDistribution({{20.0, -1.0, 1.0}}, 0.0, 40.0), InvalidArgument);
  CHECK_THROWS_AS(SpeedDistribution({{20.0, 1.0, 1.0}}, 40.0, 40.0), InvalidArgument);
  CHECK_THROWS_AS(SpeedDistribution({{20.0, 1.0, 1.0}}, -1.0, 40.0), InvalidArgument);
  CHECK_THROWS_AS(SpeedDistribution({{20.0, 1.0, 0.9}}, 0.0, 40.0), InvalidArgument);
  CHECK_THROWS_AS(SpeedDistribution({{20.0, 1.0, 0.647}, {24.0, 4.8, 0.352}}, 0.0, 40.0),
                  InvalidArgument);
  CHECK_THROWS_AS(SpeedDistribution({{20.0, 1.0, 1.5}, {2.0, 1.0, -0.5}}, 0.0, 40.0),
                  InvalidArgument);
  CHECK_THROWS_AS(SpeedDistribution({{1000.0, 1.0, 1.0}}, 0.0, 40.0), InvalidArgument);
}

TEST_CASE("weights within 1e-9 of one are renormalised") {
  const SpeedDistribution g({{20.0, 1.0, 0.5 + 4e-10}, {10.0, 2.0, 0.5}}, 0.0, 40.0);
  double total = 0.0;
  for (const auto& c : g.components()) total += c.weight;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sampling") {
  const auto park = speed_preset("park-i35");
  const auto ref = oracle::park();

  SUBCASE("empty request") { CHECK(sample(park, 0, 1).empty()); }

  SUBCASE("deterministic per seed") {
    const auto a = sample(park, 1000, 42);
    const auto b = sample(park, 1000, 42);
    const auto c = sample(park, 1000, 43);
    CHECK(a == b);
    CHECK(a != c);
  }

  SUBCASE("degenerate component collapses onto its mean") {
    const SpeedDistribution g({{20.0, 1e-9, 1.0}}, 0.0, 40.0);
    for (double s : sample(g, 100, 5)) CHECK(std::abs(s - 20.0) <= 1e-6);
  }

  SUBCASE("values stay inside the support, even for tail-only components") {
    const SpeedDistribution tail({{0.0, 1.0, 1.0}}, 8.0, 12.0);
    for (double s : sample(tail, 20000, 3)) {
      CHECK(s > 8.0);
      CHECK(s <= 12.0);
    }
    for (double s : sample(park, 20000, 3)) {
      CHECK(s > 0.0);
      CHECK(s <= 40.0);
    }
  }

  SUBCASE("1e6 draws: mean and Kolmogorov-Smirnov distance") {
    auto xs = sample(park, 1'000'000, 2024);
    double sum = 0.0;
    for (double x : xs) sum += x;
    CHECK(std::abs(sum / xs.size() - oracle::mean(ref)) < 0.05);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double f = oracle::cdf(ref, xs[i]);
      ks = std::max({ks, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
    }
    CHECK(ks < 0.005);
  }
}
