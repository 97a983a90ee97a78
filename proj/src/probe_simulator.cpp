#include "probevol/probe_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "probevol/distribution_engine.hpp"
#include "probevol/errors.hpp"
#include "probevol/estimator.hpp"
#include "probevol/parallel.hpp"

namespace probevol {

namespace {

void require_scenario(const ScenarioConfig& c) {
  detail::require(c.d > 0.0 && std::isfinite(c.d), "scenario d must be > 0");
  detail::require(c.t > 0.0 && std::isfinite(c.t), "scenario t must be > 0");
  detail::require(c.m >= 0, "scenario m must be >= 0");
  detail::require(c.trials >= 1, "scenario needs at least one trial");
}

double snapped_floor(double x) {
  const double nearest = std::round(x);
  return std::floor(std::abs(x - nearest) < kIntegerSnap ? nearest : x);
}

}  // namespace

std::uint64_t Histogram::total() const noexcept {
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

std::vector<double> Histogram::probabilities() const {
  const double n = static_cast<double>(total());
  std::vector<double> out(counts.size(), 0.0);
  if (n == 0.0) return out;
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]) / n;
  return out;
}

std::int64_t simulate_pass(double s, double d, double t, double entry_offset) {
  detail::require(s > 0.0 && std::isfinite(s), "speed must be > 0");
  detail::require(d > 0.0 && t > 0.0, "d and t must be > 0");
  detail::require(entry_offset >= 0.0 && entry_offset < t, "entry offset must lie in [0, t)");
  const double first = s * entry_offset;
  if (first >= d) return 0;
  return 1 + static_cast<std::int64_t>(snapped_floor((d - first) / (s * t)));
}

double simulate_m_hat(const SpeedDistribution& dist, std::int64_t m, double d, double t,
                      CounterRng& rng) {
  double sum = 0.0;
  double carry = 0.0;
  for (std::int64_t i = 0; i < m; ++i) {
    const double s = dist.draw(rng);
    const double offset = t * uniform01(rng);
    const double term = s * static_cast<double>(simulate_pass(s, d, t, offset));
    const double next = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - next) + term : (term - next) + sum;
    sum = next;
  }
  return (t / d) * (sum + carry);
}

Histogram make_histogram(const std::vector<double>& samples, double bin_start, double bin_width,
                         std::size_t min_bins) {
  detail::require(bin_width > 0.0, "histogram bin width must be > 0");
  double hi = bin_start;
  for (double x : samples) hi = std::max(hi, x);
  const auto bins = std::max<std::size_t>(
      min_bins, static_cast<std::size_t>(std::floor((hi - bin_start) / bin_width)) + 1);
  Histogram h;
  h.bin_start = bin_start;
  h.bin_width = bin_width;
  h.counts.assign(bins, 0);
  for (double x : samples) {
    const double b = std::floor((x - bin_start) / bin_width);
    h.counts[static_cast<std::size_t>(std::clamp(b, 0.0, static_cast<double>(bins - 1)))]++;
  }
  return h;
}

ScenarioResult run_scenario(const ScenarioConfig& config, const SimOptions& options) {
  require_scenario(config);
  ScenarioResult result;
  result.samples.assign(config.trials, 0.0);
  parallel_for_blocks(config.trials, options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t trial = begin; trial < end; ++trial) {
      CounterRng rng(stream_seed(config.seed, trial));
      result.samples[trial] = simulate_m_hat(config.dist, config.m, config.d, config.t, rng);
    }
  });

  const auto n = static_cast<double>(config.trials);
  double sum = 0.0;
  for (double x : result.samples) sum += x;
  auto& summary = result.summary;
  summary.mean = sum / n;
  double sq = 0.0;
  for (double x : result.samples) sq += (x - summary.mean) * (x - summary.mean);
  summary.variance = config.trials > 1 ? sq / (n - 1.0) : 0.0;
  summary.cv = summary.mean != 0.0 ? std::sqrt(summary.variance) / summary.mean
                                   : std::numeric_limits<double>::quiet_NaN();
  summary.histogram = make_histogram(result.samples, 0.0, options.bin_width, options.min_bins);
  return result;
}

TrialFootprints emit_trial_footprints(const ScenarioConfig& config, std::size_t trial,
                                      const std::string& label) {
  require_scenario(config);
  TrialFootprints out;
  CounterRng rng(stream_seed(config.seed, trial));
  const double stride_t = config.t;
  for (std::int64_t i = 0; i < config.m; ++i) {
    const double s = config.dist.draw(rng);
    const double offset = stride_t * uniform01(rng);
    const auto count = simulate_pass(s, config.d, config.t, offset);
    const double first = s * offset;
    const double stride = s * stride_t;
    for (std::int64_t j = -1; j <= count; ++j)
      out.records.push_back({first + static_cast<double>(j) * stride, s, label});
  }
  const CordonSpec cordon{0.0, config.d, std::nullopt};
  const auto crop = crop_to_cordon(out.records, cordon, config.t);
  out.in_cordon = crop.sample.n();
  out.m_hat = estimate_probe_volume(crop.sample).m_hat;
  return out;
}

ExperimentReport run_regression_experiment(const std::vector<SiteConfig>& sites,
                                           std::size_t trials, bool all_pairs,
                                           std::uint64_t seed, unsigned threads) {
  detail::require(sites.size() >= 3, "experiment needs at least 3 sites");
  detail::require(trials >= 1, "experiment needs at least one trial");
  const std::size_t n = sites.size();

  ExperimentReport report;
  report.trials = trials;
  std::vector<double> adt(n), weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = sites[i];
    detail::require(s.m >= 1, "site " + s.site_id + ": m must be >= 1");
    detail::require(s.adt > 0.0, "site " + s.site_id + ": ADT must be > 0");
    detail::require(s.d > 0.0 && s.t > 0.0, "site " + s.site_id + ": d and t must be > 0");
    const double v = vmr(s.d, s.t, s.dist);
    detail::require(v > 0.0, "site " + s.site_id + ": theoretical VMR is zero");
    report.site_ids.push_back(s.site_id);
    report.site_vmr.push_back(v);
    adt[i] = s.adt;
    weight[i] = 1.0 / v;
  }

  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) all.emplace_back(i, j);
  report.pairs_per_trial = all_pairs ? all.size() : 1;

  report.per_trial.assign(trials, {});
  parallel_for_blocks(trials, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> m_hat(n);
    for (std::size_t trial = begin; trial < end; ++trial) {
      for (std::size_t i = 0; i < n; ++i) {
        CounterRng rng(stream_seed(seed, trial, i + 1));
        const auto& s = sites[i];
        m_hat[i] = simulate_m_hat(s.dist, s.m, s.d, s.t, rng);
      }
      std::vector<std::pair<std::size_t, std::size_t>> chosen;
      if (all_pairs) {
        chosen = all;
      } else {
        CounterRng pick(stream_seed(seed, trial, 0));
        chosen.push_back(all[static_cast<std::size_t>(uniform01(pick) * static_cast<double>(all.size()))]);
      }

      double ols_total = 0.0;
      double wls_total = 0.0;
      std::size_t used = 0;
      for (const auto& [a, b] : chosen) {
        const double x[2] = {m_hat[a], m_hat[b]};
        const double y[2] = {adt[a], adt[b]};
        const double w[2] = {weight[a], weight[b]};
        if (x[0] == 0.0 && x[1] == 0.0) continue;
        const double beta_ols = detail::through_origin_beta(x, y, {});
        const double beta_wls = detail::through_origin_beta(x, y, w);
        double err_ols = 0.0;
        double err_wls = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == a || k == b) continue;
          err_ols += std::abs(beta_ols * m_hat[k] - adt[k]) / adt[k];
          err_wls += std::abs(beta_wls * m_hat[k] - adt[k]) / adt[k];
        }
        const auto held_out = static_cast<double>(n - 2);
        ols_total += err_ols / held_out;
        wls_total += err_wls / held_out;
        ++used;
      }
      auto& outcome = report.per_trial[trial];
      const double denom = used > 0 ? static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
      outcome.avg_mape_ols = ols_total / denom;
      outcome.avg_mape_wls = wls_total / denom;
    }
  });

  std::size_t wins = 0;
  for (const auto& o : report.per_trial) {
    if (o.avg_mape_wls < o.avg_mape_ols) ++wins;
    report.mean_avg_mape_ols += o.avg_mape_ols;
    report.mean_avg_mape_wls += o.avg_mape_wls;
  }
  report.wls_win_fraction = static_cast<double>(wins) / static_cast<double>(trials);
  report.mean_avg_mape_ols /= static_cast<double>(trials);
  report.mean_avg_mape_wls /= static_cast<double>(trials);
  return report;
}

}  // namespace probevol
