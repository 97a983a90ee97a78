#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "probevol/calibration.hpp"
#include "probevol/footprint_data.hpp"
#include "probevol/rng.hpp"
#include "probevol/speed_model.hpp"

namespace probevol {

/// Single-cordon particle experiment: m probes, `trials` repetitions.
struct ScenarioConfig {
  double d = 0.0;
  double t = 0.0;
  std::int64_t m = 0;
  SpeedDistribution dist;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
};

struct Histogram {
  double bin_start = 0.0;
  double bin_width = 0.0;
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const noexcept;
  /// Counts divided by total.
  std::vector<double> probabilities() const;
};

struct SimSummary {
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased sample variance
  double cv = 0.0;        ///< NaN when mean is 0
  Histogram histogram;
};

struct ScenarioResult {
  std::vector<double> samples;  ///< m_hat per trial, in trial order
  SimSummary summary;
};

struct SimOptions {
  unsigned threads = 0;          ///< 0: all hardware threads
  double bin_width = 0.01;       ///< histogram resolution in probe units
  std::size_t min_bins = 0;      ///< pad histogram to at least this many bins
};

/// Records left in a d-metre cordon by a probe at speed s whose first
/// record falls entry_offset seconds after it enters.
std::int64_t simulate_pass(double s, double d, double t, double entry_offset);

ScenarioResult run_scenario(const ScenarioConfig& config, const SimOptions& options = {});

/// Histogram of samples on [bin_start, ...) with the given width.
Histogram make_histogram(const std::vector<double>& samples, double bin_start, double bin_width,
                         std::size_t min_bins = 0);

/// Point records produced by one trial of a scenario, laid out on a road
/// axis where the cordon is (0, d]. Each probe also leaves one record just
/// before and one just after the cordon.
struct TrialFootprints {
  std::vector<FootprintRecord> records;
  double m_hat = 0.0;  ///< estimator applied to the in-cordon records
  std::size_t in_cordon = 0;
};

TrialFootprints emit_trial_footprints(const ScenarioConfig& config, std::size_t trial,
                                      const std::string& label = "sim");

/// One observation site of the calibration experiment.
struct SiteConfig {
  std::string site_id;
  double adt = 0.0;  ///< ground-truth vehicles/day
  std::int64_t m = 1;
  double d = 0.0;
  SpeedDistribution dist;
  double t = 1.0;
};

struct TrialOutcome {
  double avg_mape_ols = 0.0;
  double avg_mape_wls = 0.0;
};

struct ExperimentReport {
  std::size_t trials = 0;
  std::size_t pairs_per_trial = 0;
  std::vector<std::string> site_ids;
  std::vector<double> site_vmr;  ///< theoretical VMR; WLS weight is 1/VMR
  std::vector<TrialOutcome> per_trial;
  double wls_win_fraction = 0.0;
  double mean_avg_mape_ols = 0.0;
  double mean_avg_mape_wls = 0.0;
};

/// Repeated calibration experiment. Each trial simulates m_hat at every
/// site, then for each "known" pair fits OLS and WLS through the origin and
/// scores the other sites by MAPE. With all_pairs set every pair of sites
/// is used; otherwise one pair per trial is drawn at random.
ExperimentReport run_regression_experiment(const std::vector<SiteConfig>& sites,
                                           std::size_t trials, bool all_pairs,
                                           std::uint64_t seed, unsigned threads = 0);

/// m_hat for m passes drawn from rng, evaluated as (t/d) * sum(s_i * n_i).
/// Each pass consumes three draws: component, speed, entry offset.
double simulate_m_hat(const SpeedDistribution& dist, std::int64_t m, double d, double t,
                      CounterRng& rng);

}  // namespace probevol
