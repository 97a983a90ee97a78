#include "probevol/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <string>

#include "probevol/config_io.hpp"
#include "probevol/errors.hpp"
#include "probevol/footprint_data.hpp"
#include "probevol/version.hpp"

namespace probevol {

namespace {

const std::set<std::string> kSubcommands = {"estimate", "precision", "pdf",       "optimize",
                                            "simulate", "experiment", "calibrate", "apply"};

int report_error(std::ostream& err, std::string_view kind, const std::string& message, int code) {
  json doc = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  err << doc.dump() << '\n';
  return code;
}

struct Args {
  // shared
  double d = 0.0;
  double t = 0.0;
  std::int64_t m = 1;
  std::string dist;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  // estimate
  std::string footprints;
  double start = 0.0;
  std::string label;
  bool strict = false;
  // pdf
  double grid_step = kDefaultGridStep;
  std::string out_path;
  // optimize
  double dmax = 0.0;
  double step = kDefaultCordonStep;
  std::string objective;
  std::string curve_out;
  // simulate
  std::string scenario;
  std::string hist_out;
  std::string emit_footprints;
  std::size_t emit_trial = 0;
  double bin_width = 0.01;
  // experiment
  std::string sites;
  std::string pair_mode = "all";
  // calibrate / apply
  std::string pairs;
  std::string method;
  double beta = 0.0;
  double m_hat = 0.0;
};

void print(std::ostream& out, const json& doc) { out << doc.dump(2) << '\n'; }

int cmd_estimate(const Args& a, std::ostream& out) {
  const auto csv = read_footprints_csv(std::filesystem::path(a.footprints), a.strict);
  CordonSpec cordon{a.start, a.d, std::nullopt};
  if (!a.label.empty()) cordon.label_filter = a.label;
  const auto crop = crop_to_cordon(csv.records, cordon, a.t);
  auto doc = to_json(estimate_probe_volume(crop.sample));
  json warnings = json::array();
  for (const auto& issue : csv.skipped)
    warnings.push_back("line " + std::to_string(issue.line) + ": " + issue.message);
  if (crop.dropped_nonpositive_speed > 0)
    warnings.push_back(std::to_string(crop.dropped_nonpositive_speed) +
                       " in-cordon record(s) with non-positive speed dropped");
  doc["warning_count"] = warnings.size();
  doc["warnings"] = warnings;
  print(out, doc);
  return kExitOk;
}

int cmd_precision(const Args& a, std::ostream& out) {
  print(out, to_json(precision(a.m, a.d, a.t, resolve_speed_distribution(a.dist))));
  return kExitOk;
}

int cmd_pdf(const Args& a, std::ostream& out) {
  detail::require(a.m >= 1, "--m must be >= 1");
  const auto dist = resolve_speed_distribution(a.dist);
  const auto folded = m_fold_pdf(single_probe_pdf(a.d, a.t, dist, a.grid_step), a.m);
  {
    auto file = open_output(a.out_path);
    write_pdf_csv(file, folded.pdf, a.m);
  }
  const auto mom = pdf_moments(folded.pdf);
  const auto theory = precision(a.m, a.d, a.t, dist);
  double drift = 0.0;
  for (double r : folded.renormalization) drift = std::max(drift, std::abs(r - 1.0));
  print(out, {{"m", a.m},
              {"d", a.d},
              {"t", a.t},
              {"grid_step", folded.pdf.grid_step},
              {"points", folded.pdf.size()},
              {"atom_at_zero", folded.pdf.atom_at_zero},
              {"total_mass", folded.pdf.total_mass()},
              {"mean", mom.mean},
              {"variance", mom.variance},
              {"theoretical", to_json(theory)},
              {"max_renormalization_drift", drift},
              {"warnings", folded.warnings},
              {"out", a.out_path}});
  return kExitOk;
}

int cmd_optimize(const Args& a, std::ostream& out) {
  const auto kind = parse_objective(a.objective);
  const auto report =
      optimize_cordon(a.dmax, a.t, resolve_speed_distribution(a.dist), kind, a.m, a.step, a.threads);
  if (!a.curve_out.empty()) {
    auto file = open_output(a.curve_out);
    write_curve_csv(file, report.curve, kind);
  }
  print(out, to_json(report));
  return kExitOk;
}

int cmd_simulate(const Args& a, std::ostream& out) {
  auto config = resolve_scenario(a.scenario);
  config.m = a.m;
  config.trials = a.trials;
  config.seed = a.seed;
  const auto result = run_scenario(config, {a.threads, a.bin_width, 0});
  json doc = {{"d", config.d},
              {"t", config.t},
              {"m", config.m},
              {"trials", config.trials},
              {"seed", config.seed},
              {"mean", result.summary.mean},
              {"variance", result.summary.variance},
              {"cv", result.summary.cv}};
  if (!a.hist_out.empty()) {
    auto file = open_output(a.hist_out);
    write_histogram_csv(file, result.summary.histogram);
    doc["hist_out"] = a.hist_out;
  }
  if (!a.emit_footprints.empty()) {
    detail::require(a.emit_trial < config.trials, "--emit-trial must be < --trials");
    const auto fp = emit_trial_footprints(config, a.emit_trial);
    write_footprints_csv(std::filesystem::path(a.emit_footprints), fp.records);
    doc["footprints"] = {{"path", a.emit_footprints},
                         {"trial", a.emit_trial},
                         {"records", fp.records.size()},
                         {"in_cordon", fp.in_cordon},
                         {"m_hat", fp.m_hat},
                         {"start", 0.0}};
  }
  print(out, doc);
  return kExitOk;
}

int cmd_experiment(const Args& a, std::ostream& out) {
  detail::require(a.pair_mode == "all" || a.pair_mode == "random", "--pairs must be all or random");
  const auto report = run_regression_experiment(resolve_sites(a.sites), a.trials,
                                                a.pair_mode == "all", a.seed, a.threads);
  if (!a.out_path.empty()) {
    auto file = open_output(a.out_path);
    file << to_json(report, true).dump(2) << '\n';
  }
  auto doc = to_json(report, false);
  doc["seed"] = a.seed;
  print(out, doc);
  return kExitOk;
}

int cmd_calibrate(const Args& a, std::ostream& out) {
  const auto pairs = read_pairs_csv(std::filesystem::path(a.pairs));
  print(out, to_json(fit_through_origin(pairs, parse_fit_method(a.method))));
  return kExitOk;
}

int cmd_apply(const Args& a, std::ostream& out) {
  detail::require(std::isfinite(a.beta), "--beta must be finite");
  detail::require(std::isfinite(a.m_hat) && a.m_hat >= 0.0, "--m-hat must be finite and >= 0");
  CalibrationModel model;
  model.beta = a.beta;
  out << json(predict(model, a.m_hat)).dump() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (argc < 2) return report_error(err, "usage", "a subcommand is required; see --help", kExitUsage);
  const std::string first = argv[1];
  if (first.empty() || (first[0] != '-' && !kSubcommands.count(first)))
    return report_error(err, "unknown_subcommand", "unknown subcommand: " + first, kExitUsage);

  CLI::App app{"Probe traffic volume estimation from point footprint data", "probevol"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Args a;

  auto* est = app.add_subcommand("estimate", "Estimate probe volume in a cordon from footprints");
  est->add_option("--footprints", a.footprints, "CSV with position_m,speed_mps[,label]")->required();
  est->add_option("--start", a.start, "Cordon start position (m)")->required();
  est->add_option("--d", a.d, "Cordon length (m)")->required();
  est->add_option("--t", a.t, "Recording interval (s)")->required();
  est->add_option("--label", a.label, "Only use records carrying this label");
  est->add_flag("--strict", a.strict, "Fail on malformed rows instead of skipping them");

  auto* pre = app.add_subcommand("precision", "Theoretical mean, variance, VMR and CV");
  pre->add_option("--m", a.m, "Probe count")->required();
  pre->add_option("--d", a.d, "Cordon length (m)")->required();
  pre->add_option("--t", a.t, "Recording interval (s)")->required();
  pre->add_option("--dist", a.dist, "Speed preset name or distribution JSON")->required();

  auto* pdf = app.add_subcommand("pdf", "Probability density of the estimator on a grid");
  pdf->add_option("--m", a.m, "Probe count")->required();
  pdf->add_option("--d", a.d, "Cordon length (m)")->required();
  pdf->add_option("--t", a.t, "Recording interval (s)")->required();
  pdf->add_option("--dist", a.dist, "Speed preset name or distribution JSON")->required();
  pdf->add_option("--grid-step", a.grid_step, "Grid resolution in probe units");
  pdf->add_option("--out", a.out_path, "Output CSV")->required();

  auto* opt = app.add_subcommand("optimize", "Choose the cordon length minimising CV or VMR");
  opt->add_option("--dmax", a.dmax, "Largest cordon length (m)")->required();
  opt->add_option("--t", a.t, "Recording interval (s)")->required();
  opt->add_option("--dist", a.dist, "Speed preset name or distribution JSON")->required();
  opt->add_option("--objective", a.objective, "cv or vmr")->required();
  opt->add_option("--m", a.m, "Probe count (CV only)");
  opt->add_option("--step", a.step, "Grid step in d (m)");
  opt->add_option("--curve-out", a.curve_out, "Write the objective curve as CSV");
  opt->add_option("--threads", a.threads, "Worker threads, 0 = all");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo trials of a single cordon");
  sim->add_option("--scenario", a.scenario, "s1, s2 or scenario JSON")->required();
  sim->add_option("--m", a.m, "Probe count")->required();
  sim->add_option("--trials", a.trials, "Number of trials")->required();
  sim->add_option("--seed", a.seed, "Master seed")->required();
  sim->add_option("--hist-out", a.hist_out, "Write the m_hat histogram as CSV");
  sim->add_option("--bin-width", a.bin_width, "Histogram bin width");
  sim->add_option("--emit-footprints", a.emit_footprints, "Write one trial's records as CSV");
  sim->add_option("--emit-trial", a.emit_trial, "Trial index for --emit-footprints");
  sim->add_option("--threads", a.threads, "Worker threads, 0 = all");

  auto* exp = app.add_subcommand("experiment", "OLS vs WLS calibration experiment");
  exp->add_option("--sites", a.sites, "table2 or sites JSON")->required();
  exp->add_option("--trials", a.trials, "Number of trials")->required();
  exp->add_option("--seed", a.seed, "Master seed")->required();
  exp->add_option("--out", a.out_path, "Write the full report, with per-trial MAPEs, as JSON");
  exp->add_option("--pairs", a.pair_mode, "all: every site pair per trial; random: one");
  exp->add_option("--threads", a.threads, "Worker threads, 0 = all");

  auto* cal = app.add_subcommand("calibrate", "Fit volume = beta * m_hat through the origin");
  cal->add_option("--pairs", a.pairs, "CSV with m_hat,adt[,weight]")->required();
  cal->add_option("--method", a.method, "ols or wls")->required();

  auto* app_cmd = app.add_subcommand("apply", "Apply a calibration factor");
  app_cmd->add_option("--beta", a.beta, "Calibration factor")->required();
  app_cmd->add_option("--m-hat", a.m_hat, "Estimated probe volume")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ExtrasError& e) {
    return report_error(err, "usage", e.what(), kExitUsage);
  } catch (const CLI::ParseError& e) {
    if (app.get_subcommands().empty())
      return report_error(err, "usage", e.what(), kExitUsage);
    return report_error(err, "invalid_parameter", e.what(), kExitBadParameter);
  }

  try {
    if (est->parsed()) return cmd_estimate(a, out);
    if (pre->parsed()) return cmd_precision(a, out);
    if (pdf->parsed()) return cmd_pdf(a, out);
    if (opt->parsed()) return cmd_optimize(a, out);
    if (sim->parsed()) return cmd_simulate(a, out);
    if (exp->parsed()) return cmd_experiment(a, out);
    if (cal->parsed()) return cmd_calibrate(a, out);
    if (app_cmd->parsed()) return cmd_apply(a, out);
  } catch (const InvalidArgument& e) {
    return report_error(err, "invalid_parameter", e.what(), kExitBadParameter);
  } catch (const IoError& e) {
    return report_error(err, "io", e.what(), kExitIo);
  } catch (const std::ios_base::failure& e) {
    return report_error(err, "io", e.what(), kExitIo);
  } catch (const std::exception& e) {
    return report_error(err, "computation", e.what(), kExitComputation);
  }
  return report_error(err, "usage", "no subcommand given", kExitUsage);
}

}  // namespace probevol
