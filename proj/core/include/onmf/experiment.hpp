#pragma once

// Experiment orchestration: manifests, parallel chains, sample files, and the
// checks that compare Monte Carlo output with the limit theorems.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "onmf/limits.hpp"
#include "onmf/model.hpp"
#include "onmf/sampler.hpp"
#include "onmf/stats.hpp"
#include "onmf/thermo.hpp"

namespace onmf::experiment {

std::string artifact_version();

struct RunManifest {
  std::uint64_t master_seed = 1;
  ModelParams params;
  std::uint64_t chains = 1;
  std::uint64_t burn_in_sweeps = 200;
  std::uint64_t thin_sweeps = 1;
  /// Recorded samples (or, for pair diagnostics, configurations) per chain.
  std::uint64_t samples_per_chain = 1000;
  /// Exchangeable pairs drawn from each recorded configuration.
  std::uint64_t pairs_per_config = 1000;
  Regime statistic = Regime::subcritical;
  /// Scale of the critical statistic; 1 records |S|^2 / n^{3/2}.
  double c_N = 1.0;
  sampler::InitialState start = sampler::InitialState::random;
  std::string artifact_version = experiment::artifact_version();

  /// Throws std::invalid_argument on zero counts and limits::RegimeError when
  /// the statistic does not match beta.
  void validate() const;
  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

/// Workers for `jobs` independent tasks: ONMF_WORKERS if set, otherwise the
/// hardware concurrency, capped by `jobs`.
std::size_t worker_count(std::size_t jobs);

/// Runs task(i) for i in [0, jobs) on worker threads. Each task writes only
/// its own slot, so results are independent of scheduling.
void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& task);

struct ChainSamples {
  std::uint64_t chain = 0;
  /// samples x components, row-major.
  std::vector<double> values;
  std::vector<std::uint64_t> sweeps;
  double vmf_acceptance = 1.0;
};

struct SampleRun {
  RunManifest manifest;
  int components = 1;
  std::vector<ChainSamples> chains;

  /// Component `j` of every sample, chains concatenated in order.
  std::vector<double> component(int j) const;
  /// |W|^2 per sample.
  std::vector<double> squared_norms() const;
};

SampleRun run_sample(const RunManifest& manifest);

/// CSV: chain,sweep,w (scalar) or chain,sweep,w1,...,wN (vector).
void write_samples_csv(std::ostream& out, const SampleRun& run);
/// Reads the samples back; the manifest is not part of the CSV.
SampleRun read_samples_csv(std::istream& in);

/// Manifest plus per-component EmpiricalSummary.
std::string summary_json(const SampleRun& run);
/// The manifest stored in a summary written by summary_json.
RunManifest manifest_from_summary_json(const std::string& text);

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct LimitCheckResult {
  Regime regime = Regime::subcritical;
  std::vector<stats::DistanceReport> distances;
  /// Sample mean of |W|^2 and its target (subcritical), or sample variance
  /// and its target (supercritical).
  double moment = 0.0;
  double moment_target = 0.0;
  std::vector<Check> checks;
  bool passed() const;
  std::string to_json() const;
};

struct LimitThresholds {
  double ks_subcritical = 0.02;
  double ks_supercritical = 0.05;
  double ks_critical = 0.05;
  double second_moment_rel = 0.05;
  double variance_rel = 0.15;
};

/// Compares the samples with the limit law of `regime` at (N, beta). The
/// critical samples are divided by their mean and compared with X / E X.
LimitCheckResult limit_check(const SampleRun& run, Regime regime,
                             const LimitThresholds& thresholds = {},
                             std::size_t bootstrap_replicates = 200);

struct SteinDiagnostics {
  Regime regime = Regime::subcritical;
  stats::RegressionResult drift;
  stats::RegressionResult variation;
  /// Named theoretical values (lambda, alpha, c, k, 2 lambda Var, ...).
  std::vector<std::pair<std::string, double>> predictions;
  std::vector<Check> checks;
  std::vector<stats::BinnedRow> drift_bins;
  std::vector<stats::RegressionPoint> drift_points;
  std::vector<stats::RegressionPoint> variation_points;
  double c_N = 1.0;
  bool passed() const;
  double prediction(const std::string& name) const;
  std::string to_json() const;
};

/// Pair batches from `samples_per_chain` configurations per chain, then the
/// drift and quadratic-variation regressions. For the critical regime c_N is
/// recalibrated from the recorded configurations so that mean W = 1.
SteinDiagnostics stein_diagnostics(const RunManifest& manifest);

struct ThermoScanRow {
  thermo::PhasePoint point;
  bool ok = true;
  std::string error;
};

struct ThermoScan {
  std::vector<ThermoScanRow> rows;
  /// First beta with b > tolerance, if any.
  std::optional<double> detected_beta_c;
};

ThermoScan thermo_scan(int dim, double beta_min, double beta_max, double step,
                       double tolerance = 1e-10);
void write_thermo_scan_csv(std::ostream& out, const ThermoScan& scan);

void write_rate_table_csv(std::ostream& out, int dim, double beta, double r_max, std::size_t points);
void write_density_table_csv(std::ostream& out, int dim, double t_max, std::size_t points);

struct Calibration {
  double c_N = 0.0;
  double mean = 0.0;
  double mean_standard_error = 0.0;
  std::size_t samples = 0;
  std::string to_json() const;
};

/// Runs the critical chain with c_N = 1 and returns 1 / mean(|S|^2/n^{3/2}).
Calibration calibrate(const RunManifest& manifest);

/// Shortest round-trip decimal form, used for every number written to CSV.
std::string format_double(double x);

}  // namespace onmf::experiment
