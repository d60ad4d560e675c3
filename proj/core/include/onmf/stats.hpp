#pragma once

// Distances to reference laws, Monte Carlo error bars and the regressions
// that test exchangeable-pair drift identities.
//
// The bounded-Lipschitz distance is never
// computed; W1 (quantile coupling) bounds it from above and KS is reported
// alongside.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "onmf/limits.hpp"

namespace onmf::stats {

struct AutocorrelationEstimate {
  double tau = 0.5;
  std::size_t window = 0;
  /// Zero variance: tau is undefined.
  bool degenerate = false;
  /// False when the series is shorter than 1000 points or the window rule
  /// needed more than a tenth of the series.
  bool reliable = true;
};

/// Integrated autocorrelation time tau = 1/2 + sum_{t=1}^{W} rho(t), with the
/// window W grown until W >= 5 tau.
AutocorrelationEstimate autocorrelation_time(std::span<const double> series);

/// Standard error of the mean from non-overlapping batches.
double batch_means_standard_error(std::span<const double> series, std::size_t batch_length);

struct EmpiricalSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double tau = 0.5;
  double effective_sample_size = 0.0;
  /// Batch means with batch length 10 tau.
  double mean_standard_error = 0.0;
  bool tau_reliable = true;

  std::string to_json() const;
};

EmpiricalSummary summarize(std::span<const double> series);

/// sup |F_n - F| over the sample, with both one-sided limits at each distinct
/// value; the left limit of F is taken at nextafter(x, -inf).
double ks_distance(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// (1/n) sum_k |x_(k) - Q((k - 1/2)/n)|.
double wasserstein1(std::span<const double> sorted, const std::function<double(double)>& quantile);

struct DistanceReport {
  double ks = 0.0;
  double wasserstein1 = 0.0;
  std::size_t sample_count = 0;
  std::string reference;
  /// Block-bootstrap standard error of ks (0 when not computed).
  double ks_standard_error = 0.0;

  std::string to_json() const;
};

/// Samples in time order; the bootstrap resamples blocks of `block_length`.
DistanceReport compare_to_law(std::span<const double> samples, const limits::LimitLaw& law,
                              std::size_t bootstrap_replicates = 0, std::size_t block_length = 0,
                              std::uint64_t seed = 1);

struct RegressionPoint {
  double x = 0.0;
  double y = 0.0;
};

enum class DriftModel {
  /// y = -lambda x
  linear_through_origin,
  /// y = intercept - lambda x
  linear,
  /// y = alpha (1 - c x^2)
  quadratic,
};

enum class VariationModel {
  /// y = k x
  proportional,
  /// y = constant
  constant,
};

struct RegressionResult {
  std::vector<std::string> names;
  std::vector<double> coefficients;
  std::vector<double> standard_errors;
  std::size_t points = 0;
  std::size_t block_length = 1;
  /// Mean residual over its standard error.
  double residual_mean_t = 0.0;

  double coefficient(const std::string& name) const;
  double standard_error(const std::string& name) const;
  std::string to_json() const;
};

struct BootstrapOptions {
  std::size_t replicates = 400;
  /// 0 picks 5 tau of the regressor series, at least 1.
  std::size_t block_length = 0;
  std::uint64_t seed = 0x5EEDULL;
};

class IllConditionedError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Least squares with moving-block bootstrap standard errors. Points are
/// expected in time order so blocks respect serial correlation.
RegressionResult drift_regression(std::span<const RegressionPoint> points, DriftModel model,
                                  const BootstrapOptions& options = {});
RegressionResult quadratic_variation_regression(std::span<const RegressionPoint> points,
                                                VariationModel model,
                                                const BootstrapOptions& options = {});

struct BinnedRow {
  double x_mean = 0.0;
  double y_mean = 0.0;
  double y_standard_error = 0.0;
  std::size_t count = 0;
};

/// Equal-count bins by x.
std::vector<BinnedRow> binned_means(std::span<const RegressionPoint> points, std::size_t bins = 50);
void write_binned_csv(std::ostream& out, std::span<const BinnedRow> rows);

}  // namespace onmf::stats
