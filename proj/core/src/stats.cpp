#include "onmf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "onmf/rng.hpp"

namespace onmf::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return kNaN;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

AutocorrelationEstimate autocorrelation_time(std::span<const double> series) {
  AutocorrelationEstimate est;
  const std::size_t n = series.size();
  if (n < 2) {
    est.degenerate = true;
    est.reliable = false;
    est.tau = kNaN;
    return est;
  }
  const double m = mean_of(series);
  std::vector<double> centered(n);
  double c0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    centered[i] = series[i] - m;
    c0 += centered[i] * centered[i];
  }
  c0 /= static_cast<double>(n);
  if (!(c0 > 1e-300) || c0 <= 1e-28 * m * m) {
    est.degenerate = true;
    est.reliable = false;
    est.tau = kNaN;
    return est;
  }
  double tau = 0.5;
  std::size_t w = 1;
  for (; w < n; ++w) {
    double c = 0.0;
    for (std::size_t i = 0; i + w < n; ++i) c += centered[i] * centered[i + w];
    tau += c / (static_cast<double>(n) * c0);
    if (static_cast<double>(w) >= 5.0 * tau) break;
  }
  est.tau = tau;
  est.window = w;
  est.reliable = n >= 1000 && w <= n / 10;
  return est;
}

double batch_means_standard_error(std::span<const double> series, std::size_t batch_length) {
  batch_length = std::max<std::size_t>(batch_length, 1);
  const std::size_t batches = series.size() / batch_length;
  if (batches < 2) return kNaN;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    means[b] = mean_of(series.subspan(b * batch_length, batch_length));
  }
  return sample_sd(means) / std::sqrt(static_cast<double>(batches));
}

EmpiricalSummary summarize(std::span<const double> series) {
  EmpiricalSummary s;
  s.count = series.size();
  if (s.count == 0) throw std::invalid_argument("summarize: empty series");
  s.mean = mean_of(series);
  double m2 = 0.0;
  double m3 = 0.0;
  for (double x : series) {
    const double d = x - s.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(s.count);
  m3 /= static_cast<double>(s.count);
  s.variance = s.count > 1 ? m2 * static_cast<double>(s.count) / static_cast<double>(s.count - 1) : 0.0;
  s.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  const auto ac = autocorrelation_time(series);
  s.tau = ac.tau;
  s.tau_reliable = ac.reliable;
  if (ac.degenerate) {
    s.effective_sample_size = static_cast<double>(s.count);
    s.mean_standard_error = 0.0;
    return s;
  }
  s.effective_sample_size = static_cast<double>(s.count) / std::max(1.0, 2.0 * s.tau);
  const auto batch = static_cast<std::size_t>(std::ceil(10.0 * std::max(s.tau, 0.5)));
  s.mean_standard_error = batch_means_standard_error(series, batch);
  return s;
}

std::string EmpiricalSummary::to_json() const {
  nlohmann::ordered_json j;
  j["sample_count"] = count;
  j["mean"] = mean;
  j["variance"] = variance;
  j["skewness"] = skewness;
  j["tau"] = tau;
  j["effective_sample_size"] = effective_sample_size;
  j["mean_standard_error"] = mean_standard_error;
  j["tau_reliable"] = tau_reliable;
  return j.dump(2);
}

double ks_distance(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  const std::size_t n = sorted.size();
  if (n == 0) throw std::invalid_argument("ks_distance: empty sample");
  double d = 0.0;
  std::size_t i = 0;
  const double inv_n = 1.0 / static_cast<double>(n);
  while (i < n) {
    const double x = sorted[i];
    std::size_t j = i;
    while (j < n && sorted[j] == x) ++j;
    const double below = static_cast<double>(i) * inv_n;
    const double at = static_cast<double>(j) * inv_n;
    const double f_left = cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
    const double f_at = cdf(x);
    d = std::max({d, std::abs(at - f_at), std::abs(below - f_left)});
    i = j;
  }
  return std::min(d, 1.0);
}

double wasserstein1(std::span<const double> sorted, const std::function<double(double)>& quantile) {
  const std::size_t n = sorted.size();
  if (n == 0) throw std::invalid_argument("wasserstein1: empty sample");
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double p = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    sum += std::abs(sorted[k] - quantile(p));
  }
  return sum / static_cast<double>(n);
}

std::string DistanceReport::to_json() const {
  nlohmann::ordered_json j;
  j["ks"] = ks;
  j["ks_standard_error"] = ks_standard_error;
  j["wasserstein1"] = wasserstein1;
  j["sample_count"] = sample_count;
  j["reference"] = reference;
  return j.dump(2);
}

namespace {

std::vector<std::size_t> block_resample(std::size_t n, std::size_t block, Rng& rng) {
  std::vector<std::size_t> idx;
  idx.reserve(n + block);
  const std::size_t starts = n - block + 1;
  while (idx.size() < n) {
    const auto s = static_cast<std::size_t>(rng.index(starts));
    for (std::size_t k = 0; k < block && idx.size() < n; ++k) idx.push_back(s + k);
  }
  return idx;
}

std::size_t auto_block(std::span<const double> series) {
  const auto ac = autocorrelation_time(series);
  double tau = ac.degenerate ? 0.5 : ac.tau;
  auto block = static_cast<std::size_t>(std::ceil(5.0 * std::max(tau, 0.2)));
  return std::clamp<std::size_t>(block, 1, std::max<std::size_t>(1, series.size() / 10));
}

}  // namespace

DistanceReport compare_to_law(std::span<const double> samples, const limits::LimitLaw& law,
                              std::size_t replicates, std::size_t block_length,
                              std::uint64_t seed) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  auto cdf = [&](double x) { return law.cdf(x); };
  DistanceReport report;
  report.ks = ks_distance(sorted, cdf);
  report.wasserstein1 = wasserstein1(sorted, [&](double p) { return law.quantile(p); });
  report.sample_count = samples.size();
  report.reference = law.describe();
  if (replicates > 1 && samples.size() >= 20) {
    const std::size_t block = block_length ? block_length : auto_block(samples);
    Rng rng(seed);
    std::vector<double> ks_star;
    ks_star.reserve(replicates);
    std::vector<double> resampled(samples.size());
    for (std::size_t r = 0; r < replicates; ++r) {
      const auto idx = block_resample(samples.size(), block, rng);
      for (std::size_t i = 0; i < idx.size(); ++i) resampled[i] = samples[idx[i]];
      std::sort(resampled.begin(), resampled.end());
      ks_star.push_back(ks_distance(resampled, cdf));
    }
    report.ks_standard_error = sample_sd(ks_star);
  }
  return report;
}

double RegressionResult::coefficient(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return coefficients[i];
  }
  throw std::out_of_range("RegressionResult: no coefficient '" + name + "'");
}

double RegressionResult::standard_error(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return standard_errors[i];
  }
  throw std::out_of_range("RegressionResult: no coefficient '" + name + "'");
}

std::string RegressionResult::to_json() const {
  nlohmann::ordered_json j;
  for (std::size_t i = 0; i < names.size(); ++i) {
    j["coefficients"][names[i]] = {{"estimate", coefficients[i]},
                                   {"standard_error", standard_errors[i]}};
  }
  j["points"] = points;
  j["block_length"] = block_length;
  j["residual_mean_t"] = residual_mean_t;
  return j.dump(2);
}

namespace {

enum class Fit { minus_x, one_minus_x, one_x2, x, one };

// Least squares on at most two columns. Returns the raw column coefficients.
std::vector<double> least_squares(const std::vector<RegressionPoint>& pts, Fit fit) {
  double s11 = 0, s12 = 0, s22 = 0, t1 = 0, t2 = 0;
  for (const auto& p : pts) {
    double c1 = 0.0;
    double c2 = 0.0;
    switch (fit) {
      case Fit::minus_x: c1 = -p.x; break;
      case Fit::x: c1 = p.x; break;
      case Fit::one: c1 = 1.0; break;
      case Fit::one_minus_x: c1 = 1.0; c2 = -p.x; break;
      case Fit::one_x2: c1 = 1.0; c2 = p.x * p.x; break;
    }
    s11 += c1 * c1;
    s12 += c1 * c2;
    s22 += c2 * c2;
    t1 += c1 * p.y;
    t2 += c2 * p.y;
  }
  const bool two = fit == Fit::one_minus_x || fit == Fit::one_x2;
  if (!two) {
    if (!(s11 > 0.0)) throw IllConditionedError("regression: zero design column");
    return {t1 / s11};
  }
  const double det = s11 * s22 - s12 * s12;
  if (!(det > 1e-12 * s11 * s22)) {
    throw IllConditionedError("regression: regressor has no spread");
  }
  return {(s22 * t1 - s12 * t2) / det, (s11 * t2 - s12 * t1) / det};
}

struct Spec {
  Fit fit;
  std::vector<std::string> names;
};

// Maps raw coefficients to the reported parametrisation.
std::vector<double> transform(Fit fit, const std::vector<double>& raw) {
  switch (fit) {
    case Fit::one_minus_x:
      return {raw[1], raw[0]};  // lambda, intercept
    case Fit::one_x2:
      return {raw[0], -raw[1] / raw[0]};  // alpha, c
    default:
      return raw;
  }
}

double predict(Fit fit, const std::vector<double>& raw, double x) {
  switch (fit) {
    case Fit::minus_x: return -raw[0] * x;
    case Fit::x: return raw[0] * x;
    case Fit::one: return raw[0];
    case Fit::one_minus_x: return raw[0] - raw[1] * x;
    case Fit::one_x2: return raw[0] + raw[1] * x * x;
  }
  return 0.0;
}

RegressionResult fit_with_bootstrap(std::span<const RegressionPoint> points, const Spec& spec,
                                    const BootstrapOptions& options) {
  const std::size_t params = spec.names.size();
  if (points.size() < params + 2) {
    throw IllConditionedError("regression: too few points");
  }
  const std::vector<RegressionPoint> pts(points.begin(), points.end());
  const auto raw = least_squares(pts, spec.fit);

  RegressionResult result;
  result.names = spec.names;
  result.coefficients = transform(spec.fit, raw);
  result.points = pts.size();

  std::vector<double> xs(pts.size());
  std::vector<double> residuals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    xs[i] = pts[i].x;
    residuals[i] = pts[i].y - predict(spec.fit, raw, pts[i].x);
  }
  const std::size_t block = options.block_length ? options.block_length : auto_block(xs);
  result.block_length = block;

  const auto rs = summarize(residuals);
  result.residual_mean_t = rs.mean_standard_error > 0.0 ? rs.mean / rs.mean_standard_error : 0.0;

  Rng rng(options.seed);
  std::vector<std::vector<double>> draws(params);
  std::vector<RegressionPoint> resampled(pts.size());
  for (std::size_t r = 0; r < options.replicates; ++r) {
    const auto idx = block_resample(pts.size(), std::min(block, pts.size()), rng);
    for (std::size_t i = 0; i < idx.size(); ++i) resampled[i] = pts[idx[i]];
    try {
      const auto coef = transform(spec.fit, least_squares(resampled, spec.fit));
      for (std::size_t k = 0; k < params; ++k) draws[k].push_back(coef[k]);
    } catch (const IllConditionedError&) {
    }
  }
  for (std::size_t k = 0; k < params; ++k) result.standard_errors.push_back(sample_sd(draws[k]));
  return result;
}

}  // namespace

RegressionResult drift_regression(std::span<const RegressionPoint> points, DriftModel model,
                                  const BootstrapOptions& options) {
  switch (model) {
    case DriftModel::linear_through_origin:
      return fit_with_bootstrap(points, {Fit::minus_x, {"lambda"}}, options);
    case DriftModel::linear:
      return fit_with_bootstrap(points, {Fit::one_minus_x, {"lambda", "intercept"}}, options);
    case DriftModel::quadratic:
      return fit_with_bootstrap(points, {Fit::one_x2, {"alpha", "c"}}, options);
  }
  throw std::invalid_argument("drift_regression: unknown model");
}

RegressionResult quadratic_variation_regression(std::span<const RegressionPoint> points,
                                                VariationModel model,
                                                const BootstrapOptions& options) {
  switch (model) {
    case VariationModel::proportional:
      return fit_with_bootstrap(points, {Fit::x, {"k"}}, options);
    case VariationModel::constant:
      return fit_with_bootstrap(points, {Fit::one, {"constant"}}, options);
  }
  throw std::invalid_argument("quadratic_variation_regression: unknown model");
}

std::vector<BinnedRow> binned_means(std::span<const RegressionPoint> points, std::size_t bins) {
  std::vector<RegressionPoint> pts(points.begin(), points.end());
  std::stable_sort(pts.begin(), pts.end(),
                   [](const RegressionPoint& a, const RegressionPoint& b) { return a.x < b.x; });
  bins = std::max<std::size_t>(1, std::min(bins, pts.size()));
  std::vector<BinnedRow> rows;
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t lo = b * pts.size() / bins;
    const std::size_t hi = (b + 1) * pts.size() / bins;
    BinnedRow row;
    row.count = hi - lo;
    if (row.count == 0) continue;
    double sx = 0.0;
    double sy = 0.0;
    double syy = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      sx += pts[i].x;
      sy += pts[i].y;
      syy += pts[i].y * pts[i].y;
    }
    const double c = static_cast<double>(row.count);
    row.x_mean = sx / c;
    row.y_mean = sy / c;
    row.y_standard_error =
        row.count > 1 ? std::sqrt(std::max(0.0, (syy - c * row.y_mean * row.y_mean) / (c - 1.0)) / c)
                      : 0.0;
    rows.push_back(row);
  }
  return rows;
}

void write_binned_csv(std::ostream& out, std::span<const BinnedRow> rows) {
  out << "x_mean,y_mean,y_standard_error,count\n";
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.x_mean << ',' << r.y_mean << ',' << r.y_standard_error << ',' << r.count << '\n';
  }
}

}  // namespace onmf::stats
