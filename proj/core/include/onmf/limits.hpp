#pragma once

// The three W statistics of the total spin, their limit laws, and the Stein
// characterizing operator of the critical density
//   p(t) = t^{(N-2)/2} exp(-k t^2) / z,   k = 1 / (4 N^2 (N+2)),  t >= 0.

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "onmf/model.hpp"

namespace onmf::limits {

class RegimeError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

class DegenerateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// 1 / (4 N^2 (N+2)).
double critical_k_tilde(int dim);

struct CriticalDensity {
  int dim = 2;
  double k_tilde = 0.0;
  /// 0.5 k^{-N/4} Gamma(N/4).
  double z = 0.0;

  double pdf(double t) const;
  /// P(X <= t) = P(N/4, k t^2).
  double cdf(double t) const;
  double quantile(double p) const;
  /// k^{-1/2} Gamma((N+2)/4) / Gamma(N/4).
  double mean() const;
  /// N / (4k) = N^3 (N+2).
  double second_moment() const;
  double standard_deviation() const;
  double mode() const;
};

CriticalDensity critical_density(int dim);
double critical_pdf(int dim, double t);

enum class LimitKind { gaussian_vector, gaussian_scalar, critical };

/// Reference law for one scalar coordinate of a W sample: a standard normal
/// component, N(0, variance), or X / E X for the critical density.
struct LimitLaw {
  LimitKind kind = LimitKind::gaussian_vector;
  int dim = 2;
  double variance = 1.0;
  CriticalDensity critical{};

  static LimitLaw gaussian_vector(int dim);
  static LimitLaw gaussian_scalar(double variance);
  /// Law of X / E X.
  static LimitLaw critical_standardized(int dim);

  double cdf(double x) const;
  double quantile(double p) const;
  std::string describe() const;
};

/// sqrt((N - beta)/n) S_n; RegimeError unless beta < N.
std::vector<double> w_subcritical(const SpinConfiguration& config, const ModelParams& params);
/// sqrt(n) [ (beta / (n b))^2 |S_n|^2 - 1 ]; RegimeError unless beta > N.
double w_supercritical(const SpinConfiguration& config, const ModelParams& params, double b);
/// c_N |S_n|^2 / n^{3/2}.
double w_critical(const SpinConfiguration& config, double c_N);

/// A W statistic bound to its parameters, evaluated from the total spin alone.
class WStatistic {
public:
  static WStatistic subcritical(const ModelParams& params);
  /// Solves for b internally.
  static WStatistic supercritical(const ModelParams& params);
  static WStatistic critical(const ModelParams& params, double c_N = 1.0);
  static WStatistic for_regime(Regime regime, const ModelParams& params, double c_N = 1.0);

  Regime regime() const { return regime_; }
  /// N for the subcritical vector statistic, 1 otherwise.
  int components() const { return regime_ == Regime::subcritical ? dim_ : 1; }
  double b() const { return b_; }
  double c_N() const { return c_N_; }

  void evaluate(std::span<const double> total_spin, std::span<double> out) const;
  std::vector<double> evaluate(std::span<const double> total_spin) const;
  /// Value from |S|^2 for the scalar statistics.
  double from_squared(double total_squared) const;

private:
  WStatistic(Regime regime, const ModelParams& params);

  Regime regime_;
  int dim_;
  double n_;
  double beta_;
  double b_ = 0.0;
  double c_N_ = 1.0;
  double scale_ = 1.0;
};

using RealFunction = std::function<double(double)>;

/// [T_p f](x) = x f'(x) + (N/2 - 2 k x^2) f(x).
double stein_operator(int dim, const RealFunction& f, const RealFunction& df, double x);

/// Solution of T_p f = h - E h(X) on a geometric grid over (0, mode + 8 sd].
struct SteinSolution {
  int dim = 2;
  double eh = 0.0;
  std::vector<double> grid;
  std::vector<double> values;
  /// |T_p f - (h - Eh)| over interior grid points clear of the breakpoints.
  double max_residual = 0.0;
  /// max |f_left - f_right| between the two integral representations.
  double max_representation_gap = 0.0;
  std::size_t residual_points = 0;
};

/// f_h(t) = (1/(t p(t))) int_0^t (h - Eh) p, using the equivalent tail
/// integral above the mode. Breakpoints mark discontinuities of h. Throws
/// quad::NumericalError if the two representations disagree beyond 1e-6.
SteinSolution stein_solve(int dim, const RealFunction& h, std::vector<double> breakpoints = {},
                          std::size_t grid_points = 200);

/// E h(X) under the critical density.
double critical_expectation(int dim, const RealFunction& h,
                            std::span<const double> breakpoints = {});

/// 1 / mean of |S|^2/n^{3/2} samples; needs >= 1000 samples.
double calibrate_c_N(std::span<const double> squared_totals_scaled);

}  // namespace onmf::limits
