#include "onmf/limits.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "onmf/quadrature.hpp"
#include "onmf/thermo.hpp"

namespace onmf::limits {

double critical_k_tilde(int dim) {
  if (dim < 2) throw std::domain_error("critical_k_tilde: dimension must be >= 2");
  const double n = dim;
  return 1.0 / (4.0 * n * n * (n + 2.0));
}

double CriticalDensity::pdf(double t) const {
  if (t < 0.0) return 0.0;
  if (t == 0.0) return dim == 2 ? 1.0 / z : 0.0;
  return std::exp(0.5 * (dim - 2) * std::log(t) - k_tilde * t * t) / z;
}

double CriticalDensity::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  return boost::math::gamma_p(0.25 * dim, k_tilde * t * t);
}

double CriticalDensity::quantile(double p) const {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(boost::math::gamma_p_inv(0.25 * dim, p) / k_tilde);
}

double CriticalDensity::mean() const {
  return std::exp(std::lgamma(0.25 * (dim + 2)) - std::lgamma(0.25 * dim)) / std::sqrt(k_tilde);
}

double CriticalDensity::second_moment() const { return dim / (4.0 * k_tilde); }

double CriticalDensity::standard_deviation() const {
  const double m = mean();
  return std::sqrt(second_moment() - m * m);
}

double CriticalDensity::mode() const { return std::sqrt((dim - 2) / (4.0 * k_tilde)); }

CriticalDensity critical_density(int dim) {
  CriticalDensity d;
  d.dim = dim;
  d.k_tilde = critical_k_tilde(dim);
  d.z = 0.5 * std::pow(d.k_tilde, -0.25 * dim) * std::tgamma(0.25 * dim);
  return d;
}

double critical_pdf(int dim, double t) { return critical_density(dim).pdf(t); }

LimitLaw LimitLaw::gaussian_vector(int dim) {
  LimitLaw law;
  law.kind = LimitKind::gaussian_vector;
  law.dim = dim;
  return law;
}

LimitLaw LimitLaw::gaussian_scalar(double variance) {
  if (!(variance > 0.0)) throw std::domain_error("LimitLaw: variance must be > 0");
  LimitLaw law;
  law.kind = LimitKind::gaussian_scalar;
  law.dim = 1;
  law.variance = variance;
  return law;
}

LimitLaw LimitLaw::critical_standardized(int dim) {
  LimitLaw law;
  law.kind = LimitKind::critical;
  law.dim = dim;
  law.critical = critical_density(dim);
  return law;
}

double LimitLaw::cdf(double x) const {
  switch (kind) {
    case LimitKind::gaussian_vector:
      return 0.5 * std::erfc(-x / std::sqrt(2.0));
    case LimitKind::gaussian_scalar:
      return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
    case LimitKind::critical:
      return critical.cdf(x * critical.mean());
  }
  return 0.0;
}

double LimitLaw::quantile(double p) const {
  switch (kind) {
    case LimitKind::gaussian_vector:
      return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
    case LimitKind::gaussian_scalar:
      return -std::sqrt(2.0 * variance) * boost::math::erfc_inv(2.0 * p);
    case LimitKind::critical:
      return critical.quantile(p) / critical.mean();
  }
  return 0.0;
}

std::string LimitLaw::describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind) {
    case LimitKind::gaussian_vector:
      out << "standard normal component of N(0, I_" << dim << ")";
      break;
    case LimitKind::gaussian_scalar:
      out << "N(0, " << variance << ")";
      break;
    case LimitKind::critical:
      out << "X/E[X], p(t) ~ t^" << 0.5 * (dim - 2) << " exp(-" << critical.k_tilde
          << " t^2), N=" << dim;
      break;
  }
  return out.str();
}

std::vector<double> w_subcritical(const SpinConfiguration& config, const ModelParams& params) {
  return WStatistic::subcritical(params).evaluate(config.total_spin());
}

double w_supercritical(const SpinConfiguration& config, const ModelParams& params, double b) {
  if (params.regime() != Regime::supercritical) {
    throw RegimeError("w_supercritical: requires beta > N");
  }
  if (!(b > 0.0)) throw std::domain_error("w_supercritical: b must be > 0");
  const double n = static_cast<double>(params.n_sites);
  const double scale = params.beta * params.beta / (n * n * b * b);
  return std::sqrt(n) * (scale * config.total_spin_squared() - 1.0);
}

double w_critical(const SpinConfiguration& config, double c_N) {
  if (!(c_N > 0.0)) throw std::domain_error("w_critical: c_N must be > 0");
  return c_N * config.total_spin_squared() / std::pow(static_cast<double>(config.size()), 1.5);
}

WStatistic::WStatistic(Regime regime, const ModelParams& params)
    : regime_(regime), dim_(params.dim), n_(static_cast<double>(params.n_sites)),
      beta_(params.beta) {
  params.validate();
  if (params.regime() != regime) {
    throw RegimeError("W statistic for the " + to_string(regime) +
                      " regime requested at beta = " + std::to_string(params.beta) +
                      ", N = " + std::to_string(params.dim));
  }
}

WStatistic WStatistic::subcritical(const ModelParams& params) {
  WStatistic w(Regime::subcritical, params);
  w.scale_ = std::sqrt((w.dim_ - w.beta_) / w.n_);
  return w;
}

WStatistic WStatistic::supercritical(const ModelParams& params) {
  WStatistic w(Regime::supercritical, params);
  w.b_ = thermo::solve_fixed_point(params.dim, params.beta);
  w.scale_ = w.beta_ * w.beta_ / (w.n_ * w.n_ * w.b_ * w.b_);
  return w;
}

WStatistic WStatistic::critical(const ModelParams& params, double c_N) {
  if (!(c_N > 0.0)) throw std::domain_error("WStatistic: c_N must be > 0");
  WStatistic w(Regime::critical, params);
  w.c_N_ = c_N;
  w.scale_ = c_N / std::pow(w.n_, 1.5);
  return w;
}

WStatistic WStatistic::for_regime(Regime regime, const ModelParams& params, double c_N) {
  switch (regime) {
    case Regime::subcritical:
      return subcritical(params);
    case Regime::supercritical:
      return supercritical(params);
    case Regime::critical:
      return critical(params, c_N);
  }
  throw RegimeError("unknown regime");
}

double WStatistic::from_squared(double s2) const {
  switch (regime_) {
    case Regime::supercritical:
      return std::sqrt(n_) * (scale_ * s2 - 1.0);
    case Regime::critical:
      return scale_ * s2;
    case Regime::subcritical:
      break;
  }
  throw RegimeError("from_squared: the subcritical statistic is a vector");
}

void WStatistic::evaluate(std::span<const double> total, std::span<double> out) const {
  if (regime_ == Regime::subcritical) {
    for (int k = 0; k < dim_; ++k) out[k] = scale_ * total[k];
    return;
  }
  double s2 = 0.0;
  for (int k = 0; k < dim_; ++k) s2 += total[k] * total[k];
  out[0] = from_squared(s2);
}

std::vector<double> WStatistic::evaluate(std::span<const double> total) const {
  std::vector<double> out(static_cast<std::size_t>(components()));
  evaluate(total, out);
  return out;
}

double stein_operator(int dim, const RealFunction& f, const RealFunction& df, double x) {
  const double k = critical_k_tilde(dim);
  return x * df(x) + (0.5 * dim - 2.0 * k * x * x) * f(x);
}

namespace {

// int_a^b g(t) p(t) dt through t = s^2, which removes the t^{(N-2)/2}
// endpoint behaviour at 0.
double integrate_against_p(const CriticalDensity& d, const RealFunction& g, double a, double b,
                           std::span<const double> breakpoints) {
  std::vector<double> cuts;
  cuts.reserve(breakpoints.size());
  for (double t : breakpoints) {
    if (t > 0.0) cuts.push_back(std::sqrt(t));
  }
  return quad::integrate(
      [&](double s) {
        const double t = s * s;
        return g(t) * d.pdf(t) * 2.0 * s;
      },
      std::sqrt(a), std::sqrt(b), 1e-14, cuts);
}

// Beyond k t^2 = 60 the remaining mass is below 1e-24.
double effective_upper(const CriticalDensity& d) { return std::sqrt(60.0 / d.k_tilde); }

}  // namespace

double critical_expectation(int dim, const RealFunction& h, std::span<const double> breakpoints) {
  const auto d = critical_density(dim);
  return integrate_against_p(d, h, 0.0, effective_upper(d), breakpoints);
}

SteinSolution stein_solve(int dim, const RealFunction& h, std::vector<double> breakpoints,
                          std::size_t grid_points) {
  if (grid_points < 3) throw std::invalid_argument("stein_solve: need at least 3 grid points");
  const auto d = critical_density(dim);
  const double upper = effective_upper(d);
  std::sort(breakpoints.begin(), breakpoints.end());

  SteinSolution sol;
  sol.dim = dim;
  sol.eh = integrate_against_p(d, h, 0.0, upper, breakpoints);
  const RealFunction g = [&](double t) { return h(t) - sol.eh; };

  const double t_max = d.mode() + 8.0 * d.standard_deviation();
  const double t_min = 1e-3 * t_max;
  const double ratio = std::pow(t_max / t_min, 1.0 / static_cast<double>(grid_points - 1));
  const double mode = d.mode();

  double t = t_min;
  for (std::size_t i = 0; i < grid_points; ++i, t *= ratio) {
    if (i + 1 == grid_points) t = t_max;
    const double tp = t * d.pdf(t);
    const double left = integrate_against_p(d, g, 0.0, t, breakpoints);
    const double right = -integrate_against_p(d, g, t, upper, breakpoints);
    const double numerator = t < mode ? left : right;
    const double value = numerator / tp;
    const double gap = std::abs(left - right) / tp;
    sol.max_representation_gap = std::max(sol.max_representation_gap, gap);
    if (gap > 1e-6 * std::max(1.0, std::abs(value))) {
      throw quad::NumericalError("stein_solve: integral representations disagree by " +
                                 std::to_string(gap) + " at t = " + std::to_string(t));
    }
    sol.grid.push_back(t);
    sol.values.push_back(value);

    if (i == 0 || i + 1 == grid_points) continue;
    const double delta = 1e-3 * t;
    const bool near_jump = std::any_of(breakpoints.begin(), breakpoints.end(),
                                       [&](double m) { return std::abs(m - t) <= 3.0 * delta; });
    if (near_jump) continue;
    auto f_at = [&](double s) {
      return (numerator + integrate_against_p(d, g, t, s, breakpoints)) / (s * d.pdf(s));
    };
    const double df = (f_at(t - 2 * delta) - 8.0 * f_at(t - delta) + 8.0 * f_at(t + delta) -
                       f_at(t + 2 * delta)) /
                      (12.0 * delta);
    const double lhs = t * df + (0.5 * dim - 2.0 * d.k_tilde * t * t) * value;
    sol.max_residual = std::max(sol.max_residual, std::abs(lhs - g(t)));
    ++sol.residual_points;
  }
  return sol;
}

double calibrate_c_N(std::span<const double> samples) {
  if (samples.size() < 1000) {
    throw std::invalid_argument("calibrate_c_N: needs at least 1000 samples");
  }
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mean = sum / static_cast<double>(samples.size());
  if (!(mean > 0.0)) throw DegenerateError("calibrate_c_N: sample mean must be > 0");
  return 1.0 / mean;
}

}  // namespace onmf::limits
