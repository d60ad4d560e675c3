#pragma once

// Reference computations for the tests. Nothing here calls into onmf; each
// oracle uses a different route (long double series, libstdc++ special
// functions, Boost tanh-sinh / exp-sinh quadrature, brute force).

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

// Power series in long double, summed until terms stop contributing.
inline long double bessel_i_series(long double nu, long double x) {
  if (x == 0.0L) return nu == 0.0L ? 1.0L : 0.0L;
  const long double q = x * x / 4.0L;
  long double term = std::exp(nu * std::log(x / 2.0L) - std::lgamma(nu + 1.0L));
  long double sum = term;
  for (int k = 1; k < 100000; ++k) {
    term *= q / (static_cast<long double>(k) * (k + nu));
    sum += term;
    if (term < 1e-21L * sum) break;
  }
  return sum;
}

inline double bessel_ratio_quotient(int dim, double kappa) {
  return std::cyl_bessel_i(0.5 * dim, kappa) / std::cyl_bessel_i(0.5 * dim - 1.0, kappa);
}

// Integrals over theta in (0, pi) of g(cos t) sin^{N-2} t.
template <class G>
double theta_integral(int dim, G g) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double t) { return g(std::cos(t)) * std::pow(std::sin(t), dim - 2); };
  return ts.integrate(f, 0.0, std::numbers::pi);
}

// Tilted-family functional: relative entropy of e^{b x} against the spin
// marginal, minus (beta/2) c^2, with c the tilted mean.
inline double tilted_functional(int dim, double beta, double b) {
  const double base = theta_integral(dim, [](double) { return 1.0; });
  // Shift by e^{-b} keeps the integrand bounded for large b.
  const double z = theta_integral(dim, [&](double x) { return std::exp(b * (x - 1.0)); });
  const double m = theta_integral(dim, [&](double x) { return x * std::exp(b * (x - 1.0)); });
  const double c = m / z;
  const double log_z = std::log(z / base) + b;
  return b * c - log_z - 0.5 * beta * c * c;
}

struct Minimum {
  double b;
  double value;
};

inline Minimum minimize_functional(int dim, double beta) {
  auto fn = [&](double b) { return tilted_functional(dim, beta, b); };
  std::uintmax_t iters = 500;
  auto [b, v] = boost::math::tools::brent_find_minima(fn, 0.0, 2.0 * beta, 52, iters);
  // The endpoint b = 0 is the minimizer in the disordered phase.
  const double at_zero = fn(0.0);
  if (at_zero <= v) return {0.0, at_zero};
  return {b, v};
}

// Bisection for the positive root of b = beta f(b), f from the libstdc++ quotient.
inline double fixed_point_bisection(int dim, double beta) {
  double lo = 1e-8, hi = beta;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid - beta * bessel_ratio_quotient(dim, mid) < 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Critical density, normalized by quadrature only.
struct CriticalQuadrature {
  int dim;
  double k;

  explicit CriticalQuadrature(int n) : dim(n), k(1.0 / (4.0 * n * n * (n + 2.0))) {}

  double unnormalized(double t) const {
    return t <= 0.0 ? 0.0 : std::pow(t, 0.5 * (dim - 2)) * std::exp(-k * t * t);
  }

  template <class H>
  double raw_moment(H h) const {
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate(
        [&](double t) {
          const double w = unnormalized(t);
          return w == 0.0 ? 0.0 : h(t) * w;
        },
        0.0,
                        std::numeric_limits<double>::infinity());
  }

  double z() const { return raw_moment([](double) { return 1.0; }); }

  template <class H>
  double expectation(H h) const {
    return raw_moment(h) / z();
  }
};

struct Ar1 {
  double rho;
  std::mt19937_64 engine;
  std::normal_distribution<double> normal{};

  std::vector<double> series(std::size_t n) {
    std::vector<double> out(n);
    double x = normal(engine) / std::sqrt(1.0 - rho * rho);
    for (auto& v : out) {
      x = rho * x + normal(engine);
      v = x;
    }
    return out;
  }
};

// Haar-ish random orthogonal matrix by Gram-Schmidt on Gaussian columns.
inline std::vector<std::vector<double>> random_rotation(int dim, std::mt19937_64& engine) {
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> q(dim, std::vector<double>(dim));
  for (int c = 0; c < dim; ++c) {
    for (auto& v : q[c]) v = normal(engine);
    for (int p = 0; p < c; ++p) {
      double dot = 0.0;
      for (int i = 0; i < dim; ++i) dot += q[c][i] * q[p][i];
      for (int i = 0; i < dim; ++i) q[c][i] -= dot * q[p][i];
    }
    double norm = 0.0;
    for (double v : q[c]) norm += v * v;
    norm = std::sqrt(norm);
    for (auto& v : q[c]) v /= norm;
  }
  return q;
}

inline std::vector<double> rotate(const std::vector<std::vector<double>>& q,
                                  const double* v, int dim) {
  std::vector<double> out(dim, 0.0);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) out[r] += q[c][r] * v[c];
  }
  return out;
}

// CDF of one coordinate of a uniform point on S^{N-1}.
inline double uniform_marginal_cdf(int dim, double t) {
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  switch (dim) {
    case 2: return 1.0 - std::acos(t) / std::numbers::pi;
    case 3: return 0.5 * (t + 1.0);
    case 4: return 0.5 + (t * std::sqrt(1.0 - t * t) + std::asin(t)) / std::numbers::pi;
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace oracle
