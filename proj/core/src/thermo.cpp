#include "onmf/thermo.hpp"

#include <cmath>
#include <stdexcept>

#include "onmf/specfun.hpp"

namespace onmf::thermo {

namespace {

using specfun::BesselOrder;

void require_dim(int dim) {
  if (dim < 2) throw std::domain_error("thermo: dimension must be >= 2");
}

// log S(r) with S = 0F1(; N/2; r^2/4).
double log_normalized_bessel(int dim, double r) {
  const double a = 0.5 * dim;
  if (r < 2.0) {
    // Sum the tail of the 0F1 series directly so log1p keeps full relative accuracy.
    const double q = 0.25 * r * r;
    double term = 1.0, tail = 0.0;
    for (int k = 0; k < 60; ++k) {
      term *= q / ((k + 1.0) * (a + k));
      tail += term;
      if (term < 1e-18 * tail) break;
    }
    return std::log1p(tail);
  }
  const auto nu = BesselOrder::for_dimension(dim);
  if (r <= specfun::kBesselOverflowGuard) {
    return std::log(specfun::detail::bessel_i_normalized(nu, r));
  }
  return std::lgamma(a) + (a - 1.0) * std::log(2.0 / r) + specfun::detail::log_bessel_i(nu, r);
}

}  // namespace

double phi(int dim, double beta, double r) {
  require_dim(dim);
  if (!(r >= 0.0)) throw std::domain_error("phi: r must be >= 0");
  if (r == 0.0) return 0.0;
  const double f = specfun::bessel_ratio(dim, r);
  return r * f - log_normalized_bessel(dim, r) - 0.5 * beta * f * f;
}

double phi_derivative(int dim, double beta, double r) {
  require_dim(dim);
  if (r == 0.0) return 0.0;
  return specfun::bessel_ratio_derivative(dim, r) * (r - beta * specfun::bessel_ratio(dim, r));
}

double phi_second_deriv(int dim, double beta, double r) {
  require_dim(dim);
  if (!(r >= 0.0)) throw std::domain_error("phi_second_deriv: r must be >= 0");
  const double n = dim;
  if (r < 1e-3) {
    // f = r/N - r^3/(N^2(N+2)) + ..., so Phi'' = (1/N)(1 - beta/N) + O(r^2).
    const double c3 = 1.0 / (n * n * (n + 2.0));
    const double f = r / n - c3 * r * r * r;
    const double fp = 1.0 / n - 3.0 * c3 * r * r;
    const double fpp = -6.0 * c3 * r;
    return fpp * (r - beta * f) + fp * (1.0 - beta * fp);
  }
  const double f = specfun::bessel_ratio(dim, r);
  const double fp = specfun::bessel_ratio_derivative(dim, r);
  const double fpp = -2.0 * f * fp - (n - 1.0) * (fp / r - f / (r * r));
  return fpp * (r - beta * f) + fp * (1.0 - beta * fp);
}

double solve_fixed_point(int dim, double beta) {
  require_dim(dim);
  if (!(beta >= 0.0)) throw std::domain_error("solve_fixed_point: beta must be >= 0");
  // The critical point itself is matched with the same 1e-12 tolerance that
  // classifies the regime, so a grid value like 60 * 0.05 stays at b = 0.
  if (regime_of(dim, beta) != Regime::supercritical) return 0.0;

  auto g = [&](double b) { return b - beta * specfun::bessel_ratio(dim, b); };
  double lo = 1e-8;
  double hi = beta;
  if (g(lo) >= 0.0) {
    // beta so close to N that the root sits below 1e-8.
    lo = 0.0;
  }
  // Small-b expansion b^2 ~ N(N+2)(1 - N/beta) is a good first guess.
  double b = std::sqrt(dim * (dim + 2.0) * (1.0 - dim / beta));
  if (!(b > lo && b < hi)) b = 0.5 * (lo + hi);

  for (int iter = 0; iter < 200; ++iter) {
    const double r = g(b);
    if (std::abs(r) <= 1e-13 * std::max(1.0, b)) return b;
    if (r < 0.0) lo = b; else hi = b;
    const double slope = 1.0 - beta * specfun::bessel_ratio_derivative(dim, b);
    double next = b - r / slope;
    if (!(next > lo && next < hi) || slope <= 0.0) next = 0.5 * (lo + hi);
    if (hi - lo <= 4e-16 * hi) return next;
    b = next;
  }
  throw std::runtime_error("solve_fixed_point: no convergence");
}

double free_energy(int dim, double beta) {
  const double b = solve_fixed_point(dim, beta);
  return b == 0.0 ? 0.0 : phi(dim, beta, b);
}

double rate_function(int dim, double beta, double r) {
  if (!(r >= 0.0)) throw std::domain_error("rate_function: r must be >= 0");
  return std::max(0.0, phi(dim, beta, r) - free_energy(dim, beta));
}

double TiltedDensity::weighted(double x) const {
  if (x <= -1.0 || x >= 1.0) return 0.0;
  return a * std::exp(b * x) * std::pow(1.0 - x * x, 0.5 * (dim - 3));
}

double TiltedDensity::mean() const { return specfun::bessel_ratio(dim, b); }

TiltedDensity tilted_density(int dim, double b) {
  require_dim(dim);
  if (!(b >= 0.0)) throw std::domain_error("tilted_density: b must be >= 0");
  // b^nu / I_nu(b) = 2^nu Gamma(nu+1) / S(b), with S(0) = 1.
  const double nu = 0.5 * dim - 1.0;
  const double log_a = nu * std::log(2.0) + std::lgamma(nu + 1.0) -
                       std::log(specfun::tilt_normalizer(dim)) - log_normalized_bessel(dim, b);
  return {dim, b, std::exp(log_a)};
}

double supercritical_bracket(int dim, double b) {
  require_dim(dim);
  const double f = specfun::bessel_ratio(dim, b);
  // I_{N/2+1} / I_{N/2-1} = f_N(b) f_{N+2}(b).
  const double upper = f * specfun::bessel_ratio(dim + 2, b);
  return 1.0 - (dim - 1.0) / dim * (1.0 - upper) - f * f;
}

double supercritical_variance(int dim, double beta) {
  require_dim(dim);
  if (regime_of(dim, beta) != Regime::supercritical) {
    throw std::domain_error("supercritical_variance: requires beta > N");
  }
  const double b = solve_fixed_point(dim, beta);
  const double fp = specfun::bessel_ratio_derivative(dim, b);
  return 4.0 * beta * beta * supercritical_bracket(dim, b) / ((1.0 - beta * fp) * b * b);
}

PhasePoint phase_point(int dim, double beta) {
  PhasePoint p;
  p.dim = dim;
  p.beta = beta;
  p.b = solve_fixed_point(dim, beta);
  p.magnetization = specfun::bessel_ratio(dim, p.b);
  p.free_energy = p.b == 0.0 ? 0.0 : phi(dim, beta, p.b);
  p.phi_second_deriv = phi_second_deriv(dim, beta, p.b);
  p.regime = regime_of(dim, beta);
  return p;
}

}  // namespace onmf::thermo
