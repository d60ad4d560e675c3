#pragma once

// Thermodynamics of the mean-field O(N) model through the one-dimensional
// tilted family h(x) = a e^{bx} on the marginal of a spin along one axis.
//
//   Phi_beta(r) = r f(r) - log S(r) - (beta/2) f(r)^2,
//   S(r) = Gamma(N/2) (2/r)^{N/2-1} I_{N/2-1}(r)  (so S(0) = 1, Phi(0) = 0),
//
// the free energy is inf_r Phi_beta(r), attained at r = 0 for beta <= N and
// at the positive root of b = beta f(b) for beta > N.

#include "onmf/model.hpp"

namespace onmf::thermo {

/// Phi_beta(r) for r >= 0 (Phi(0) = 0). Throws std::domain_error on r < 0.
double phi(int dim, double beta, double r);

/// Phi_beta'(r) = f'(r) (r - beta f(r)).
double phi_derivative(int dim, double beta, double r);

/// Phi_beta''(r), analytic; equals (1/N)(1 - beta/N) at r = 0.
double phi_second_deriv(int dim, double beta, double r);

/// 0 for beta <= N, otherwise the positive root of b - beta f(b) with
/// |residual| <= 1e-13 (bracketed Newton on [1e-8, beta]).
double solve_fixed_point(int dim, double beta);

/// 0 for beta <= N, Phi_beta(b) otherwise.
double free_energy(int dim, double beta);

/// I_beta(r) = Phi_beta(r) - inf Phi_beta as a function of the tilt r >= 0;
/// clamped at 0 against rounding.
double rate_function(int dim, double beta, double r);

struct TiltedDensity {
  int dim = 2;
  double b = 0.0;
  double a = 0.0;

  /// a e^{bx} (1-x^2)^{(N-3)/2} on (-1, 1).
  double weighted(double x) const;
  /// Mean of x under the weighted density, f(b).
  double mean() const;
};

/// a = b^{N/2-1} / (C_N I_{N/2-1}(b)), continuous at b = 0.
TiltedDensity tilted_density(int dim, double b);

/// 1 - ((N-1)/N)(I_{N/2-1}(b) - I_{N/2+1}(b))/I_{N/2-1}(b) - f(b)^2, which
/// equals f'(b) by the Bessel recurrences.
double supercritical_bracket(int dim, double b);

/// Limit variance of sqrt(n)[(beta/(n b))^2 |S|^2 - 1] for beta > N:
/// 4 beta^2 f'(b) / ((1 - beta f'(b)) b^2).
double supercritical_variance(int dim, double beta);

struct PhasePoint {
  int dim = 2;
  double beta = 0.0;
  double b = 0.0;
  double magnetization = 0.0;
  double free_energy = 0.0;
  double phi_second_deriv = 0.0;
  Regime regime = Regime::subcritical;
};

PhasePoint phase_point(int dim, double beta);

}  // namespace onmf::thermo
