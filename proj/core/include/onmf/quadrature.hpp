#pragma once

// Adaptive quadrature helpers on top of Boost.Math, with the sphere weight
// (1-x^2)^{(N-3)/2} handled through x = cos(theta).

#include <functional>
#include <span>
#include <stdexcept>

namespace onmf::quad {

class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod on [a, b]. Interior breakpoints (e.g. jumps of an
/// indicator) split the interval so each piece is smooth.
double integrate(const Integrand& f, double a, double b, double rel_tol = 1e-13,
                 std::span<const double> breakpoints = {});

/// Integral over [a, inf) by exp-sinh quadrature, splitting at breakpoints.
double integrate_to_infinity(const Integrand& f, double a, double rel_tol = 1e-13,
                             std::span<const double> breakpoints = {});

/// int_{-1}^{1} g(x) (1-x^2)^{(N-3)/2} dx, evaluated as
/// int_0^pi g(cos t) sin(t)^{N-2} dt so N = 2 carries no endpoint singularity.
double sphere_weight_integral(int dim, const Integrand& g, double rel_tol = 1e-13);

}  // namespace onmf::quad
