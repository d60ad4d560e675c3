#include "onmf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace onmf::quad {

namespace {

constexpr unsigned kMaxDepth = 18;

double kronrod(const Integrand& f, double a, double b, double rel_tol) {
  using rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  double error = 0.0;
  double l1 = 0.0;
  // Boost's estimate carries an absolute floor near eps * |f|, independent of
  // the width, so short pieces need a floor of their own or the adaptive path
  // keeps splitting into roundoff.
  const auto floor = [&] { return 1e3 * std::numeric_limits<double>::epsilon() * l1 / (b - a); };
  double value = rule::integrate(f, a, b, 0, rel_tol, &error, &l1);
  if (!(error <= std::max(rel_tol * l1, floor()))) {
    value = rule::integrate(f, a, b, kMaxDepth, rel_tol, &error, &l1);
  }
  if (!std::isfinite(value)) {
    throw NumericalError("integrate: non-finite result on [" + std::to_string(a) + ", " +
                         std::to_string(b) + "]");
  }
  // Accept the error estimate relative to the L1 norm; a signed integral can
  // be tiny through cancellation while still being accurate in absolute terms.
  if (error > std::max({1e3 * rel_tol * l1, 1e-10 * l1, floor()}) && error > 1e-14) {
    throw NumericalError("integrate: error estimate " + std::to_string(error) +
                         " too large on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  return value;
}

std::vector<double> cut_points(double a, double b, std::span<const double> breakpoints) {
  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) {
      cuts.push_back(x);
    }
  }
  std::sort(cuts.begin() + 1, cuts.end());
  cuts.push_back(b);
  return cuts;
}

}  // namespace

double integrate(const Integrand& f, double a, double b, double rel_tol,
                 std::span<const double> breakpoints) {
  if (a == b) {
    return 0.0;
  }
  if (a > b) {
    return -integrate(f, b, a, rel_tol, breakpoints);
  }
  const auto cuts = cut_points(a, b, breakpoints);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += kronrod(f, cuts[i], cuts[i + 1], rel_tol);
  }
  return total;
}

double integrate_to_infinity(const Integrand& f, double a, double rel_tol,
                             std::span<const double> breakpoints) {
  double finite_end = a;
  for (double x : breakpoints) {
    finite_end = std::max(finite_end, x);
  }
  double total = finite_end > a ? integrate(f, a, finite_end, rel_tol, breakpoints) : 0.0;
  boost::math::quadrature::exp_sinh<double> tail;
  double error = 0.0;
  double l1 = 0.0;
  const double value = tail.integrate(
      [&](double t) { return f(finite_end + t); }, rel_tol, &error, &l1);
  if (!std::isfinite(value)) {
    throw NumericalError("integrate_to_infinity: non-finite tail");
  }
  return total + value;
}

double sphere_weight_integral(int dim, const Integrand& g, double rel_tol) {
  if (dim < 2) {
    throw std::domain_error("sphere_weight_integral: dimension must be >= 2");
  }
  const int power = dim - 2;
  return integrate(
      [&](double t) {
        const double s = std::sin(t);
        return g(std::cos(t)) * (power == 0 ? 1.0 : std::pow(s, power));
      },
      0.0, std::numbers::pi, rel_tol);
}

}  // namespace onmf::quad
