#pragma once

// Modified Bessel functions of the first kind for integer and half-integer
// orders, the ratio f(k) = I_{N/2}(k) / I_{N/2-1}(k), and the sphere
// constants that appear in the O(N) thermodynamics.

#include <stdexcept>

namespace onmf::specfun {

/// Bessel order nu = twice_order / 2, so half-integer orders are exact.
class BesselOrder {
public:
  explicit BesselOrder(int twice_order) : twice_(twice_order) {
    if (twice_order < 0) {
      throw std::domain_error("BesselOrder: twice_order must be >= 0");
    }
  }

  static BesselOrder integer(int n) { return BesselOrder(2 * n); }
  /// Order N/2 - 1 + shift for spin dimension N.
  static BesselOrder for_dimension(int dim, int shift = 0) {
    return BesselOrder(dim - 2 + 2 * shift);
  }

  int twice() const { return twice_; }
  double value() const { return 0.5 * twice_; }
  bool is_half_integer() const { return (twice_ & 1) != 0; }

  friend bool operator==(BesselOrder, BesselOrder) = default;

private:
  int twice_;
};

/// Largest argument accepted by bessel_i before exp(x) overflows.
inline constexpr double kBesselOverflowGuard = 700.0;

/// I_nu(x) for 0 <= x <= kBesselOverflowGuard. Relative error below 1e-12.
/// Throws std::domain_error outside that range.
double bessel_i(BesselOrder nu, double x);

/// f(kappa) = I_{N/2}(kappa) / I_{N/2-1}(kappa) for N >= 2, kappa >= 0.
///
/// Evaluated by backward recurrence on the ratio continued fraction
/// r_nu = x / (2 nu + x r_{nu+1}), which never forms I itself and so stays
/// finite for any kappa. f(0) = 0 and f is strictly increasing into [0, 1).
double bessel_ratio(int dim, double kappa);

/// f'(kappa) = 1 - f (f + (N-1)/kappa), with the limit 1/N at kappa = 0.
double bessel_ratio_derivative(int dim, double kappa);

/// Surface area of the unit sphere S^{N-1}: A_N = 2 pi^{N/2} / Gamma(N/2).
double sphere_area(int dim);

/// B_N: prod_{k=0}^{N/2-1} |2k-1| for even N, 2^{(N-3)/2} ((N-3)/2)! for odd N.
double b_constant(int dim);

/// C_N with  int_{-1}^{1} e^{b x} (1-x^2)^{(N-3)/2} dx = C_N I_{N/2-1}(b) / b^{N/2-1}.
/// C_N = sqrt(pi) Gamma((N-1)/2) 2^{N/2-1}; equals B_N pi for even N and
/// B_N sqrt(2 pi) for odd N.
double tilt_normalizer(int dim);

namespace detail {

/// Power series for I_nu(x); positive terms only, so stable for all x in range.
double bessel_i_series(BesselOrder nu, double x);

/// Closed hyperbolic form for nu = n + 1/2. Loses accuracy for small x.
double bessel_i_half_closed(int n, double x);

/// Argument above which the closed half-integer form replaces the series.
/// Chosen by cross-validation against the series (see test_specfun).
double half_integer_closed_form_threshold(int n);

/// log I_nu(x) for any x >= 0; uses the large-x asymptotic expansion beyond
/// the overflow guard.
double log_bessel_i(BesselOrder nu, double x);

/// I_nu(x) / ((x/2)^nu / Gamma(nu+1)) = 0F1(; nu+1; x^2/4). Equals 1 at x = 0.
double bessel_i_normalized(BesselOrder nu, double x);

}  // namespace detail

}  // namespace onmf::specfun
