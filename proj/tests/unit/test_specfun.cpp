#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "onmf/quadrature.hpp"
#include "onmf/specfun.hpp"

using namespace onmf::specfun;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(BesselI, SmallArgumentValues) {
  EXPECT_EQ(bessel_i(BesselOrder::integer(0), 0.0), 1.0);
  EXPECT_EQ(bessel_i(BesselOrder::integer(1), 0.0), 0.0);
  EXPECT_EQ(bessel_i(BesselOrder(1), 0.0), 0.0);
  // sqrt(2/pi) sinh(1), frozen from a 30-digit evaluation.
  EXPECT_LT(rel(bessel_i(BesselOrder(1), 1.0), 0.9376748882454876), 1e-15);
}

TEST(BesselI, RejectsOutOfRange) {
  EXPECT_THROW(bessel_i(BesselOrder(0), -1e-300), std::domain_error);
  EXPECT_THROW(bessel_i(BesselOrder(0), 700.5), std::domain_error);
  EXPECT_THROW(bessel_i(BesselOrder(0), std::nan("")), std::domain_error);
  EXPECT_THROW(BesselOrder(-1), std::domain_error);
  EXPECT_NO_THROW(bessel_i(BesselOrder(0), 700.0));
}

TEST(BesselI, MatchesLongDoubleSeries) {
  for (int twice = 0; twice <= 20; ++twice) {
    for (double x : {1e-8, 1e-3, 0.1, 0.5, 1.0, 2.5, 7.3, 15.0, 33.3, 50.0, 120.0, 400.0}) {
      const double ref = static_cast<double>(oracle::bessel_i_series(0.5L * twice, x));
      EXPECT_LT(rel(bessel_i(BesselOrder(twice), x), ref), 1e-12) << "2nu=" << twice << " x=" << x;
    }
  }
}

TEST(BesselI, MatchesLibstdcxx) {
  for (int twice = 0; twice <= 12; ++twice) {
    for (double x = 0.05; x < 60.0; x *= 1.37) {
      EXPECT_LT(rel(bessel_i(BesselOrder(twice), x), std::cyl_bessel_i(0.5 * twice, x)), 1e-12);
    }
  }
}

TEST(BesselI, ThreeTermRecurrence) {
  std::mt19937_64 engine(11);
  std::uniform_real_distribution<double> xs(0.01, 50.0);
  std::uniform_int_distribution<int> orders(2, 20);
  for (int i = 0; i < 1000; ++i) {
    const double x = xs(engine);
    const int twice = orders(engine);
    const double nu = 0.5 * twice;
    const double lower = bessel_i(BesselOrder(twice - 2), x);
    const double mid = bessel_i(BesselOrder(twice), x);
    const double upper = bessel_i(BesselOrder(twice + 2), x);
    EXPECT_LT(std::abs(upper - (lower - 2.0 * nu / x * mid)), 1e-10 * lower);
  }
}

TEST(BesselI, HalfIntegerClosedFormAboveThreshold) {
  for (int n = 0; n <= 4; ++n) {
    const double start = detail::half_integer_closed_form_threshold(n);
    for (double x = start; x < 60.0; x *= 1.11) {
      const double ref = static_cast<double>(oracle::bessel_i_series(n + 0.5L, x));
      EXPECT_LT(rel(detail::bessel_i_half_closed(n, x), ref), 2e-15) << "n=" << n << " x=" << x;
    }
  }
  EXPECT_THROW(detail::half_integer_closed_form_threshold(5), std::out_of_range);
}

TEST(BesselI, ClosedFormDegradesBelowThreshold) {
  // Cancellation makes the closed form poor at small x; the series takes over there.
  const double x = 0.05;
  const double ref = static_cast<double>(oracle::bessel_i_series(4.5L, x));
  EXPECT_GT(rel(detail::bessel_i_half_closed(4, x), ref), 1e-6);
  EXPECT_LT(rel(bessel_i(BesselOrder(9), x), ref), 1e-13);
}

TEST(BesselI, LogFormContinuesPastOverflowGuard) {
  for (int twice : {0, 1, 2, 3, 4, 6}) {
    for (double x : {650.0, 700.0, 700.0001, 900.0, 5000.0}) {
      const long double ref = std::log(oracle::bessel_i_series(0.5L * twice, x));
      EXPECT_LT(std::abs(detail::log_bessel_i(BesselOrder(twice), x) - static_cast<double>(ref)),
                1e-12 * static_cast<double>(ref))
          << twice << " " << x;
    }
  }
  EXPECT_EQ(detail::log_bessel_i(BesselOrder(0), 0.0), 0.0);
  EXPECT_TRUE(std::isinf(detail::log_bessel_i(BesselOrder(2), 0.0)));
}

TEST(BesselI, NormalizedSeriesIsHypergeometric) {
  EXPECT_EQ(detail::bessel_i_normalized(BesselOrder(2), 0.0), 1.0);
  const double x = 3.0;
  const double direct = bessel_i(BesselOrder(2), x) / (x / 2.0);
  EXPECT_LT(rel(detail::bessel_i_normalized(BesselOrder(2), x), direct), 1e-14);
}

TEST(BesselRatio, FrozenValue) {
  // I_1(1)/I_0(1) from independent 30-digit series.
  EXPECT_LT(rel(bessel_ratio(2, 1.0), 0.4463899658965345), 1e-14);
  EXPECT_EQ(bessel_ratio(2, 0.0), 0.0);
}

TEST(BesselRatio, AgreesWithQuotient) {
  std::mt19937_64 engine(5);
  std::uniform_real_distribution<double> ks(0.0, 50.0);
  std::uniform_int_distribution<int> dims(2, 20);
  for (int i = 0; i < 1000; ++i) {
    const int dim = dims(engine);
    const double kappa = ks(engine) + 1e-6;
    EXPECT_LT(rel(bessel_ratio(dim, kappa), oracle::bessel_ratio_quotient(dim, kappa)), 1e-12)
        << dim << " " << kappa;
  }
}

TEST(BesselRatio, InUnitIntervalAndIncreasing) {
  for (int dim = 2; dim <= 8; ++dim) {
    double prev = 0.0;
    for (double k = 1e-6; k < 1e5; k *= 1.2) {
      const double f = bessel_ratio(dim, k);
      EXPECT_GT(f, prev);
      EXPECT_LT(f, 1.0);
      prev = f;
    }
  }
}

TEST(BesselRatio, LargeKappaAsymptotics) {
  for (int dim : {2, 3, 4}) {
    const double k = 1e6;
    EXPECT_NEAR(bessel_ratio(dim, k), 1.0 - (dim - 1) / (2.0 * k), 1e-11);
  }
  EXPECT_EQ(bessel_ratio(3, std::numeric_limits<double>::infinity()), 1.0);
}

TEST(BesselRatio, CubicExpansionNearZero) {
  for (int dim : {2, 3, 4, 5}) {
    const double k = 0.01;
    const double n = dim;
    const double cubic = k / n - k * k * k / (n * n * (n + 2.0));
    EXPECT_LT(std::abs(bessel_ratio(dim, k) - cubic), 1e-9);
  }
  EXPECT_NEAR(bessel_ratio(3, 1e-9) * 3.0 / 1e-9, 1.0, 1e-12);
}

TEST(BesselRatio, RejectsBadInput) {
  EXPECT_THROW(bessel_ratio(1, 1.0), std::domain_error);
  EXPECT_THROW(bessel_ratio(3, -0.5), std::domain_error);
}

TEST(BesselRatioDerivative, MatchesCentralDifferences) {
  for (int dim : {2, 3, 4, 7}) {
    for (double k : {1e-4, 0.01, 0.3, 1.0, 2.17, 5.0, 20.0, 100.0}) {
      const double h = 1e-4 * std::max(k, 1e-2);
      const double fd = (bessel_ratio(dim, k + h) - bessel_ratio(dim, k - h)) / (2.0 * h);
      EXPECT_NEAR(bessel_ratio_derivative(dim, k), fd, 1e-8) << dim << " " << k;
    }
    EXPECT_EQ(bessel_ratio_derivative(dim, 0.0), 1.0 / dim);
  }
}

TEST(BesselRatioDerivative, SmoothAcrossSeriesSwitch) {
  for (int dim : {2, 3, 4}) {
    const double below = bessel_ratio_derivative(dim, 0.999999e-5);
    const double above = bessel_ratio_derivative(dim, 1.000001e-5);
    EXPECT_NEAR(below, above, 1e-13);
  }
}

TEST(SphereConstants, Areas) {
  EXPECT_DOUBLE_EQ(sphere_area(1), 2.0);
  EXPECT_DOUBLE_EQ(sphere_area(2), 2.0 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(sphere_area(3), 4.0 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(sphere_area(4), 2.0 * std::numbers::pi * std::numbers::pi);
  EXPECT_THROW(sphere_area(0), std::domain_error);
}

TEST(SphereConstants, BConstant) {
  EXPECT_EQ(b_constant(2), 1.0);
  EXPECT_EQ(b_constant(3), 1.0);
  EXPECT_EQ(b_constant(4), 1.0);
  EXPECT_EQ(b_constant(5), 2.0);
  EXPECT_EQ(b_constant(6), 3.0);
  EXPECT_EQ(b_constant(7), 8.0);
  EXPECT_EQ(b_constant(8), 15.0);
}

TEST(SphereConstants, TiltNormalizerMatchesQuadrature) {
  for (int dim = 2; dim <= 7; ++dim) {
    for (double b : {0.3, 1.0, 4.0}) {
      const double integral = oracle::theta_integral(dim, [&](double x) { return std::exp(b * x); });
      const double expected = integral * std::pow(b, 0.5 * dim - 1.0) /
                              std::cyl_bessel_i(0.5 * dim - 1.0, b);
      EXPECT_LT(rel(tilt_normalizer(dim), expected), 1e-12) << dim << " " << b;
    }
    const double factor = dim % 2 == 0 ? std::numbers::pi : std::sqrt(2.0 * std::numbers::pi);
    EXPECT_LT(rel(tilt_normalizer(dim), b_constant(dim) * factor), 1e-14);
  }
}

TEST(Quadrature, SphereWeightIntegral) {
  // int (1-x^2)^{(N-3)/2} dx = A_N / A_{N-1}
  for (int dim = 2; dim <= 6; ++dim) {
    const double v = onmf::quad::sphere_weight_integral(dim, [](double) { return 1.0; });
    EXPECT_LT(rel(v, sphere_area(dim) / sphere_area(dim - 1)), 1e-12);
  }
}

TEST(Quadrature, BreakpointsAndTail) {
  const double bp[] = {0.3};
  const double v = onmf::quad::integrate([](double x) { return x < 0.3 ? 1.0 : 2.0; }, 0.0, 1.0,
                                         1e-13, bp);
  EXPECT_NEAR(v, 0.3 + 1.4, 1e-13);
  const double tail = onmf::quad::integrate_to_infinity([](double x) { return std::exp(-x); }, 1.0);
  EXPECT_NEAR(tail, std::exp(-1.0), 1e-14);
}
