#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "onmf/specfun.hpp"
#include "onmf/thermo.hpp"

using namespace onmf;
using namespace onmf::thermo;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Frozen {
  int dim;
  double beta;
  double b;
  double fprime;
  double variance;
};

// 30-digit reference values.
constexpr Frozen kFrozen[] = {
    {2, 3.0, 2.172476152879058, 0.1422608183524228, 1.893033470824171},
    {3, 5.0, 3.629409935955998, 0.07309534067135517, 0.8745206621786702},
    {4, 6.0, 3.906186964663405, 0.07615842769704713, 1.323533820682462},
};

}  // namespace

TEST(Phi, VanishesAtOrigin) {
  for (int dim = 2; dim <= 6; ++dim) {
    EXPECT_EQ(phi(dim, 1.3, 0.0), 0.0);
    const double r = 1e-6;
    const double quad = 0.5 * r * r * (1.0 / dim) * (1.0 - 1.3 / dim);
    EXPECT_NEAR(phi(dim, 1.3, r), quad, 1e-20);
  }
  EXPECT_THROW(phi(2, 1.0, -1e-9), std::domain_error);
}

TEST(Phi, FrozenValuesAtUnitTilt) {
  const double expected[] = {0.1108436065628012, 0.1026003789443117, 0.08884801830768525,
                             0.07699517978282344, 0.06748761784195274};
  for (int dim = 2; dim <= 6; ++dim) {
    EXPECT_LT(rel(phi(dim, 1.0, 1.0), expected[dim - 2]), 1e-13) << dim;
  }
}

TEST(Phi, MatchesTiltedFunctionalQuadrature) {
  for (int dim = 2; dim <= 6; ++dim) {
    for (double beta : {0.5, 2.0, 7.0}) {
      for (double r : {1e-3, 0.2, 1.0, 3.0, 10.0, 40.0}) {
        EXPECT_NEAR(phi(dim, beta, r), oracle::tilted_functional(dim, beta, r), 1e-10)
            << dim << " " << beta << " " << r;
      }
    }
  }
}

TEST(Phi, SmallArgumentBranchIsContinuous) {
  for (int dim : {2, 3, 5}) {
    for (double edge : {1e-4, 2.0}) {
      const double h = 1e-9 * edge;
      const double below = phi(dim, 0.7, edge - h);
      const double above = phi(dim, 0.7, edge + h);
      const double slope = phi_derivative(dim, 0.7, edge);
      EXPECT_LT(std::abs(above - below - 2.0 * h * slope), 1e-14) << edge;
    }
  }
}

TEST(Phi, LargeArgumentUsesLogForm) {
  EXPECT_TRUE(std::isfinite(phi(3, 5.0, 900.0)));
  EXPECT_NEAR(phi(3, 5.0, 700.0 - 1e-9), phi(3, 5.0, 700.0 + 1e-9), 1e-6);
}

TEST(Phi, DerivativesMatchCentralDifferences) {
  for (int dim : {2, 3, 4}) {
    for (double beta : {1.0, dim + 1.0, 3.0 * dim}) {
      for (double r : {5e-4, 0.05, 0.7, 2.0, 6.0}) {
        const double h = 1e-5;
        const double d1 = (phi(dim, beta, r + h) - phi(dim, beta, r - h)) / (2 * h);
        EXPECT_NEAR(phi_derivative(dim, beta, r), d1, 1e-8);
        const double d2 =
            (phi_derivative(dim, beta, r + h) - phi_derivative(dim, beta, r - h)) / (2 * h);
        EXPECT_NEAR(phi_second_deriv(dim, beta, r), d2, 1e-7);
      }
    }
    EXPECT_DOUBLE_EQ(phi_second_deriv(dim, 1.5, 0.0), (1.0 / dim) * (1.0 - 1.5 / dim));
  }
}

TEST(FixedPoint, DisorderedPhaseIsZero) {
  EXPECT_EQ(solve_fixed_point(3, 2.0), 0.0);
  EXPECT_EQ(solve_fixed_point(3, 3.0), 0.0);
  EXPECT_EQ(solve_fixed_point(2, 0.0), 0.0);
  EXPECT_THROW(solve_fixed_point(2, -1.0), std::domain_error);
}

TEST(FixedPoint, FrozenRootsAndBisection) {
  for (const auto& f : kFrozen) {
    const double b = solve_fixed_point(f.dim, f.beta);
    EXPECT_LT(rel(b, f.b), 1e-13);
    EXPECT_LT(std::abs(b - f.beta * specfun::bessel_ratio(f.dim, b)), 1e-12);
    EXPECT_LT(rel(b, oracle::fixed_point_bisection(f.dim, f.beta)), 1e-12);
  }
  EXPECT_LT(rel(solve_fixed_point(2, 2.05), 0.4490808382646087), 1e-12);
  EXPECT_LT(rel(solve_fixed_point(3, 4.0), 2.399357280515468), 1e-13);
}

TEST(FixedPoint, StationaryPointOfPhi) {
  for (const auto& f : kFrozen) {
    const double b = solve_fixed_point(f.dim, f.beta);
    const double h = 1e-5;
    EXPECT_LT(std::abs(phi(f.dim, f.beta, b + h) - phi(f.dim, f.beta, b - h)) / (2 * h), 1e-8);
  }
}

TEST(FixedPoint, VanishesContinuouslyAtCriticality) {
  for (int dim : {2, 3, 4}) {
    const double b1 = solve_fixed_point(dim, dim + 1.0);
    const double b01 = solve_fixed_point(dim, dim + 0.1);
    const double b001 = solve_fixed_point(dim, dim + 0.01);
    EXPECT_GT(b1, b01);
    EXPECT_GT(b01, b001);
    EXPECT_GT(b001, 0.0);
    EXPECT_LT(b001, 0.3);
    // b^2 ~ N (N+2) (1 - N/beta) near criticality.
    EXPECT_NEAR(b001 * b001 / (dim * (dim + 2.0) * (1.0 - dim / (dim + 0.01))), 1.0, 0.02);
  }
}

TEST(FreeEnergy, Values) {
  EXPECT_EQ(free_energy(4, 3.0), 0.0);
  EXPECT_EQ(free_energy(2, 2.0), 0.0);
  EXPECT_LT(rel(free_energy(2, 3.0), -0.1600640015646778), 1e-12);
  EXPECT_LT(rel(free_energy(3, 5.0), -0.3292268379251001), 1e-12);
}

TEST(FreeEnergy, MatchesVariationalMinimum) {
  for (int dim : {2, 3, 4}) {
    for (double beta : {0.5 * dim, 1.0 * dim, 1.3 * dim, 2.0 * dim}) {
      const auto m = oracle::minimize_functional(dim, beta);
      EXPECT_NEAR(free_energy(dim, beta), m.value, 1e-6) << dim << " " << beta;
    }
  }
}

TEST(FreeEnergy, ContinuousWithContinuousDerivative) {
  for (int dim : {2, 3, 4}) {
    double prev = free_energy(dim, 0.0);
    for (double beta = 0.01; beta <= 2.0 * dim; beta += 0.01) {
      const double v = free_energy(dim, beta);
      EXPECT_LT(std::abs(v - prev), 0.02);
      EXPECT_LE(v, 0.0);
      prev = v;
    }
    const double h = 1e-3;
    const double left = (free_energy(dim, dim) - free_energy(dim, dim - h)) / h;
    const double right = (free_energy(dim, dim + h) - free_energy(dim, dim)) / h;
    EXPECT_NEAR(left, right, 1e-3);
  }
}

TEST(RateFunction, ZeroAtMinimizerNonnegativeElsewhere) {
  EXPECT_EQ(rate_function(2, 1.0, 0.0), 0.0);
  const double b = solve_fixed_point(2, 3.0);
  EXPECT_NEAR(rate_function(2, 3.0, b), 0.0, 1e-15);
  for (int dim : {2, 3}) {
    for (double beta : {1.0, 4.0}) {
      for (double r = 0.0; r < 20.0; r += 0.1) EXPECT_GE(rate_function(dim, beta, r), 0.0);
    }
  }
  EXPECT_THROW(rate_function(2, 1.0, -0.1), std::domain_error);
}

TEST(RateFunction, QuadraticCoefficientNearOrigin) {
  const int dim = 2;
  const double beta = 1.0;
  // Least-squares fit of I(eps) = a eps^2 + q eps^3 on small eps.
  double s44 = 0, s45 = 0, s55 = 0, sy4 = 0, sy5 = 0;
  for (double e = 0.002; e <= 0.1; e += 0.002) {
    const double y = rate_function(dim, beta, e);
    const double x4 = e * e, x5 = e * e * e;
    s44 += x4 * x4; s45 += x4 * x5; s55 += x5 * x5; sy4 += y * x4; sy5 += y * x5;
  }
  const double a = (sy4 * s55 - sy5 * s45) / (s44 * s55 - s45 * s45);
  EXPECT_NEAR(a / ((1.0 - beta / dim) / (2.0 * dim)), 1.0, 0.1);
}

TEST(PhiShape, SingleWellInOrderedPhase) {
  for (const auto& f : kFrozen) {
    const double b = solve_fixed_point(f.dim, f.beta);
    for (double r = 0.01; r < b - 0.01; r += 0.01) EXPECT_LT(phi_derivative(f.dim, f.beta, r), 0.0);
    for (double r = b + 0.01; r < 4.0 * b; r += 0.01) EXPECT_GT(phi_derivative(f.dim, f.beta, r), 0.0);
    const double h = 1e-4;
    const double d2 = (phi(f.dim, f.beta, b + h) - 2.0 * phi(f.dim, f.beta, b) +
                       phi(f.dim, f.beta, b - h)) / (h * h);
    EXPECT_GT(d2, 0.0);
    EXPECT_NEAR(phi_second_deriv(f.dim, f.beta, b), d2, 1e-5);
  }
}

TEST(TiltedDensity, NormalizationAndMean) {
  for (int dim = 2; dim <= 5; ++dim) {
    for (double b : {0.0, 1e-5, 0.5, 1.0, 2.0, 8.0}) {
      const auto t = tilted_density(dim, b);
      EXPECT_GT(t.a, 0.0);
      const double mass = oracle::theta_integral(dim, [&](double x) { return t.a * std::exp(b * x); });
      const double mean =
          oracle::theta_integral(dim, [&](double x) { return x * t.a * std::exp(b * x); });
      EXPECT_NEAR(mass, 1.0, 1e-10) << dim << " " << b;
      EXPECT_NEAR(mean, specfun::bessel_ratio(dim, b), 1e-10);
      EXPECT_DOUBLE_EQ(t.mean(), specfun::bessel_ratio(dim, b));
    }
  }
  EXPECT_LT(rel(tilted_density(2, 1.0).mean(), 0.4463899658965345), 1e-14);
  // Untilted: a normalizes the bare weight, a = A_{N-1}/A_N.
  for (int dim = 2; dim <= 5; ++dim) {
    EXPECT_LT(rel(tilted_density(dim, 0.0).a, specfun::sphere_area(dim - 1) / specfun::sphere_area(dim)),
              1e-14);
  }
  const auto t = tilted_density(3, 2.0);
  EXPECT_NEAR(t.weighted(0.3), t.a * std::exp(0.6), 1e-15);
  EXPECT_THROW(tilted_density(3, -1.0), std::domain_error);
}

TEST(SupercriticalVariance, FrozenValues) {
  for (const auto& f : kFrozen) {
    const double b = solve_fixed_point(f.dim, f.beta);
    EXPECT_LT(rel(specfun::bessel_ratio_derivative(f.dim, b), f.fprime), 1e-12);
    EXPECT_LT(f.beta * f.fprime, 1.0);
    EXPECT_LT(rel(supercritical_variance(f.dim, f.beta), f.variance), 1e-12);
  }
}

TEST(SupercriticalVariance, BracketIsPositiveDerivative) {
  for (const auto& f : kFrozen) {
    const double b = solve_fixed_point(f.dim, f.beta);
    const double bracket = supercritical_bracket(f.dim, b);
    EXPECT_GT(bracket, 0.0);
    EXPECT_LT(rel(bracket, specfun::bessel_ratio_derivative(f.dim, b)), 1e-12);
    // Same bracket from raw Bessel values.
    const double i_lo = std::cyl_bessel_i(0.5 * f.dim - 1.0, b);
    const double i_mid = std::cyl_bessel_i(0.5 * f.dim, b);
    const double i_hi = std::cyl_bessel_i(0.5 * f.dim + 1.0, b);
    const double direct = 1.0 - ((f.dim - 1.0) / f.dim) * (i_lo - i_hi) / i_lo -
                          (i_mid / i_lo) * (i_mid / i_lo);
    EXPECT_LT(rel(bracket, direct), 1e-12);
  }
}

TEST(SupercriticalVariance, RequiresOrderedPhase) {
  EXPECT_THROW(supercritical_variance(3, 3.0), std::domain_error);
  EXPECT_THROW(supercritical_variance(3, 2.0), std::domain_error);
  EXPECT_GT(supercritical_variance(3, 3.01), 0.0);
}

TEST(PhasePoint, Invariants) {
  for (int dim : {2, 3, 4}) {
    for (double beta = 0.0; beta <= 2.0 * dim; beta += 0.25) {
      const auto p = phase_point(dim, beta);
      EXPECT_EQ(p.regime, regime_of(dim, beta));
      EXPECT_EQ(p.regime == Regime::subcritical || p.regime == Regime::critical, p.b == 0.0);
      EXPECT_DOUBLE_EQ(p.magnetization, specfun::bessel_ratio(dim, p.b));
      if (beta >= dim) {
        EXPECT_NEAR(p.b, beta * p.magnetization, 1e-12);
      }
      EXPECT_DOUBLE_EQ(p.free_energy, free_energy(dim, beta));
    }
  }
}
