#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "leakage/quadrature.hpp"

namespace q = leakage::quadrature;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(Quadrature, PolynomialIsExact) {
  auto r = q::integrate_finite([](double x) { return 3 * x * x; }, 0.0, 2.0);
  EXPECT_NEAR(r.value, 8.0, 1e-14);
  EXPECT_TRUE(r.converged);
}

TEST(Quadrature, ReversedLimitsFlipSign) {
  EXPECT_NEAR(q::integrate_finite([](double x) { return x; }, 1.0, 0.0).value, -0.5, 1e-15);
}

TEST(Quadrature, GaussianOverRealLine) {
  auto r = q::integrate([](double x) { return std::exp(-0.5 * x * x); }, -kInf, kInf);
  EXPECT_NEAR(r.value, std::sqrt(2.0 * std::numbers::pi), 1e-10);
}

TEST(Quadrature, HeavyTailSemiInfinite) {
  // int_1^inf x^-2 dx = 1
  auto r = q::integrate([](double x) { return 1.0 / (x * x); }, 1.0, kInf);
  EXPECT_NEAR(r.value, 1.0, 1e-10);
  auto c = q::integrate([](double x) { return 1.0 / (std::numbers::pi * (1 + x * x)); }, -kInf, kInf);
  EXPECT_NEAR(c.value, 1.0, 1e-9);
}

TEST(Quadrature, KinkResolvedByBreakpoint) {
  auto r = q::integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, {0.3});
  EXPECT_NEAR(r.value, 0.5 * (0.09 + 0.49), 1e-14);
}

TEST(Quadrature, NarrowPeakFarFromOriginWithScale) {
  const double mu = 1e4, s = 1e-3;
  auto f = [&](double x) { return std::exp(-0.5 * ((x - mu) / s) * ((x - mu) / s)) / (s * std::sqrt(2 * std::numbers::pi)); };
  auto r = q::integrate(f, -kInf, kInf, {mu}, s);
  EXPECT_NEAR(r.value, 1.0, 1e-9);
}
