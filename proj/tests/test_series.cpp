#include "tvi/series.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tvi/dual.hpp"

namespace {

using tvi::Dual;
using tvi::Series;

TEST(Series, GeometricDivision) {
  // (1+t)/(1-t) = 1 + 2t + 2t^2 + 2t^3 + ...
  auto t = Series<double>::variable(3, 0.0);
  auto f = (1.0 + t) / (1.0 - t);
  EXPECT_DOUBLE_EQ(f[0], 1.0);
  EXPECT_DOUBLE_EQ(f[1], 2.0);
  EXPECT_DOUBLE_EQ(f[2], 2.0);
  EXPECT_DOUBLE_EQ(f[3], 2.0);
}

TEST(Series, InverseSqrtBinomial) {
  // (1+t)^(-1/2) = 1 - t/2 + 3t^2/8 - ...
  auto t = Series<double>::variable(2, 0.0);
  auto g = inv_sqrt(1.0 + t);
  EXPECT_NEAR(g[0], 1.0, 1e-15);
  EXPECT_NEAR(g[1], -0.5, 1e-15);
  EXPECT_NEAR(g[2], 0.375, 1e-15);
}

TEST(Series, SinAtZero) {
  auto t = Series<double>::variable(3, 0.0);
  auto s = sin(t);
  EXPECT_DOUBLE_EQ(s[0], 0.0);
  EXPECT_DOUBLE_EQ(s[1], 1.0);
  EXPECT_DOUBLE_EQ(s[2], 0.0);
  EXPECT_NEAR(s[3], -1.0 / 6.0, 1e-16);
}

TEST(Series, ExpCoefficientsAreInverseFactorials) {
  auto t = Series<double>::variable(6, 0.0);
  auto e = exp(t);
  double fact = 1.0;
  for (int k = 0; k <= 6; ++k) {
    if (k > 0) fact *= k;
    EXPECT_NEAR(e[k], 1.0 / fact, 1e-15) << "k=" << k;
  }
}

TEST(Series, LogOfOnePlusT) {
  auto t = Series<double>::variable(4, 0.0);
  auto l = log(1.0 + t);
  EXPECT_DOUBLE_EQ(l[0], 0.0);
  EXPECT_DOUBLE_EQ(l[1], 1.0);
  EXPECT_DOUBLE_EQ(l[2], -0.5);
  EXPECT_NEAR(l[3], 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(l[4], -0.25);
}

Series<double> random_series(std::mt19937_64& rng, int deg, double c0_min, double c0_max) {
  std::uniform_real_distribution<double> c0(c0_min, c0_max);
  std::uniform_real_distribution<double> ck(-1.0, 1.0);
  Series<double> f(deg);
  f[0] = c0(rng);
  for (int k = 1; k <= deg; ++k) f[k] = ck(rng);
  return f;
}

TEST(Series, PythagoreanIdentity) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    auto f = random_series(rng, 6, -2.0, 2.0);
    auto [s, c] = sin_cos(f);
    auto one = s * s + c * c;
    EXPECT_NEAR(one[0], 1.0, 1e-13);
    for (int k = 1; k <= 6; ++k) EXPECT_NEAR(one[k], 0.0, 1e-13) << "k=" << k;
  }
}

TEST(Series, ExpLogRoundTrip) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    auto f = random_series(rng, 5, 0.5, 3.0);
    auto g = exp(log(f));
    for (int k = 0; k <= 5; ++k) EXPECT_NEAR(g[k], f[k], 1e-12) << "k=" << k;
  }
}

TEST(Series, SqrtSquares) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    auto f = random_series(rng, 5, 0.5, 3.0);
    auto g = sqrt(f);
    auto back = g * g;
    for (int k = 0; k <= 5; ++k) EXPECT_NEAR(back[k], f[k], 1e-12);
    auto h = inv_sqrt(f);
    auto prod = g * h;
    EXPECT_NEAR(prod[0], 1.0, 1e-13);
    for (int k = 1; k <= 5; ++k) EXPECT_NEAR(prod[k], 0.0, 1e-13);
  }
}

TEST(Series, PowAgainstRepeatedMultiplication) {
  std::mt19937_64 rng(17);
  auto f = random_series(rng, 5, 0.5, 2.0);
  auto p3 = pow(f, 3.0);
  auto ref = f * f * f;
  for (int k = 0; k <= 5; ++k) EXPECT_NEAR(p3[k], ref[k], 1e-12);
  // pow(f, a) * pow(f, -a) = 1
  auto prod = pow(f, 1.7) * pow(f, -1.7);
  EXPECT_NEAR(prod[0], 1.0, 1e-13);
  for (int k = 1; k <= 5; ++k) EXPECT_NEAR(prod[k], 0.0, 1e-13);
}

TEST(Series, DomainErrors) {
  auto t = Series<double>::variable(3, 0.0);
  EXPECT_THROW((void)((1.0 + t) / t), tvi::DomainError);       // zero constant divisor
  EXPECT_THROW((void)log(t), tvi::DomainError);                // log 0
  EXPECT_THROW((void)log(t - 1.0), tvi::DomainError);          // log negative
  EXPECT_THROW((void)sqrt(t - 2.0), tvi::DomainError);
  EXPECT_THROW((void)inv_sqrt(t), tvi::DomainError);
  EXPECT_THROW((void)pow(t, 0.5), tvi::DomainError);
}

TEST(Series, ScalarMixing) {
  auto t = Series<double>::variable(2, 1.0);  // 1 + t
  auto f = 2.0 * t + 1.0;                     // 3 + 2t
  EXPECT_DOUBLE_EQ(f[0], 3.0);
  EXPECT_DOUBLE_EQ(f[1], 2.0);
  auto g = 1.0 - t;  // -t
  EXPECT_DOUBLE_EQ(g[0], 0.0);
  EXPECT_DOUBLE_EQ(g[1], -1.0);
  auto h = 6.0 / (t * t);  // 6/(1+t)^2 = 6 - 12t + 18t^2
  EXPECT_NEAR(h[0], 6.0, 1e-14);
  EXPECT_NEAR(h[1], -12.0, 1e-14);
  EXPECT_NEAR(h[2], 18.0, 1e-14);
}

TEST(Series, DualCoefficientsPropagateParameterDerivatives) {
  // Expand sin(a + t) with a carrying one seeded direction; the series
  // coefficients must carry d/da alongside their values.
  auto a = Dual<double>::seeded(0.3, 1, 0);
  auto s = Series<Dual<double>>::variable(2, a);
  auto y = sin(s);
  EXPECT_NEAR(y[0].val, std::sin(0.3), 1e-15);
  EXPECT_NEAR(y[0].partial(0), std::cos(0.3), 1e-15);
  EXPECT_NEAR(y[1].val, std::cos(0.3), 1e-15);
  EXPECT_NEAR(y[1].partial(0), -std::sin(0.3), 1e-15);
  EXPECT_NEAR(y[2].val, -0.5 * std::sin(0.3), 1e-15);
  EXPECT_NEAR(y[2].partial(0), -0.5 * std::cos(0.3), 1e-15);
}

TEST(Series, TruncatedCopiesLeadingCoefficients) {
  auto t = Series<double>::variable(4, 2.0);
  auto f = exp(t);
  auto g = f.truncated(2);
  EXPECT_EQ(g.degree(), 2);
  for (int k = 0; k <= 2; ++k) EXPECT_DOUBLE_EQ(g[k], f[k]);
}

}  // namespace
