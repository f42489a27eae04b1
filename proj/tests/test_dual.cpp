#include "tvi/dual.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using D = tvi::Dual<double>;
using DD = tvi::Dual<tvi::Dual<double>>;

TEST(Dual, ArithmeticPartials) {
  auto x = D::seeded(1.3, 2, 0);
  auto y = D::seeded(-0.4, 2, 1);
  auto f = x * y + sin(x);
  EXPECT_NEAR(f.val, 1.3 * -0.4 + std::sin(1.3), 1e-15);
  EXPECT_NEAR(f.partial(0), -0.4 + std::cos(1.3), 1e-15);
  EXPECT_NEAR(f.partial(1), 1.3, 1e-15);
}

TEST(Dual, QuotientRule) {
  auto x = D::seeded(2.0, 2, 0);
  auto y = D::seeded(3.0, 2, 1);
  auto f = x / y;
  EXPECT_NEAR(f.val, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(f.partial(0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(f.partial(1), -2.0 / 9.0, 1e-15);
}

TEST(Dual, ConstantsStayCheap) {
  auto x = D::seeded(0.7, 3, 1);
  D c(2.5);  // no derivative storage
  EXPECT_TRUE(c.der.empty());
  auto f = c * x + 1.0;
  EXPECT_NEAR(f.val, 2.5 * 0.7 + 1.0, 1e-15);
  EXPECT_NEAR(f.partial(0), 0.0, 1e-15);
  EXPECT_NEAR(f.partial(1), 2.5, 1e-15);
  EXPECT_NEAR(f.partial(2), 0.0, 1e-15);
}

TEST(Dual, ElementaryChainRules) {
  auto x = D::seeded(0.8, 1, 0);
  EXPECT_NEAR(exp(x).partial(0), std::exp(0.8), 1e-15);
  EXPECT_NEAR(log(x).partial(0), 1.0 / 0.8, 1e-15);
  EXPECT_NEAR(sqrt(x).partial(0), 0.5 / std::sqrt(0.8), 1e-15);
  EXPECT_NEAR(cos(x).partial(0), -std::sin(0.8), 1e-15);
  EXPECT_NEAR(pow(x, 2.5).partial(0), 2.5 * std::pow(0.8, 1.5), 1e-14);
  // inv_sqrt agrees with pow(x, -1/2)
  auto a = inv_sqrt(x);
  auto b = pow(x, -0.5);
  EXPECT_NEAR(a.val, b.val, 1e-15);
  EXPECT_NEAR(a.partial(0), b.partial(0), 1e-14);
}

TEST(Dual, LogExpRoundTrip) {
  auto x = D::seeded(1.9, 1, 0);
  auto f = exp(log(x));
  EXPECT_NEAR(f.val, 1.9, 1e-15);
  EXPECT_NEAR(f.partial(0), 1.0, 1e-15);
}

TEST(Dual, DomainViolationsThrow) {
  auto x = D::seeded(-1.0, 1, 0);
  EXPECT_THROW((void)log(x), tvi::DomainError);
  EXPECT_THROW((void)sqrt(x), tvi::DomainError);
  EXPECT_THROW((void)inv_sqrt(x), tvi::DomainError);
  EXPECT_THROW((void)pow(x, 0.3), tvi::DomainError);
}

// Nested duals: second derivative of sin is -sin.
TEST(Dual, NestedSecondDerivative) {
  const double x0 = 0.6;
  DD x(D::seeded(x0, 1, 0));
  x.der.assign(1, D(1.0));
  auto f = sin(x) * x;  // f = x sin x, f'' = 2 cos x - x sin x
  EXPECT_NEAR(value_of(f), x0 * std::sin(x0), 1e-15);
  // outer partial holds f' as a dual: value f', derivative f''
  auto fp = f.partial(0);
  EXPECT_NEAR(fp.val, std::sin(x0) + x0 * std::cos(x0), 1e-15);
  EXPECT_NEAR(fp.partial(0), 2.0 * std::cos(x0) - x0 * std::sin(x0), 1e-14);
}

// Mixed second partials via nesting: f = x^2 y, d2f/dxdy = 2x.
TEST(Dual, NestedMixedPartial) {
  const double x0 = 1.1, y0 = -0.7;
  // Inner level seeds (x, y); outer level seeds x only.
  DD x(D::seeded(x0, 2, 0));
  x.der.assign(1, D(1.0));
  DD y(D::seeded(y0, 2, 1));
  auto f = x * x * y;
  // d/dx_outer of (df/dy_inner) = 2 x
  EXPECT_NEAR(f.partial(0).partial(1), 2.0 * x0, 1e-14);
  // d/dx_outer of (df/dx_inner) = 2 y
  EXPECT_NEAR(f.partial(0).partial(0), 2.0 * y0, 1e-14);
}

TEST(Dual, ValueOfStripsAllLevels) {
  DD x(D::seeded(0.25, 1, 0));
  x.der.assign(1, D(1.0));
  EXPECT_DOUBLE_EQ(value_of(exp(x)), std::exp(0.25));
}

}  // namespace
