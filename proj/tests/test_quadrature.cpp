#include "tvi/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using tvi::check_order;
using tvi::is_symmetric;
using tvi::make_gauss;
using tvi::make_rule;
using tvi::QuadratureRule;
using tvi::RuleKind;

TEST(Quadrature, StatedOrderMatchesMeasuredOrder) {
  for (RuleKind k : {RuleKind::rect_left, RuleKind::rect_right, RuleKind::midpoint,
                     RuleKind::trapezoid, RuleKind::simpson}) {
    auto rule = make_rule(k);
    EXPECT_EQ(check_order(rule), rule.order) << rule.name;
  }
  for (int m = 1; m <= 8; ++m) {
    auto rule = make_gauss(m);
    EXPECT_EQ(check_order(rule), 2 * m) << rule.name;
  }
}

TEST(Quadrature, WeightsSumToOne) {
  for (int m = 1; m <= 20; ++m) {
    auto rule = make_gauss(m);
    double s = 0.0;
    for (double b : rule.b) s += b;
    EXPECT_NEAR(s, 1.0, 1e-13) << "m=" << m;
  }
}

TEST(Quadrature, GaussTwoPointNodes) {
  auto rule = make_gauss(2);
  // 1/2 -+ sqrt(3)/6, weights 1/2 each.
  EXPECT_NEAR(rule.c[0], 0.5 - std::sqrt(3.0) / 6.0, 1e-14);
  EXPECT_NEAR(rule.c[1], 0.5 + std::sqrt(3.0) / 6.0, 1e-14);
  EXPECT_NEAR(rule.b[0], 0.5, 1e-14);
  EXPECT_NEAR(rule.b[1], 0.5, 1e-14);
}

TEST(Quadrature, GaussThreePointNodes) {
  auto rule = make_gauss(3);
  EXPECT_NEAR(rule.c[0], 0.5 - std::sqrt(15.0) / 10.0, 1e-14);
  EXPECT_NEAR(rule.c[1], 0.5, 1e-14);
  EXPECT_NEAR(rule.c[2], 0.5 + std::sqrt(15.0) / 10.0, 1e-14);
  EXPECT_NEAR(rule.b[0], 5.0 / 18.0, 1e-14);
  EXPECT_NEAR(rule.b[1], 4.0 / 9.0, 1e-14);
  EXPECT_NEAR(rule.b[2], 5.0 / 18.0, 1e-14);
}

TEST(Quadrature, SymmetryFlags) {
  EXPECT_FALSE(make_rule(RuleKind::rect_left).symmetric);
  EXPECT_FALSE(make_rule(RuleKind::rect_right).symmetric);
  EXPECT_TRUE(make_rule(RuleKind::midpoint).symmetric);
  EXPECT_TRUE(make_rule(RuleKind::trapezoid).symmetric);
  EXPECT_TRUE(make_rule(RuleKind::simpson).symmetric);
  for (int m = 1; m <= 10; ++m) EXPECT_TRUE(make_gauss(m).symmetric) << m;
}

TEST(Quadrature, SymmetryFlagAgreesWithDefinitionalTest) {
  for (RuleKind k : {RuleKind::rect_left, RuleKind::rect_right, RuleKind::midpoint,
                     RuleKind::trapezoid, RuleKind::simpson}) {
    auto rule = make_rule(k);
    EXPECT_EQ(rule.symmetric, is_symmetric(rule)) << rule.name;
  }
  // A lopsided custom rule must register as asymmetric.
  QuadratureRule odd{"lopsided", {0.0, 0.25}, {0.5, 0.5}, 1, false};
  EXPECT_FALSE(is_symmetric(odd));
}

TEST(Quadrature, SimpsonIsWeightedEndpointsPlusMidpoint) {
  auto rule = make_rule(RuleKind::simpson);
  ASSERT_EQ(rule.c.size(), 3u);
  EXPECT_DOUBLE_EQ(rule.c[0], 0.0);
  EXPECT_DOUBLE_EQ(rule.c[1], 0.5);
  EXPECT_DOUBLE_EQ(rule.c[2], 1.0);
  EXPECT_NEAR(rule.b[0], 1.0 / 6.0, 1e-16);
  EXPECT_NEAR(rule.b[1], 2.0 / 3.0, 1e-16);
  EXPECT_NEAR(rule.b[2], 1.0 / 6.0, 1e-16);
}

TEST(Quadrature, FromString) {
  EXPECT_EQ(tvi::rule_from_string("trapezoid").name, "trapezoid");
  EXPECT_EQ(tvi::rule_from_string("gauss4").c.size(), 4u);
  EXPECT_THROW((void)tvi::rule_from_string("lobatto3"), tvi::ConfigError);
  EXPECT_THROW((void)tvi::rule_from_string("gauss0"), tvi::ConfigError);
  EXPECT_THROW((void)tvi::rule_from_string("gauss"), tvi::ConfigError);
  EXPECT_THROW((void)tvi::rule_from_string("gauss2x"), tvi::ConfigError);
}

TEST(Quadrature, HighOrderGaussStaysAccurate) {
  // Integrate exp on [0,1] with gauss8; the answer is e - 1 to machine terms.
  auto rule = make_gauss(8);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.c.size(); ++i) s += rule.b[i] * std::exp(rule.c[i]);
  EXPECT_NEAR(s, std::exp(1.0) - 1.0, 5e-15);
}

}  // namespace
