#include "tvi/jets.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tvi/systems.hpp"

namespace {

using tvi::eval_state;
using tvi::prolong;
using tvi::TaylorCoeffs;

TEST(Jets, FreeParticleCoefficientsVanishBeyondLinear) {
  tvi::FreeParticle sys(2);
  std::vector<double> q0 = {1.0, -2.0}, v0 = {0.5, 3.0};
  auto tc = prolong(sys, q0, v0, 5);
  for (int i = 0; i < 2; ++i) {
    EXPECT_DOUBLE_EQ(tc.Q(i, 0), q0[i]);
    EXPECT_DOUBLE_EQ(tc.Q(i, 1), v0[i]);
    for (int k = 2; k <= 5; ++k) EXPECT_DOUBLE_EQ(tc.Q(i, k), 0.0);
  }
}

TEST(Jets, HarmonicOscillatorGivesCosineSeries) {
  tvi::HarmonicOscillator sys;
  std::vector<double> q0 = {1.0}, v0 = {0.0};
  auto tc = prolong(sys, q0, v0, 6);
  // cos t = 1 - t^2/2 + t^4/24 - t^6/720
  EXPECT_DOUBLE_EQ(tc.Q(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(tc.Q(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(tc.Q(0, 2), -0.5);
  EXPECT_DOUBLE_EQ(tc.Q(0, 3), 0.0);
  EXPECT_DOUBLE_EQ(tc.Q(0, 4), 1.0 / 24.0);
  EXPECT_DOUBLE_EQ(tc.Q(0, 6), -1.0 / 720.0);
}

TEST(Jets, HarmonicOscillatorSensitivities) {
  tvi::HarmonicOscillator sys;
  std::vector<double> q0 = {0.3}, v0 = {-0.8};
  auto tc = prolong(sys, q0, v0, 4, true);
  ASSERT_TRUE(tc.has_sensitivities());
  // Q_k = q0 c_k + v0 s_k with c, s the cos/sin coefficient patterns, so the
  // sensitivities are state independent here.
  EXPECT_DOUBLE_EQ(tc.dQdq0[0](0, 0), 1.0);
  EXPECT_DOUBLE_EQ(tc.dQdv0[0](0, 0), 0.0);
  EXPECT_DOUBLE_EQ(tc.dQdq0[1](0, 0), 0.0);
  EXPECT_DOUBLE_EQ(tc.dQdv0[1](0, 0), 1.0);
  EXPECT_DOUBLE_EQ(tc.dQdq0[2](0, 0), -0.5);
  EXPECT_DOUBLE_EQ(tc.dQdv0[3](0, 0), -1.0 / 6.0);
  EXPECT_DOUBLE_EQ(tc.dQdq0[4](0, 0), 1.0 / 24.0);
}

TEST(Jets, PendulumJetAtHorizontalRelease) {
  // q'' = -9.8 sin q.  At (pi/2, 0): q'' = -9.8, and the next two
  // derivatives vanish since q''' = -9.8 cos(q) q' and
  // q'''' = -9.8 (cos(q) q'' - sin(q) q'^2) with q' = 0, cos(pi/2) = 0.
  tvi::Pendulum sys;
  std::vector<double> q0 = {std::numbers::pi / 2.0}, v0 = {0.0};
  auto tc = prolong(sys, q0, v0, 4);
  EXPECT_NEAR(tc.Q(0, 2), -9.8 / 2.0, 1e-14);
  EXPECT_NEAR(tc.Q(0, 3), 0.0, 1e-14);
  EXPECT_NEAR(tc.Q(0, 4), 0.0, 1e-14);
}

TEST(Jets, PendulumFourthOrderVelocitySensitivity) {
  // For q'' = f(q): q''' = f'(q) q' and q'''' = f''(q) q'^2 + f'(q) f(q),
  // hence d(q'''')/dv = 2 f'' v = 2 d(q''')/dq at any state.  In the
  // normalized coefficients this reads 24 dQ4/dv0 = 2 * 6 dQ3/dq0.
  tvi::Pendulum sys;
  std::vector<double> q0 = {0.3}, v0 = {0.7};
  auto tc = prolong(sys, q0, v0, 4, true);
  double dq4_dv = 24.0 * tc.dQdv0[4](0, 0);
  double dq3_dq = 6.0 * tc.dQdq0[3](0, 0);
  EXPECT_NEAR(dq4_dv, 2.0 * dq3_dq, 1e-12);
  // Against the closed forms: q''' = -g cos(q) v, q'''' = -g cos(q) q'' + g sin(q) v^2.
  const double g = 9.8;
  EXPECT_NEAR(dq3_dq, g * std::sin(0.3) * 0.7, 1e-12);
  EXPECT_NEAR(dq4_dv, 2.0 * g * std::sin(0.3) * 0.7, 1e-12);
}

TEST(Jets, VelocityDependentForceRecurrence) {
  // q'' = -w^2 q - gamma q' implies
  // (k+2)(k+1) Q_{k+2} = -w^2 Q_k - gamma (k+1) Q_{k+1}.
  const double w = 1.3, gamma = 0.25;
  tvi::DampedOscillator sys(w, gamma);
  std::vector<double> q0 = {0.5}, v0 = {-0.2};
  auto tc = prolong(sys, q0, v0, 6);
  for (int k = 0; k + 2 <= 6; ++k) {
    double lhs = (k + 2) * (k + 1) * tc.Q(0, k + 2);
    double rhs = -w * w * tc.Q(0, k) - gamma * (k + 1) * tc.Q(0, k + 1);
    EXPECT_NEAR(lhs, rhs, 1e-13) << "k=" << k;
  }
}

TEST(Jets, KeplerCircularOrbit) {
  // Unit circular orbit: q(t) = (cos t, sin t).
  tvi::Kepler2D sys;
  std::vector<double> q0 = {1.0, 0.0}, v0 = {0.0, 1.0};
  auto tc = prolong(sys, q0, v0, 5);
  double fact = 1.0;
  for (int k = 0; k <= 5; ++k) {
    if (k > 0) fact *= k;
    double ck = 0.0, sk = 0.0;  // Taylor coefficients of cos, sin
    switch (k % 4) {
      case 0: ck = 1.0 / fact; break;
      case 1: sk = 1.0 / fact; break;
      case 2: ck = -1.0 / fact; break;
      case 3: sk = -1.0 / fact; break;
    }
    EXPECT_NEAR(tc.Q(0, k), ck, 1e-13) << "x, k=" << k;
    EXPECT_NEAR(tc.Q(1, k), sk, 1e-13) << "y, k=" << k;
  }
}

TEST(Jets, SensitivitiesMatchFiniteDifferences) {
  tvi::Pendulum sys;
  std::vector<double> q0 = {0.3}, v0 = {0.7};
  auto tc = prolong(sys, q0, v0, 5, true);
  const double d = 1e-6;
  for (bool wrt_q : {true, false}) {
    auto qp = q0, qm = q0, vp = v0, vm = v0;
    (wrt_q ? qp[0] : vp[0]) += d;
    (wrt_q ? qm[0] : vm[0]) -= d;
    auto tp = prolong(sys, qp, vp, 5);
    auto tm = prolong(sys, qm, vm, 5);
    for (int k = 0; k <= 5; ++k) {
      double fd = (tp.Q(0, k) - tm.Q(0, k)) / (2.0 * d);
      double an = wrt_q ? tc.dQdq0[k](0, 0) : tc.dQdv0[k](0, 0);
      EXPECT_NEAR(an, fd, 1e-8) << "k=" << k << " wrt_q=" << wrt_q;
    }
  }
}

TEST(Jets, EvalStateTruncatesConsistently) {
  tvi::HarmonicOscillator sys;
  std::vector<double> q0 = {1.0}, v0 = {0.0};
  auto tc = prolong(sys, q0, v0, 4);
  auto [q, v] = eval_state(tc, 0.3, 2);
  // q uses coefficients 0..2, v uses 1..3.
  EXPECT_NEAR(q[0], 1.0 - 0.5 * 0.3 * 0.3, 1e-15);
  EXPECT_NEAR(v[0], -0.3, 1e-15);  // -t + 0 t^2 contribution (3 Q3 t^2 = 0)
  EXPECT_THROW((void)eval_state(tc, 0.3, 4), tvi::ConfigError);
  EXPECT_THROW((void)eval_state(tc, 0.3, -1), tvi::ConfigError);
}

TEST(Jets, EvalPolyHelpers) {
  tvi::Series<double> s(3);
  s[0] = 1.0; s[1] = -2.0; s[2] = 0.5; s[3] = 4.0;
  const double t = 0.3;
  EXPECT_NEAR(tvi::eval_poly(s, t, 3), 1.0 - 2.0 * t + 0.5 * t * t + 4.0 * t * t * t, 1e-15);
  EXPECT_NEAR(tvi::eval_poly(s, t, 1), 1.0 - 2.0 * t, 1e-15);
  EXPECT_NEAR(tvi::eval_dpoly(s, t, 3), -2.0 + 1.0 * t + 12.0 * t * t, 1e-15);
  EXPECT_DOUBLE_EQ(tvi::eval_dpoly(s, t, 0), 0.0);
}

TEST(Jets, DimensionValidation) {
  tvi::Pendulum sys;
  std::vector<double> q0 = {0.1, 0.2}, v0 = {0.0};
  EXPECT_THROW((void)prolong(sys, q0, v0, 3), tvi::ConfigError);
  std::vector<double> q1 = {0.1};
  EXPECT_THROW((void)prolong(sys, q1, v0, 0), tvi::ConfigError);
}

}  // namespace
