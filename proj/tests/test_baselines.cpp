#include "tvi/baselines.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tvi/systems.hpp"

namespace {

const double kPiHalf = std::numbers::pi / 2.0;

TEST(Baselines, EulerAOnPendulum) {
  // p1 = -h g sin(q0) = -0.98, q1 = q0 + h p1.
  tvi::Pendulum sys;
  auto s = euler_a_step(sys, std::vector{kPiHalf}, std::vector{0.0}, 0.1);
  EXPECT_NEAR(s.p[0], -0.98, 1e-15);
  EXPECT_NEAR(s.q[0], kPiHalf - 0.098, 1e-15);
}

TEST(Baselines, EulerBOnPendulum) {
  tvi::Pendulum sys;
  auto s = euler_b_step(sys, std::vector{kPiHalf}, std::vector{0.0}, 0.1);
  EXPECT_NEAR(s.q[0], kPiHalf, 1e-15);  // no initial momentum, position holds
  EXPECT_NEAR(s.p[0], -0.98, 1e-15);
}

TEST(Baselines, StormerVerletOnHarmonicOscillator) {
  tvi::HarmonicOscillator sys;
  auto s = stormer_verlet_step(sys, std::vector{1.0}, std::vector{0.0}, 0.1);
  EXPECT_NEAR(s.q[0], 0.995, 1e-15);
  EXPECT_NEAR(s.p[0], -0.09975, 1e-15);
}

TEST(Baselines, EulerPairIsMutuallyAdjoint) {
  // Euler-B with step -h inverts Euler-A with step h, exactly.
  tvi::Pendulum sys;
  std::vector<double> q0 = {0.4}, p0 = {-1.1};
  auto fwd = euler_a_step(sys, q0, p0, 0.17);
  auto back = euler_b_step(sys, fwd.q, fwd.p, -0.17);
  EXPECT_NEAR(back.q[0], q0[0], 1e-15);
  EXPECT_NEAR(back.p[0], p0[0], 1e-15);
}

TEST(Baselines, StormerVerletIsTimeReversible) {
  tvi::Kepler2D sys;
  std::vector<double> q0 = {1.0, 0.0}, p0 = {0.0, 0.8};
  auto fwd = stormer_verlet_step(sys, q0, p0, 0.05);
  auto back = stormer_verlet_step(sys, fwd.q, fwd.p, -0.05);
  EXPECT_NEAR(back.q[0], q0[0], 1e-14);
  EXPECT_NEAR(back.q[1], q0[1], 1e-14);
  EXPECT_NEAR(back.p[0], p0[0], 1e-14);
  EXPECT_NEAR(back.p[1], p0[1], 1e-14);
}

TEST(Baselines, TaylorStepTruncation) {
  tvi::HarmonicOscillator sys;
  // r = 1: position keeps degree 1 only, velocity gets the h a0 kick.
  auto s1 = taylor_step(sys, std::vector{1.0}, std::vector{0.0}, 0.1, 1);
  EXPECT_DOUBLE_EQ(s1.q[0], 1.0);
  EXPECT_DOUBLE_EQ(s1.p[0], -0.1);
  // r = 2: position picks up the curvature term.
  auto s2 = taylor_step(sys, std::vector{1.0}, std::vector{0.0}, 0.1, 2);
  EXPECT_DOUBLE_EQ(s2.q[0], 0.995);
  EXPECT_DOUBLE_EQ(s2.p[0], -0.1);
}

TEST(Baselines, AllExactOnFreeParticle) {
  tvi::FreeParticle sys(2);
  std::vector<double> q0 = {0.0, 1.0}, p0 = {1.0, -2.0};
  const double h = 0.3;
  for (int which = 0; which < 4; ++which) {
    tvi::BaselineStep s;
    switch (which) {
      case 0: s = euler_a_step(sys, q0, p0, h); break;
      case 1: s = euler_b_step(sys, q0, p0, h); break;
      case 2: s = stormer_verlet_step(sys, q0, p0, h); break;
      default: s = taylor_step(sys, q0, p0, h, 3); break;
    }
    for (int i = 0; i < 2; ++i) {
      EXPECT_DOUBLE_EQ(s.q[i], q0[i] + h * p0[i]) << which;
      EXPECT_DOUBLE_EQ(s.p[i], p0[i]) << which;
    }
  }
}

}  // namespace
