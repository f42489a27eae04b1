#include "tvi/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace {

using tvi::Mat;
using tvi::newton_solve;
using tvi::NewtonConfig;

TEST(Solver, ScalarQuadratic) {
  auto residual = [](const std::vector<double>& x) {
    return std::vector<double>{x[0] * x[0] - 4.0};
  };
  auto jacobian = [](const std::vector<double>& x) {
    Mat<double> j(1, 1);
    j(0, 0) = 2.0 * x[0];
    return j;
  };
  auto [x, rep] = newton_solve(residual, jacobian, {3.0});
  EXPECT_NEAR(x[0], 2.0, 1e-12);
  EXPECT_TRUE(rep.converged);
  EXPECT_GE(rep.iterations, 1);
  EXPECT_LE(rep.final_residual, 1e-12);
}

TEST(Solver, LinearSystemConvergesInOneIteration) {
  auto residual = [](const std::vector<double>& x) {
    return std::vector<double>{x[0] + x[1] - 3.0, x[0] - x[1] - 1.0};
  };
  auto jacobian = [](const std::vector<double>&) {
    Mat<double> j(2, 2);
    j(0, 0) = 1; j(0, 1) = 1;
    j(1, 0) = 1; j(1, 1) = -1;
    return j;
  };
  auto [x, rep] = newton_solve(residual, jacobian, {10.0, -10.0});
  EXPECT_NEAR(x[0], 2.0, 1e-12);
  EXPECT_NEAR(x[1], 1.0, 1e-12);
  EXPECT_EQ(rep.iterations, 1);
}

TEST(Solver, ExactGuessReportsZeroIterations) {
  auto residual = [](const std::vector<double>& x) {
    return std::vector<double>{x[0] - 5.0};
  };
  auto jacobian = [](const std::vector<double>&) {
    Mat<double> j(1, 1);
    j(0, 0) = 1.0;
    return j;
  };
  auto [x, rep] = newton_solve(residual, jacobian, {5.0});
  EXPECT_EQ(rep.iterations, 0);
  EXPECT_TRUE(rep.converged);
  EXPECT_DOUBLE_EQ(x[0], 5.0);
}

TEST(Solver, ReportsFailureWithBestIterate) {
  // x^2 + 1 has no real root; expect a ConvergenceError carrying the report.
  auto residual = [](const std::vector<double>& x) {
    return std::vector<double>{x[0] * x[0] + 1.0};
  };
  auto jacobian = [](const std::vector<double>& x) {
    Mat<double> j(1, 1);
    j(0, 0) = 2.0 * x[0];
    return j;
  };
  NewtonConfig cfg;
  cfg.max_iters = 8;
  try {
    (void)newton_solve(residual, jacobian, {3.0}, cfg);
    FAIL() << "expected ConvergenceError";
  } catch (const tvi::ConvergenceError& e) {
    EXPECT_FALSE(e.report.converged);
    EXPECT_LE(e.report.iterations, 8);
    ASSERT_EQ(e.best.size(), 1u);
    EXPECT_TRUE(std::isfinite(e.best[0]));
    EXPECT_GE(e.report.final_residual, 1.0);  // can never drop below 1
  }
}

TEST(Solver, SingularJacobianPropagates) {
  auto residual = [](const std::vector<double>& x) {
    return std::vector<double>{x[0] + x[1], x[0] + x[1] - 1.0};
  };
  auto jacobian = [](const std::vector<double>&) {
    Mat<double> j(2, 2);
    j(0, 0) = 1; j(0, 1) = 1;
    j(1, 0) = 1; j(1, 1) = 1;
    return j;
  };
  EXPECT_THROW((void)newton_solve(residual, jacobian, {0.0, 0.0}), tvi::SingularMatrixError);
}

TEST(Solver, DampingRescuesOvershoot) {
  // Undamped Newton on atan diverges from x0 = 2; backtracking converges.
  auto residual = [](const std::vector<double>& x) {
    return std::vector<double>{std::atan(x[0])};
  };
  auto jacobian = [](const std::vector<double>& x) {
    Mat<double> j(1, 1);
    j(0, 0) = 1.0 / (1.0 + x[0] * x[0]);
    return j;
  };
  auto [x, rep] = newton_solve(residual, jacobian, {2.0});
  EXPECT_TRUE(rep.converged);
  EXPECT_NEAR(x[0], 0.0, 1e-12);
}

TEST(Solver, ConfigValidation) {
  auto residual = [](const std::vector<double>& x) { return x; };
  auto jacobian = [](const std::vector<double>&) { return Mat<double>::identity(1); };
  NewtonConfig bad_tol;
  bad_tol.tol = 0.0;
  EXPECT_THROW((void)newton_solve(residual, jacobian, {1.0}, bad_tol), tvi::ConfigError);
  NewtonConfig bad_damping;
  bad_damping.damping = 1.0;
  EXPECT_THROW((void)newton_solve(residual, jacobian, {1.0}, bad_damping), tvi::ConfigError);
  NewtonConfig bad_iters;
  bad_iters.max_iters = 0;
  EXPECT_THROW((void)newton_solve(residual, jacobian, {1.0}, bad_iters), tvi::ConfigError);
}

}  // namespace
