#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "tvi/errors.hpp"
#include "tvi/matrix.hpp"

namespace tvi {

struct NewtonConfig {
  double tol = 1e-12;   // absolute inf-norm on the residual
  int max_iters = 25;
  double damping = 0.5;  // backtracking shrink factor
};

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
};

/// Raised when Newton runs out of iterations (or the residual turns
/// non-finite).  Carries the best iterate seen so callers can inspect or
/// report it.
struct ConvergenceError : Error {
  std::vector<double> best;
  SolveReport report;
  ConvergenceError(const std::string& msg, std::vector<double> best_iterate, SolveReport rep)
      : Error(msg), best(std::move(best_iterate)), report(rep) {}
};

/// Damped Newton for F(x) = 0.  `residual` maps x -> F(x); `jacobian` maps
/// x -> dF/dx as a Mat<double>.  The line search halves the step (by
/// cfg.damping) while the residual norm increases, up to 20 shrinks, then
/// takes the last trial anyway; convergence is checked before the first
/// iteration, so an exact initial guess reports zero iterations.
template <class Residual, class Jacobian>
std::pair<std::vector<double>, SolveReport> newton_solve(Residual&& residual, Jacobian&& jacobian,
                                                         std::vector<double> x,
                                                         const NewtonConfig& cfg = {}) {
  if (!(cfg.tol > 0.0)) throw ConfigError("newton_solve: tol must be positive");
  if (cfg.max_iters < 1) throw ConfigError("newton_solve: max_iters must be >= 1");
  if (!(cfg.damping > 0.0 && cfg.damping < 1.0))
    throw ConfigError("newton_solve: damping must lie in (0,1)");

  const std::size_t n = x.size();
  std::vector<double> r = residual(x);
  if (r.size() != n) throw ConfigError("newton_solve: residual dimension mismatch");
  double rn = inf_norm(r);

  std::vector<double> best_x = x;
  double best_rn = rn;
  int it = 0;

  auto fail = [&](const std::string& why) -> ConvergenceError {
    return ConvergenceError("newton_solve: " + why, best_x,
                            SolveReport{it, best_rn, false});
  };

  if (!std::isfinite(rn)) throw fail("residual not finite at initial guess");

  auto fmt_res = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return std::string(buf);
  };

  while (rn > cfg.tol) {
    if (it >= cfg.max_iters)
      throw fail("no convergence after " + std::to_string(it) + " iterations (residual " +
                 fmt_res(rn) + ")");
    Mat<double> jac = jacobian(x);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -r[i];
    std::vector<double> dx = lu_solve(std::move(jac), std::move(rhs));

    double alpha = 1.0;
    std::vector<double> xt(n), rt;
    double rtn = 0.0;
    bool have_trial = false;
    for (int shrink = 0; shrink <= 20; ++shrink) {
      for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + alpha * dx[i];
      rt = residual(xt);
      rtn = inf_norm(rt);
      have_trial = std::isfinite(rtn);
      if (have_trial && rtn <= rn) break;
      alpha *= cfg.damping;
    }
    if (!have_trial) throw fail("residual not finite along the search direction");

    x = xt;
    r = std::move(rt);
    rn = rtn;
    ++it;
    if (rn < best_rn) {
      best_rn = rn;
      best_x = x;
    }
  }
  return {std::move(x), SolveReport{it, rn, true}};
}

}  // namespace tvi
