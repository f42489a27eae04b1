#pragma once

#include <span>
#include <utility>
#include <vector>

#include "tvi/dual.hpp"
#include "tvi/errors.hpp"
#include "tvi/integrator_types.hpp"
#include "tvi/jets.hpp"
#include "tvi/matrix.hpp"
#include "tvi/quadrature.hpp"
#include "tvi/series.hpp"
#include "tvi/solver.hpp"
#include "tvi/systems.hpp"

// Symmetric variant of the Taylor variational integrator.  Instead of one
// expansion shot forward from q0, the discrete Lagrangian blends two
// one-sided expansions, one from each endpoint:
//
//   1. match boundary velocities by the two inverse problems
//        A(q0, v0~; h)  = q1   (degree-r polynomial through (q0, v0~)),
//        B(q1, v1~; -h) = q0   (degree-r polynomial through (q1, v1~)),
//   2. build quadrature-node states as convex blends of the two expansions,
//        q_c = c qf(c h) + (1-c) qb(-(1-c) h),
//        v_c = c vf(c h) + (1-c) vb(-(1-c) h),
//      with positions truncated to degree r, velocities to coefficient
//      budget r (one order lower, as usual); nodes at c = 0 and c = 1 read
//      the boundary data (q0, v0~) and (q1, v1~) directly,
//   3. ld(q0, q1) = h sum_i b_i L(q_c_i, v_c_i), stepped by the discrete
//      Euler-Lagrange equations p0 = -D1 ld, p1 = D2 ld.
//
// With a symmetric rule (c_i = 1 - c_{m-i+1}, b_i = b_{m-i+1}) swapping
// (q0, q1, h) -> (q1, q0, -h) swaps the two expansions and reverses the node
// list, so ld(q0, q1; h) = -ld(q1, q0; -h) and the step map is self-adjoint.
// That is what buys the extra order: for odd r the method has order r+1.
//
// Gradients again carry multiplier terms, now one per constraint.  With
// lam1 = (dA/dv0)^-T dl/dv0 and lam2 = (dB/dv1)^-T dl/dv1,
//   D1 ld = dl/dq0 - (dA/dq0)^T lam1 + lam2,
//   D2 ld = dl/dq1 + lam1 - (dB/dq1)^T lam2,
// using dv0~/dq1 = (dA/dv0)^-1 and dv1~/dq0 = (dB/dv1)^-1 from implicit
// differentiation of the inverse problems.

namespace tvi {

/// Boundary velocities matched from both endpoints, with the two expansions
/// they induce and the sensitivities of each velocity to both endpoints.
struct TwoPointVelocities {
  std::vector<double> q0, q1, v0, v1;
  double h = 0.0;
  int r = 0;
  TaylorCoeffs fwd, bwd;  // at (q0, v0) and (q1, v1), order r, with sensitivities
  Mat<double> dv0_dq0, dv0_dq1, dv1_dq0, dv1_dq1;
  SolveReport report;  // both Newton solves: iterations summed, residual maxed
};

namespace detail {

inline void validate_symmetric_params(int n, std::size_t q, std::size_t p, double h, int r,
                                      const QuadratureRule& rule) {
  validate_step_params(n, q, p, h, r, rule);
  if (r < 1) throw ConfigError("symmetric scheme needs r >= 1");
  if (!rule.symmetric) throw ConfigError("symmetric scheme needs a symmetric quadrature rule");
}

/// Symmetric discrete Lagrangian pieces at (q0, q1, v0, v1), generic over
/// the outer scalar S.  Inner duals seed [q0 | q1 | v0 | v1].
template <class S>
struct SymParts {
  S ld;
  std::vector<S> fwd_end;          // A(q0, v0; h), degree r
  std::vector<S> bwd_end;          // B(q1, v1; -h), degree r
  Mat<S> dA_dq0, dA_dv0, dB_dq1, dB_dv1;
  std::vector<S> dl_dq0, dl_dq1, dl_dv0, dl_dv1;
};

template <class Sys, class S>
SymParts<S> sym_parts(const Sys& sys, std::span<const double> q0, std::span<const S> q1,
                      std::span<const S> v0, std::span<const S> v1, double h, int r,
                      const QuadratureRule& rule) {
  using D = Dual<S>;
  const int n = sys.dim();
  const std::size_t un = static_cast<std::size_t>(n);
  const std::size_t m = 4 * un;

  std::vector<D> q0d, q1d, v0d, v1d;
  q0d.reserve(un);
  q1d.reserve(un);
  v0d.reserve(un);
  v1d.reserve(un);
  for (std::size_t i = 0; i < un; ++i) {
    q0d.push_back(D::seeded(S(q0[i]), m, i));
    q1d.push_back(D::seeded(q1[i], m, un + i));
    v0d.push_back(D::seeded(v0[i], m, 2 * un + i));
    v1d.push_back(D::seeded(v1[i], m, 3 * un + i));
  }

  auto fwd = prolong_series<D>(sys, q0d, v0d, r);
  auto bwd = prolong_series<D>(sys, q1d, v1d, r);

  std::vector<D> pos(un, D(S(0))), vel(un, D(S(0)));
  D acc(S(0));
  for (std::size_t node = 0; node < rule.c.size(); ++node) {
    const double c = rule.c[node];
    if (c == 0.0) {
      for (std::size_t i = 0; i < un; ++i) {
        pos[i] = q0d[i];
        vel[i] = v0d[i];
      }
    } else if (c == 1.0) {
      for (std::size_t i = 0; i < un; ++i) {
        pos[i] = q1d[i];
        vel[i] = v1d[i];
      }
    } else {
      const double tf = c * h;
      const double tb = -(1.0 - c) * h;
      for (std::size_t i = 0; i < un; ++i) {
        pos[i] = c * eval_poly(fwd[i], tf, r) + (1.0 - c) * eval_poly(bwd[i], tb, r);
        vel[i] = c * eval_dpoly(fwd[i], tf, r) + (1.0 - c) * eval_dpoly(bwd[i], tb, r);
      }
    }
    D lag = kinetic_energy(sys, std::span<const D>(vel)) -
            sys.potential(std::span<const D>(pos));
    acc += rule.b[node] * lag;
  }
  acc = h * acc;

  SymParts<S> P;
  P.ld = acc.val;
  P.dl_dq0.resize(un);
  P.dl_dq1.resize(un);
  P.dl_dv0.resize(un);
  P.dl_dv1.resize(un);
  for (std::size_t j = 0; j < un; ++j) {
    P.dl_dq0[j] = acc.partial(j);
    P.dl_dq1[j] = acc.partial(un + j);
    P.dl_dv0[j] = acc.partial(2 * un + j);
    P.dl_dv1[j] = acc.partial(3 * un + j);
  }
  P.fwd_end.resize(un);
  P.bwd_end.resize(un);
  P.dA_dq0 = Mat<S>(n, n);
  P.dA_dv0 = Mat<S>(n, n);
  P.dB_dq1 = Mat<S>(n, n);
  P.dB_dv1 = Mat<S>(n, n);
  for (std::size_t i = 0; i < un; ++i) {
    D a = eval_poly(fwd[i], h, r);
    D b = eval_poly(bwd[i], -h, r);
    P.fwd_end[i] = a.val;
    P.bwd_end[i] = b.val;
    for (std::size_t j = 0; j < un; ++j) {
      P.dA_dq0(static_cast<int>(i), static_cast<int>(j)) = a.partial(j);
      P.dA_dv0(static_cast<int>(i), static_cast<int>(j)) = a.partial(2 * un + j);
      P.dB_dq1(static_cast<int>(i), static_cast<int>(j)) = b.partial(un + j);
      P.dB_dv1(static_cast<int>(i), static_cast<int>(j)) = b.partial(3 * un + j);
    }
  }
  return P;
}

/// (D1 ld, D2 ld) from the parts via the two constraint multipliers.
template <class S>
std::pair<std::vector<S>, std::vector<S>> sym_gradients(const SymParts<S>& P) {
  const std::size_t n = P.fwd_end.size();
  std::vector<S> lam1 = lu_solve(transposed(P.dA_dv0), P.dl_dv0);
  std::vector<S> lam2 = lu_solve(transposed(P.dB_dv1), P.dl_dv1);
  std::vector<S> d1(n), d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    S a1 = P.dl_dq0[i] + lam2[i];
    S a2 = P.dl_dq1[i] + lam1[i];
    for (std::size_t j = 0; j < n; ++j) {
      a1 -= P.dA_dq0(static_cast<int>(j), static_cast<int>(i)) * lam1[j];
      a2 -= P.dB_dq1(static_cast<int>(j), static_cast<int>(i)) * lam2[j];
    }
    d1[i] = std::move(a1);
    d2[i] = std::move(a2);
  }
  return {std::move(d1), std::move(d2)};
}

}  // namespace detail

/// Solve the two inverse problems for the boundary velocities: the degree-r
/// polynomial through (q0, v0~) reaches q1 at h, the one through (q1, v1~)
/// reaches q0 at -h.  Both start from the secant guess (q1 - q0)/h.
template <class Sys>
TwoPointVelocities solve_boundary_velocities(const Sys& sys, std::span<const double> q0,
                                             std::span<const double> q1, double h,
                                             const TviConfig& cfg) {
  const int n = sys.dim();
  const std::size_t un = static_cast<std::size_t>(n);
  detail::validate_symmetric_params(n, q0.size(), q1.size(), h, cfg.r, cfg.rule);

  auto one_side = [&](std::span<const double> base, std::span<const double> target, double t) {
    auto residual = [&](const std::vector<double>& v) {
      auto qs = prolong_series<double>(sys, base, v, cfg.r);
      std::vector<double> a(un);
      for (std::size_t i = 0; i < un; ++i) a[i] = eval_poly(qs[i], t, cfg.r) - target[i];
      return a;
    };
    auto jacobian = [&](const std::vector<double>& v) {
      using D = Dual<double>;
      std::vector<D> bd, vd;
      bd.reserve(un);
      vd.reserve(un);
      for (std::size_t i = 0; i < un; ++i) {
        bd.emplace_back(base[i]);
        vd.push_back(D::seeded(v[i], un, i));
      }
      auto qs = prolong_series<D>(sys, bd, vd, cfg.r);
      Mat<double> j(n, n);
      for (std::size_t i = 0; i < un; ++i) {
        D a = eval_poly(qs[i], t, cfg.r);
        for (std::size_t k = 0; k < un; ++k)
          j(static_cast<int>(i), static_cast<int>(k)) = a.partial(k);
      }
      return j;
    };
    std::vector<double> guess(un);
    for (std::size_t i = 0; i < un; ++i) guess[i] = (target[i] - base[i]) / t;
    return newton_solve(residual, jacobian, std::move(guess), cfg.newton);
  };

  auto [v0, rep0] = one_side(q0, q1, h);
  auto [v1, rep1] = one_side(q1, q0, -h);

  TwoPointVelocities tp;
  tp.q0.assign(q0.begin(), q0.end());
  tp.q1.assign(q1.begin(), q1.end());
  tp.v0 = std::move(v0);
  tp.v1 = std::move(v1);
  tp.h = h;
  tp.r = cfg.r;
  tp.report.iterations = rep0.iterations + rep1.iterations;
  tp.report.final_residual = std::max(rep0.final_residual, rep1.final_residual);
  tp.report.converged = rep0.converged && rep1.converged;
  tp.fwd = prolong(sys, q0, tp.v0, cfg.r, true);
  tp.bwd = prolong(sys, q1, tp.v1, cfg.r, true);

  // Implicit differentiation of A(q0, v0~; h) = q1 and B(q1, v1~; -h) = q0.
  auto endpoint_jacobians = [&](const TaylorCoeffs& tc, double t) {
    Mat<double> dq(n, n), dv(n, n);
    double tk = 1.0;
    for (int k = 0; k <= cfg.r; ++k) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          dq(i, j) += tc.dQdq0[static_cast<std::size_t>(k)](i, j) * tk;
          dv(i, j) += tc.dQdv0[static_cast<std::size_t>(k)](i, j) * tk;
        }
      tk *= t;
    }
    return std::pair{dq, dv};
  };
  auto [dA_dq0, dA_dv0] = endpoint_jacobians(tp.fwd, h);
  auto [dB_dq1, dB_dv1] = endpoint_jacobians(tp.bwd, -h);

  tp.dv0_dq1 = lu_invert(dA_dv0);
  tp.dv1_dq0 = lu_invert(dB_dv1);
  Mat<double> m0 = matmul(tp.dv0_dq1, dA_dq0);
  Mat<double> m1 = matmul(tp.dv1_dq0, dB_dq1);
  tp.dv0_dq0 = Mat<double>(n, n);
  tp.dv1_dq1 = Mat<double>(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      tp.dv0_dq0(i, j) = -m0(i, j);
      tp.dv1_dq1(i, j) = -m1(i, j);
    }
  return tp;
}

/// Quadrature-node states blended from the two one-sided expansions:
/// positions to degree r, velocities with coefficient budget r, endpoint
/// nodes reading the boundary data directly.
inline std::vector<std::pair<std::vector<double>, std::vector<double>>> blended_nodes(
    const TwoPointVelocities& tp, const QuadratureRule& rule, double h, int r) {
  if (h != tp.h || r != tp.r)
    throw ConfigError("blended_nodes: h/r do not match the boundary velocity data");
  if (!rule.symmetric) throw ConfigError("blended_nodes: rule must be symmetric");
  const int n = tp.fwd.n;
  const std::size_t un = static_cast<std::size_t>(n);
  std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
  out.reserve(rule.c.size());
  for (double c : rule.c) {
    if (c == 0.0) {
      out.emplace_back(tp.q0, tp.v0);
      continue;
    }
    if (c == 1.0) {
      out.emplace_back(tp.q1, tp.v1);
      continue;
    }
    const double tf = c * h;
    const double tb = -(1.0 - c) * h;
    std::vector<double> q(un), v(un);
    for (int i = 0; i < n; ++i) {
      double qf = tp.fwd.Q(i, r), qb = tp.bwd.Q(i, r);
      for (int k = r - 1; k >= 0; --k) {
        qf = qf * tf + tp.fwd.Q(i, k);
        qb = qb * tb + tp.bwd.Q(i, k);
      }
      double vf = r * tp.fwd.Q(i, r), vb = r * tp.bwd.Q(i, r);
      for (int k = r - 1; k >= 1; --k) {
        vf = vf * tf + k * tp.fwd.Q(i, k);
        vb = vb * tb + k * tp.bwd.Q(i, k);
      }
      q[static_cast<std::size_t>(i)] = c * qf + (1.0 - c) * qb;
      v[static_cast<std::size_t>(i)] = c * vf + (1.0 - c) * vb;
    }
    out.emplace_back(std::move(q), std::move(v));
  }
  return out;
}

/// Symmetric discrete Lagrangian and its endpoint gradients at (q0, q1).
struct SymmetricLagrangianEval {
  double ld = 0.0;
  std::vector<double> d1, d2;
  TwoPointVelocities tp;
};

template <class Sys>
SymmetricLagrangianEval evaluate_symmetric_lagrangian(const Sys& sys, std::span<const double> q0,
                                                      std::span<const double> q1, double h,
                                                      const TviConfig& cfg) {
  SymmetricLagrangianEval out;
  out.tp = solve_boundary_velocities(sys, q0, q1, h, cfg);
  auto parts = detail::sym_parts<Sys, double>(sys, q0, std::span<const double>(out.tp.q1),
                                              std::span<const double>(out.tp.v0),
                                              std::span<const double>(out.tp.v1), h, cfg.r,
                                              cfg.rule);
  out.ld = parts.ld;
  auto [d1, d2] = detail::sym_gradients(parts);
  out.d1 = std::move(d1);
  out.d2 = std::move(d2);
  return out;
}

template <class Sys>
double symmetric_discrete_lagrangian(const Sys& sys, std::span<const double> q0,
                                     std::span<const double> q1, double h, const TviConfig& cfg) {
  return evaluate_symmetric_lagrangian(sys, q0, q1, h, cfg).ld;
}

/// One step of the symmetric integrator: solve the 3n-dimensional system
///   A(q0, v0~; h) - q1 = 0,   B(q1, v1~; -h) - q0 = 0,
///   p0 + D1 ld(q0, q1, v0~, v1~) = 0
/// for (q1, v0~, v1~) jointly, then read p1 = D2 ld.
template <class Sys>
StepResult symmetric_step(const Sys& sys, std::span<const double> q0, std::span<const double> p0,
                          double h, const TviConfig& cfg) {
  const int n = sys.dim();
  const std::size_t un = static_cast<std::size_t>(n);
  detail::validate_symmetric_params(n, q0.size(), p0.size(), h, cfg.r, cfg.rule);

  std::vector<double> v0g = to_velocity(sys, p0);
  auto tc = prolong(sys, q0, v0g, cfg.r + 1);
  std::vector<double> v1g = eval_state(tc, h, cfg.r).second;
  std::vector<double> x(3 * un);
  for (std::size_t i = 0; i < un; ++i) {
    double acc = tc.Q(static_cast<int>(i), cfg.r + 1);
    for (int k = cfg.r; k >= 0; --k) acc = acc * h + tc.Q(static_cast<int>(i), k);
    x[i] = acc;               // q1 guess: explicit Taylor endpoint
    x[un + i] = v0g[i];       // v0~ guess
    x[2 * un + i] = v1g[i];   // v1~ guess: explicit Taylor velocity at h
  }

  auto residual = [&](const std::vector<double>& xc) {
    std::span<const double> q1s(xc.data(), un), v0s(xc.data() + un, un),
        v1s(xc.data() + 2 * un, un);
    auto parts = detail::sym_parts<Sys, double>(sys, q0, q1s, v0s, v1s, h, cfg.r, cfg.rule);
    auto [d1, d2] = detail::sym_gradients(parts);
    std::vector<double> rr(3 * un);
    for (std::size_t i = 0; i < un; ++i) {
      rr[i] = parts.fwd_end[i] - q1s[i];
      rr[un + i] = parts.bwd_end[i] - q0[i];
      rr[2 * un + i] = p0[i] + d1[i];
    }
    return rr;
  };
  auto jacobian = [&](const std::vector<double>& xc) {
    using S = Dual<double>;
    std::vector<S> q1s, v0s, v1s;
    q1s.reserve(un);
    v0s.reserve(un);
    v1s.reserve(un);
    for (std::size_t i = 0; i < un; ++i) q1s.push_back(S::seeded(xc[i], 3 * un, i));
    for (std::size_t i = 0; i < un; ++i)
      v0s.push_back(S::seeded(xc[un + i], 3 * un, un + i));
    for (std::size_t i = 0; i < un; ++i)
      v1s.push_back(S::seeded(xc[2 * un + i], 3 * un, 2 * un + i));
    auto parts = detail::sym_parts<Sys, S>(sys, q0, std::span<const S>(q1s),
                                           std::span<const S>(v0s), std::span<const S>(v1s), h,
                                           cfg.r, cfg.rule);
    auto [d1, d2] = detail::sym_gradients(parts);
    Mat<double> jac(3 * n, 3 * n);
    for (std::size_t i = 0; i < un; ++i) {
      S r1 = parts.fwd_end[i] - q1s[i];
      S r2 = parts.bwd_end[i] - q0[i];
      S r3 = S(p0[i]) + d1[i];
      for (std::size_t j = 0; j < 3 * un; ++j) {
        jac(static_cast<int>(i), static_cast<int>(j)) = r1.partial(j);
        jac(static_cast<int>(un + i), static_cast<int>(j)) = r2.partial(j);
        jac(static_cast<int>(2 * un + i), static_cast<int>(j)) = r3.partial(j);
      }
    }
    return jac;
  };

  auto [sol, report] = newton_solve(residual, jacobian, std::move(x), cfg.newton);

  std::span<const double> q1s(sol.data(), un), v0s(sol.data() + un, un),
      v1s(sol.data() + 2 * un, un);
  auto parts = detail::sym_parts<Sys, double>(sys, q0, q1s, v0s, v1s, h, cfg.r, cfg.rule);
  auto [d1, d2] = detail::sym_gradients(parts);

  StepResult out;
  out.q1.assign(q1s.begin(), q1s.end());
  out.p1 = std::move(d2);
  out.report = report;
  return out;
}

}  // namespace tvi
