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

// Variational integrator built from a Taylor expansion of the Euler-Lagrange
// flow.  One step of order parameters (r, rule):
//
//   1. match the initial velocity v so the degree-(r+1) Taylor polynomial
//      A(q0, v; t) of the flow through (q0, v) hits q1 at t = h,
//   2. approximate the exact discrete Lagrangian by quadrature along that
//      polynomial: ld(q0, v, q1) = h sum_i b_i L(pos(c_i h), vel(c_i h)),
//      with positions truncated to degree r, velocities to coefficient
//      budget r+1, and nodes at c = 1 reading the prescribed endpoint q1,
//   3. step with the discrete Euler-Lagrange / momentum-matching equations
//      p0 = -D1 ld, p1 = D2 ld.
//
// Because v is defined implicitly by the endpoint constraint, the gradients
// of ld carry a multiplier term: with the constraint A(q0, v) = q1,
//   D1 ld = dl/dq0 - (dA/dq0)^T lam,   D2 ld = dl/dq1 + lam,
//   (dA/dv)^T lam = dl/dv.
// All partials come from dual-number seeds, so they are exact; running the
// same assembly with an outer dual scalar yields exact Newton Jacobians.

namespace tvi {

/// Initial velocity matched to a position endpoint pair, with the
/// prolongation it induces and the sensitivities of v to the endpoints.
struct BoundaryVelocity {
  std::vector<double> q0, q1, v0;
  double h = 0.0;
  int r = 0;
  TaylorCoeffs coeffs;  // at (q0, v0), order r+1, with sensitivities
  Mat<double> dv_dq0, dv_dq1;
  SolveReport report;
};

namespace detail {

/// Discrete Lagrangian pieces at (q0, v, q1), generic over the outer scalar
/// S.  Inner duals seed [q0 | v | q1], so every returned partial is exact.
template <class S>
struct LdParts {
  S ld;
  std::vector<S> endpos;           // A(q0, v; h), degree r+1
  Mat<S> dA_dq0, dA_dv;            // partials of endpos
  std::vector<S> dl_dq0, dl_dv, dl_dq1;
};

template <class Sys, class S>
LdParts<S> ld_parts(const Sys& sys, std::span<const double> q0, std::span<const S> v,
                    std::span<const S> q1, double h, int r, const QuadratureRule& rule) {
  using D = Dual<S>;
  const int n = sys.dim();
  const std::size_t un = static_cast<std::size_t>(n);
  const std::size_t m = 3 * un;

  std::vector<D> q0d, vd, q1d;
  q0d.reserve(un);
  vd.reserve(un);
  q1d.reserve(un);
  for (std::size_t i = 0; i < un; ++i) {
    q0d.push_back(D::seeded(S(q0[i]), m, i));
    vd.push_back(D::seeded(v[i], m, un + i));
    q1d.push_back(D::seeded(q1[i], m, 2 * un + i));
  }

  auto qs = prolong_series<D>(sys, q0d, vd, r + 1);

  std::vector<D> pos(un, D(S(0))), vel(un, D(S(0)));
  D acc(S(0));
  for (std::size_t node = 0; node < rule.c.size(); ++node) {
    const double c = rule.c[node];
    const double t = c * h;
    for (std::size_t i = 0; i < un; ++i) {
      pos[i] = (c == 1.0) ? q1d[i] : eval_poly(qs[i], t, r);
      vel[i] = eval_dpoly(qs[i], t, r + 1);
    }
    D lag = kinetic_energy(sys, std::span<const D>(vel)) -
            sys.potential(std::span<const D>(pos));
    acc += rule.b[node] * lag;
  }
  acc = h * acc;

  LdParts<S> P;
  P.ld = acc.val;
  P.dl_dq0.resize(un);
  P.dl_dv.resize(un);
  P.dl_dq1.resize(un);
  for (std::size_t j = 0; j < un; ++j) {
    P.dl_dq0[j] = acc.partial(j);
    P.dl_dv[j] = acc.partial(un + j);
    P.dl_dq1[j] = acc.partial(2 * un + j);
  }
  P.endpos.resize(un);
  P.dA_dq0 = Mat<S>(n, n);
  P.dA_dv = Mat<S>(n, n);
  for (std::size_t i = 0; i < un; ++i) {
    D a = eval_poly(qs[i], h, r + 1);
    P.endpos[i] = a.val;
    for (std::size_t j = 0; j < un; ++j) {
      P.dA_dq0(static_cast<int>(i), static_cast<int>(j)) = a.partial(j);
      P.dA_dv(static_cast<int>(i), static_cast<int>(j)) = a.partial(un + j);
    }
  }
  return P;
}

/// (D1 ld, D2 ld) from the parts via the constraint multiplier.
template <class S>
std::pair<std::vector<S>, std::vector<S>> ld_gradients(const LdParts<S>& P) {
  const std::size_t n = P.endpos.size();
  std::vector<S> lam = lu_solve(transposed(P.dA_dv), P.dl_dv);
  std::vector<S> d1(n), d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    S acc = P.dl_dq0[i];
    for (std::size_t j = 0; j < n; ++j)
      acc -= P.dA_dq0(static_cast<int>(j), static_cast<int>(i)) * lam[j];
    d1[i] = std::move(acc);
    d2[i] = P.dl_dq1[i] + lam[i];
  }
  return {std::move(d1), std::move(d2)};
}

}  // namespace detail

/// Match the initial velocity so the degree-(r+1) Taylor polynomial through
/// (q0, v) reaches q1 at time h.  Also reports dv/dq0 and dv/dq1.
template <class Sys>
BoundaryVelocity solve_initial_velocity(const Sys& sys, std::span<const double> q0,
                                        std::span<const double> q1, double h,
                                        const TviConfig& cfg) {
  const int n = sys.dim();
  const std::size_t un = static_cast<std::size_t>(n);
  detail::validate_step_params(n, q0.size(), q1.size(), h, cfg.r, cfg.rule);

  auto endpoint = [&](const std::vector<double>& v) {
    auto qs = prolong_series<double>(sys, q0, v, cfg.r + 1);
    std::vector<double> a(un);
    for (std::size_t i = 0; i < un; ++i) a[i] = eval_poly(qs[i], h, cfg.r + 1);
    return a;
  };
  auto residual = [&](const std::vector<double>& v) {
    auto a = endpoint(v);
    for (std::size_t i = 0; i < un; ++i) a[i] -= q1[i];
    return a;
  };
  auto jacobian = [&](const std::vector<double>& v) {
    using D = Dual<double>;
    std::vector<D> q0d, vd;
    q0d.reserve(un);
    vd.reserve(un);
    for (std::size_t i = 0; i < un; ++i) {
      q0d.emplace_back(q0[i]);
      vd.push_back(D::seeded(v[i], un, i));
    }
    auto qs = prolong_series<D>(sys, q0d, vd, cfg.r + 1);
    Mat<double> j(n, n);
    for (std::size_t i = 0; i < un; ++i) {
      D a = eval_poly(qs[i], h, cfg.r + 1);
      for (std::size_t k = 0; k < un; ++k)
        j(static_cast<int>(i), static_cast<int>(k)) = a.partial(k);
    }
    return j;
  };

  std::vector<double> guess(un);
  for (std::size_t i = 0; i < un; ++i) guess[i] = (q1[i] - q0[i]) / h;
  auto [v, report] = newton_solve(residual, jacobian, std::move(guess), cfg.newton);

  BoundaryVelocity bv;
  bv.q0.assign(q0.begin(), q0.end());
  bv.q1.assign(q1.begin(), q1.end());
  bv.v0 = v;
  bv.h = h;
  bv.r = cfg.r;
  bv.report = report;
  bv.coeffs = prolong(sys, q0, v, cfg.r + 1, true);
  Mat<double> dA_dq0(n, n), dA_dv(n, n);
  double hk = 1.0;
  for (int k = 0; k <= cfg.r + 1; ++k) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        dA_dq0(i, j) += bv.coeffs.dQdq0[static_cast<std::size_t>(k)](i, j) * hk;
        dA_dv(i, j) += bv.coeffs.dQdv0[static_cast<std::size_t>(k)](i, j) * hk;
      }
    hk *= h;
  }
  bv.dv_dq1 = lu_invert(dA_dv);
  Mat<double> prod = matmul(bv.dv_dq1, dA_dq0);
  bv.dv_dq0 = Mat<double>(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) bv.dv_dq0(i, j) = -prod(i, j);
  return bv;
}

/// Quadrature-node states induced by a matched boundary velocity: positions
/// truncated to degree r (nodes at c = 1 read the stored endpoint exactly),
/// velocities with coefficient budget r+1.
inline std::vector<std::pair<std::vector<double>, std::vector<double>>> nodal_states(
    const BoundaryVelocity& bv, const QuadratureRule& rule, double h, int r) {
  if (h != bv.h || r != bv.r)
    throw ConfigError("nodal_states: h/r do not match the boundary velocity data");
  std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
  out.reserve(rule.c.size());
  for (double c : rule.c) {
    auto [q, v] = eval_state(bv.coeffs, c * h, r);
    if (c == 1.0) q = bv.q1;
    out.emplace_back(std::move(q), std::move(v));
  }
  return out;
}

/// Discrete Lagrangian and its endpoint gradients at (q0, q1).
struct DiscreteLagrangianEval {
  double ld = 0.0;
  std::vector<double> d1, d2;
  BoundaryVelocity bv;
};

template <class Sys>
DiscreteLagrangianEval evaluate_discrete_lagrangian(const Sys& sys, std::span<const double> q0,
                                                    std::span<const double> q1, double h,
                                                    const TviConfig& cfg) {
  DiscreteLagrangianEval out;
  out.bv = solve_initial_velocity(sys, q0, q1, h, cfg);
  auto parts = detail::ld_parts<Sys, double>(sys, q0, std::span<const double>(out.bv.v0), q1, h,
                                             cfg.r, cfg.rule);
  out.ld = parts.ld;
  auto [d1, d2] = detail::ld_gradients(parts);
  out.d1 = std::move(d1);
  out.d2 = std::move(d2);
  return out;
}

template <class Sys>
double discrete_lagrangian(const Sys& sys, std::span<const double> q0, std::span<const double> q1,
                           double h, const TviConfig& cfg) {
  return evaluate_discrete_lagrangian(sys, q0, q1, h, cfg).ld;
}

template <class Sys>
std::vector<double> d1_discrete_lagrangian(const Sys& sys, std::span<const double> q0,
                                           std::span<const double> q1, double h,
                                           const TviConfig& cfg) {
  return evaluate_discrete_lagrangian(sys, q0, q1, h, cfg).d1;
}

template <class Sys>
std::vector<double> d2_discrete_lagrangian(const Sys& sys, std::span<const double> q0,
                                           std::span<const double> q1, double h,
                                           const TviConfig& cfg) {
  return evaluate_discrete_lagrangian(sys, q0, q1, h, cfg).d2;
}

/// One step of the variational integrator: solve the 2n-dimensional system
///   A(q0, v; h) - q1 = 0,   p0 + D1 ld(q0, v, q1) = 0
/// for (q1, v) jointly, then read p1 = D2 ld.  The Newton matrix is exact
/// (assembled with an outer dual scalar through the same code path).
template <class Sys>
StepResult step(const Sys& sys, std::span<const double> q0, std::span<const double> p0, double h,
                const TviConfig& cfg) {
  const int n = sys.dim();
  const std::size_t un = static_cast<std::size_t>(n);
  detail::validate_step_params(n, q0.size(), p0.size(), h, cfg.r, cfg.rule);

  std::vector<double> v0g = to_velocity(sys, p0);
  auto tc = prolong(sys, q0, v0g, cfg.r + 1);
  std::vector<double> x(2 * un);
  for (std::size_t i = 0; i < un; ++i) {
    double acc = tc.Q(static_cast<int>(i), cfg.r + 1);
    for (int k = cfg.r; k >= 0; --k) acc = acc * h + tc.Q(static_cast<int>(i), k);
    x[i] = acc;             // q1 guess: explicit Taylor endpoint
    x[un + i] = v0g[i];     // v guess
  }

  auto residual = [&](const std::vector<double>& xc) {
    std::span<const double> q1s(xc.data(), un), vs(xc.data() + un, un);
    auto parts = detail::ld_parts<Sys, double>(sys, q0, vs, q1s, h, cfg.r, cfg.rule);
    auto [d1, d2] = detail::ld_gradients(parts);
    std::vector<double> rr(2 * un);
    for (std::size_t i = 0; i < un; ++i) {
      rr[i] = parts.endpos[i] - q1s[i];
      rr[un + i] = p0[i] + d1[i];
    }
    return rr;
  };
  auto jacobian = [&](const std::vector<double>& xc) {
    using S = Dual<double>;
    std::vector<S> q1s, vs;
    q1s.reserve(un);
    vs.reserve(un);
    for (std::size_t i = 0; i < un; ++i) q1s.push_back(S::seeded(xc[i], 2 * un, i));
    for (std::size_t i = 0; i < un; ++i) vs.push_back(S::seeded(xc[un + i], 2 * un, un + i));
    auto parts = detail::ld_parts<Sys, S>(sys, q0, std::span<const S>(vs),
                                          std::span<const S>(q1s), h, cfg.r, cfg.rule);
    auto [d1, d2] = detail::ld_gradients(parts);
    Mat<double> jac(2 * n, 2 * n);
    for (std::size_t i = 0; i < un; ++i) {
      S r1 = parts.endpos[i] - q1s[i];
      S r2 = S(p0[i]) + d1[i];
      for (std::size_t j = 0; j < 2 * un; ++j) {
        jac(static_cast<int>(i), static_cast<int>(j)) = r1.partial(j);
        jac(static_cast<int>(un + i), static_cast<int>(j)) = r2.partial(j);
      }
    }
    return jac;
  };

  auto [sol, report] = newton_solve(residual, jacobian, std::move(x), cfg.newton);

  std::span<const double> q1s(sol.data(), un), vs(sol.data() + un, un);
  auto parts = detail::ld_parts<Sys, double>(sys, q0, vs, q1s, h, cfg.r, cfg.rule);
  auto [d1, d2] = detail::ld_gradients(parts);

  StepResult out;
  out.q1.assign(q1s.begin(), q1s.end());
  out.p1 = std::move(d2);
  out.report = report;
  return out;
}

}  // namespace tvi
