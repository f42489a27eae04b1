#pragma once

#include <algorithm>
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

// Hamiltonian Taylor variational integrators.  The discrete generating
// functions are quadrature approximations of the exact boundary generators
//
//   H+(q0, p1; h) =  p1^T q(h)  - integral of L,   p0 =  D1 H+,  q1 =  D2 H+,
//   H-(q1, p0; h) = -p0^T q(0)  - integral of L,   p1 = -D1 H-,  q0 = -D2 H-,
//
// each built on a Taylor polynomial of the flow.  The right function expands
// at (q0, M^-1 pt0) with the auxiliary momentum pt0 chosen so the momentum
// polynomial M q'(t) (coefficient budget r+1) hits the prescribed p1 at
// t = h; a node at c = 1 reads the degree-(r+1) position endpoint q~1, which
// also carries the boundary term p1^T q~1.  The left function expands at
// (q~0, M^-1 p0) with q~0 chosen so the degree-(r+1) position polynomial
// hits the prescribed q1 at t = h; a node at c = 1 reads q1 itself.
// Interior nodes truncate positions to degree r and velocities to
// coefficient budget r+1, exactly as in the Lagrangian scheme, and the
// integrand is p^T qdot - H = (1/2) v^T M v - V(q) after inverting the
// Legendre transform at each node.
//
// The auxiliary variable is hidden behind its defining constraint, so the
// gradients carry a multiplier, mirroring the Lagrangian module:
//   (dF/dpt0)^T mu = -dS/dpt0,  D1 H+ = dS/dq0 + (dF/dq0)^T mu,
//                               D2 H+ = dS/dp1 - mu,
// with S the assembled scalar and F the constrained endpoint; analogously
// for H- with multiplier nu against the position endpoint.  D1 H- denotes
// the q1-gradient (momentum-valued) and D2 H- the p0-gradient
// (position-valued), so each update equation pairs slots of equal dimension.
//
// At r = 0 with the trapezoid rule the two maps are exact adjoints,
//   -H+(q1, p0; -h) = H-(q1, p0; h),
// and composing a right half-step with a left half-step gives the symmetric
// method svhd_step at the bottom of this header.

namespace tvi {

/// Phase-space Taylor data at (q0, p0): the position prolongation through
/// (q0, M^-1 p0).  The momentum polynomial is M q'(t) throughout, so its
/// coefficients are the velocity coefficients mapped through the mass
/// matrix and no separate recurrence is needed.
struct HamJet {
  std::vector<double> p0;
  TaylorCoeffs pos;
};

template <class Sys>
HamJet ham_prolong(const Sys& sys, std::span<const double> q0, std::span<const double> p0,
                   int K, bool with_sensitivities = false) {
  HamJet jet;
  jet.p0.assign(p0.begin(), p0.end());
  std::vector<double> v0 = to_velocity(sys, p0);
  jet.pos = prolong(sys, q0, v0, K, with_sensitivities);
  return jet;
}

/// Momentum polynomial value M q'(t), using velocity coefficients 1..budget.
template <class Sys>
std::vector<double> momentum_at(const Sys& sys, const HamJet& jet, double t, int budget) {
  if (budget < 0 || budget > jet.pos.order)
    throw ConfigError("momentum_at: coefficient budget out of range");
  const std::size_t un = static_cast<std::size_t>(jet.pos.n);
  std::vector<double> v(un, 0.0);
  for (std::size_t i = 0; i < un; ++i) {
    double acc = 0.0;
    for (int k = budget; k >= 1; --k) acc = acc * t + k * jet.pos.Q(static_cast<int>(i), k);
    v[i] = acc;
  }
  return to_momentum(sys, v);
}

/// Auxiliary initial momentum matched so the momentum polynomial reaches p1
/// at time h, with the induced jet and the sensitivities of pt0.
struct BoundaryMomentum {
  std::vector<double> q0, p1, p0tilde;
  double h = 0.0;
  int r = 0;
  HamJet jet;  // at (q0, p0tilde), order r+1, with sensitivities
  Mat<double> dp_dq0, dp_dp1;
  SolveReport report;
};

/// Auxiliary base position matched so the position polynomial from
/// (q0tilde, M^-1 p0) reaches q1 at time h.
struct LeftBoundary {
  std::vector<double> q1, p0, q0tilde;
  double h = 0.0;
  int r = 0;
  HamJet jet;  // at (q0tilde, p0), order r+1, with sensitivities
  Mat<double> dq_dq1, dq_dp0;
  SolveReport report;
};

namespace detail {

/// Right generating function pieces at (q0, pt0, p1), generic over the
/// outer scalar S.  Inner duals seed [q0 | pt0 | p1].
template <class S>
struct RightParts {
  S hval;
  std::vector<S> F;       // momentum endpoint M q'(h), coefficient budget r+1
  std::vector<S> endpos;  // q~1, position endpoint at full degree r+1
  Mat<S> dF_dq0, dF_dpt;
  std::vector<S> dH_dq0, dH_dpt, dH_dp1;
};

template <class Sys, class S>
RightParts<S> right_parts(const Sys& sys, std::span<const double> q0, std::span<const S> pt0,
                          std::span<const S> p1, double h, int r, const QuadratureRule& rule) {
  using D = Dual<S>;
  const std::size_t un = q0.size();
  const std::size_t m = 3 * un;

  std::vector<D> q0d, ptd, p1d;
  q0d.reserve(un);
  ptd.reserve(un);
  p1d.reserve(un);
  for (std::size_t i = 0; i < un; ++i) {
    q0d.push_back(D::seeded(S(q0[i]), m, i));
    ptd.push_back(D::seeded(pt0[i], m, un + i));
    p1d.push_back(D::seeded(p1[i], m, 2 * un + i));
  }
  std::vector<D> v0d = apply_minv(sys, std::span<const D>(ptd));
  auto qs = prolong_series<D>(sys, q0d, v0d, r + 1);

  std::vector<D> velh(un, D(S(0))), qt1(un, D(S(0)));
  for (std::size_t i = 0; i < un; ++i) {
    velh[i] = eval_dpoly(qs[i], h, r + 1);
    qt1[i] = eval_poly(qs[i], h, r + 1);
  }
  std::vector<D> Fd = apply_mass(sys, std::span<const D>(velh));

  std::vector<D> pos(un, D(S(0))), vel(un, D(S(0)));
  D acc(S(0));
  for (std::size_t node = 0; node < rule.c.size(); ++node) {
    const double c = rule.c[node];
    const double t = c * h;
    for (std::size_t i = 0; i < un; ++i) {
      pos[i] = (c == 1.0) ? qt1[i] : eval_poly(qs[i], t, r);
      vel[i] = eval_dpoly(qs[i], t, r + 1);
    }
    D lag = kinetic_energy(sys, std::span<const D>(vel)) -
            sys.potential(std::span<const D>(pos));
    acc += rule.b[node] * lag;
  }
  D hexpr = (-h) * acc;
  for (std::size_t i = 0; i < un; ++i) hexpr += p1d[i] * qt1[i];

  const int n = static_cast<int>(un);
  RightParts<S> P;
  P.hval = hexpr.val;
  P.dH_dq0.resize(un);
  P.dH_dpt.resize(un);
  P.dH_dp1.resize(un);
  for (std::size_t j = 0; j < un; ++j) {
    P.dH_dq0[j] = hexpr.partial(j);
    P.dH_dpt[j] = hexpr.partial(un + j);
    P.dH_dp1[j] = hexpr.partial(2 * un + j);
  }
  P.F.resize(un);
  P.endpos.resize(un);
  P.dF_dq0 = Mat<S>(n, n);
  P.dF_dpt = Mat<S>(n, n);
  for (std::size_t i = 0; i < un; ++i) {
    P.F[i] = Fd[i].val;
    P.endpos[i] = qt1[i].val;
    for (std::size_t j = 0; j < un; ++j) {
      P.dF_dq0(static_cast<int>(i), static_cast<int>(j)) = Fd[i].partial(j);
      P.dF_dpt(static_cast<int>(i), static_cast<int>(j)) = Fd[i].partial(un + j);
    }
  }
  return P;
}

/// (D1 H+, D2 H+) from the parts via the constraint multiplier.
template <class S>
std::pair<std::vector<S>, std::vector<S>> right_gradients(const RightParts<S>& P) {
  const std::size_t n = P.F.size();
  std::vector<S> rhs(n, S(0));
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -P.dH_dpt[i];
  std::vector<S> mu = lu_solve(transposed(P.dF_dpt), rhs);
  std::vector<S> d1(n, S(0)), d2(n, S(0));
  for (std::size_t i = 0; i < n; ++i) {
    S acc = P.dH_dq0[i];
    for (std::size_t j = 0; j < n; ++j)
      acc += P.dF_dq0(static_cast<int>(j), static_cast<int>(i)) * mu[j];
    d1[i] = std::move(acc);
    d2[i] = P.dH_dp1[i] - mu[i];
  }
  return {std::move(d1), std::move(d2)};
}

/// Left generating function pieces at (qt0, p0, q1); seeds [qt0 | p0 | q1].
template <class S>
struct LeftParts {
  S hval;
  std::vector<S> F;  // position endpoint, full degree r+1
  Mat<S> dF_dqt, dF_dp0;
  std::vector<S> dH_dqt, dH_dp0, dH_dq1;
};

template <class Sys, class S>
LeftParts<S> left_parts(const Sys& sys, std::span<const S> qt0, std::span<const double> p0,
                        std::span<const S> q1, double h, int r, const QuadratureRule& rule) {
  using D = Dual<S>;
  const std::size_t un = p0.size();
  const std::size_t m = 3 * un;

  std::vector<D> qtd, p0d, q1d;
  qtd.reserve(un);
  p0d.reserve(un);
  q1d.reserve(un);
  for (std::size_t i = 0; i < un; ++i) {
    qtd.push_back(D::seeded(qt0[i], m, i));
    p0d.push_back(D::seeded(S(p0[i]), m, un + i));
    q1d.push_back(D::seeded(q1[i], m, 2 * un + i));
  }
  std::vector<D> v0d = apply_minv(sys, std::span<const D>(p0d));
  auto qs = prolong_series<D>(sys, qtd, v0d, r + 1);

  std::vector<D> Fd(un, D(S(0)));
  for (std::size_t i = 0; i < un; ++i) Fd[i] = eval_poly(qs[i], h, r + 1);

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
  D hexpr = (-h) * acc;
  for (std::size_t i = 0; i < un; ++i) hexpr -= p0d[i] * qtd[i];

  const int n = static_cast<int>(un);
  LeftParts<S> P;
  P.hval = hexpr.val;
  P.dH_dqt.resize(un);
  P.dH_dp0.resize(un);
  P.dH_dq1.resize(un);
  for (std::size_t j = 0; j < un; ++j) {
    P.dH_dqt[j] = hexpr.partial(j);
    P.dH_dp0[j] = hexpr.partial(un + j);
    P.dH_dq1[j] = hexpr.partial(2 * un + j);
  }
  P.F.resize(un);
  P.dF_dqt = Mat<S>(n, n);
  P.dF_dp0 = Mat<S>(n, n);
  for (std::size_t i = 0; i < un; ++i) {
    P.F[i] = Fd[i].val;
    for (std::size_t j = 0; j < un; ++j) {
      P.dF_dqt(static_cast<int>(i), static_cast<int>(j)) = Fd[i].partial(j);
      P.dF_dp0(static_cast<int>(i), static_cast<int>(j)) = Fd[i].partial(un + j);
    }
  }
  return P;
}

/// (D1 H-, D2 H-): the q1-gradient and the p0-gradient.
template <class S>
std::pair<std::vector<S>, std::vector<S>> left_gradients(const LeftParts<S>& P) {
  const std::size_t n = P.F.size();
  std::vector<S> rhs(n, S(0));
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -P.dH_dqt[i];
  std::vector<S> nu = lu_solve(transposed(P.dF_dqt), rhs);
  std::vector<S> d1(n, S(0)), d2(n, S(0));
  for (std::size_t i = 0; i < n; ++i) {
    d1[i] = P.dH_dq1[i] - nu[i];
    S acc = P.dH_dp0[i];
    for (std::size_t j = 0; j < n; ++j)
      acc += P.dF_dp0(static_cast<int>(j), static_cast<int>(i)) * nu[j];
    d2[i] = std::move(acc);
  }
  return {std::move(d1), std::move(d2)};
}

}  // namespace detail

/// Match the auxiliary momentum pt0 so that M q'(h) = p1 along the Taylor
/// polynomial through (q0, M^-1 pt0).  Also reports dpt0/dq0 and dpt0/dp1.
template <class Sys>
BoundaryMomentum solve_initial_momentum(const Sys& sys, std::span<const double> q0,
                                        std::span<const double> p1, double h,
                                        const TviConfig& cfg) {
  const int n = sys.dim();
  const std::size_t un = static_cast<std::size_t>(n);
  detail::validate_step_params(n, q0.size(), p1.size(), h, cfg.r, cfg.rule);

  auto residual = [&](const std::vector<double>& pt) {
    std::vector<double> v0 = to_velocity(sys, pt);
    auto qs = prolong_series<double>(sys, q0, v0, cfg.r + 1);
    std::vector<double> vh(un);
    for (std::size_t i = 0; i < un; ++i) vh[i] = eval_dpoly(qs[i], h, cfg.r + 1);
    std::vector<double> f = to_momentum(sys, vh);
    for (std::size_t i = 0; i < un; ++i) f[i] -= p1[i];
    return f;
  };
  auto jacobian = [&](const std::vector<double>& pt) {
    using D = Dual<double>;
    std::vector<D> q0d, ptd;
    q0d.reserve(un);
    ptd.reserve(un);
    for (std::size_t i = 0; i < un; ++i) {
      q0d.emplace_back(q0[i]);
      ptd.push_back(D::seeded(pt[i], un, i));
    }
    std::vector<D> v0d = detail::apply_minv(sys, std::span<const D>(ptd));
    auto qs = prolong_series<D>(sys, q0d, v0d, cfg.r + 1);
    std::vector<D> vh(un, D(0.0));
    for (std::size_t i = 0; i < un; ++i) vh[i] = eval_dpoly(qs[i], h, cfg.r + 1);
    std::vector<D> f = detail::apply_mass(sys, std::span<const D>(vh));
    Mat<double> j(n, n);
    for (std::size_t i = 0; i < un; ++i)
      for (std::size_t k = 0; k < un; ++k)
        j(static_cast<int>(i), static_cast<int>(k)) = f[i].partial(k);
    return j;
  };

  std::vector<double> guess(p1.begin(), p1.end());
  auto [pt, report] = newton_solve(residual, jacobian, std::move(guess), cfg.newton);

  BoundaryMomentum bm;
  bm.q0.assign(q0.begin(), q0.end());
  bm.p1.assign(p1.begin(), p1.end());
  bm.p0tilde = pt;
  bm.h = h;
  bm.r = cfg.r;
  bm.report = report;
  bm.jet = ham_prolong(sys, q0, pt, cfg.r + 1, true);

  // F = M sum_{k>=1} k Q_k h^{k-1}; chain the stored coefficient Jacobians.
  Mat<double> sum_q(n, n), sum_v(n, n);
  double hk = 1.0;
  for (int k = 1; k <= cfg.r + 1; ++k) {
    const auto& jq = bm.jet.pos.dQdq0[static_cast<std::size_t>(k)];
    const auto& jv = bm.jet.pos.dQdv0[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        sum_q(i, j) += k * jq(i, j) * hk;
        sum_v(i, j) += k * jv(i, j) * hk;
      }
    hk *= h;
  }
  const auto& md = sys.mass_data();
  Mat<double> dF_dq0 = matmul(md.M, sum_q);
  Mat<double> dF_dpt = matmul(matmul(md.M, sum_v), md.Minv);
  bm.dp_dp1 = lu_invert(dF_dpt);
  Mat<double> prod = matmul(bm.dp_dp1, dF_dq0);
  bm.dp_dq0 = Mat<double>(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) bm.dp_dq0(i, j) = -prod(i, j);
  return bm;
}

/// Match the auxiliary base position q0tilde so the position polynomial
/// through (q0tilde, M^-1 p0) reaches q1 at time h.
template <class Sys>
LeftBoundary solve_initial_position(const Sys& sys, std::span<const double> q1,
                                    std::span<const double> p0, double h, const TviConfig& cfg) {
  const int n = sys.dim();
  const std::size_t un = static_cast<std::size_t>(n);
  detail::validate_step_params(n, q1.size(), p0.size(), h, cfg.r, cfg.rule);

  std::vector<double> v0 = to_velocity(sys, p0);
  auto residual = [&](const std::vector<double>& qt) {
    auto qs = prolong_series<double>(sys, qt, v0, cfg.r + 1);
    std::vector<double> f(un);
    for (std::size_t i = 0; i < un; ++i) f[i] = eval_poly(qs[i], h, cfg.r + 1) - q1[i];
    return f;
  };
  auto jacobian = [&](const std::vector<double>& qt) {
    using D = Dual<double>;
    std::vector<D> qtd, v0d;
    qtd.reserve(un);
    v0d.reserve(un);
    for (std::size_t i = 0; i < un; ++i) {
      qtd.push_back(D::seeded(qt[i], un, i));
      v0d.emplace_back(v0[i]);
    }
    auto qs = prolong_series<D>(sys, qtd, v0d, cfg.r + 1);
    Mat<double> j(n, n);
    for (std::size_t i = 0; i < un; ++i) {
      D f = eval_poly(qs[i], h, cfg.r + 1);
      for (std::size_t k = 0; k < un; ++k)
        j(static_cast<int>(i), static_cast<int>(k)) = f.partial(k);
    }
    return j;
  };

  std::vector<double> guess(un);
  for (std::size_t i = 0; i < un; ++i) guess[i] = q1[i] - h * v0[i];
  auto [qt, report] = newton_solve(residual, jacobian, std::move(guess), cfg.newton);

  LeftBoundary lb;
  lb.q1.assign(q1.begin(), q1.end());
  lb.p0.assign(p0.begin(), p0.end());
  lb.q0tilde = qt;
  lb.h = h;
  lb.r = cfg.r;
  lb.report = report;
  lb.jet = ham_prolong(sys, qt, p0, cfg.r + 1, true);

  // F = sum_k Q_k h^k; chain the stored coefficient Jacobians.
  Mat<double> sum_q(n, n), sum_v(n, n);
  double hk = 1.0;
  for (int k = 0; k <= cfg.r + 1; ++k) {
    const auto& jq = lb.jet.pos.dQdq0[static_cast<std::size_t>(k)];
    const auto& jv = lb.jet.pos.dQdv0[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        sum_q(i, j) += jq(i, j) * hk;
        sum_v(i, j) += jv(i, j) * hk;
      }
    hk *= h;
  }
  const auto& md = sys.mass_data();
  Mat<double> dF_dp0 = matmul(sum_v, md.Minv);
  lb.dq_dq1 = lu_invert(sum_q);
  Mat<double> prod = matmul(lb.dq_dq1, dF_dp0);
  lb.dq_dp0 = Mat<double>(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) lb.dq_dp0(i, j) = -prod(i, j);
  return lb;
}

/// Discrete right Hamiltonian and its gradients at (q0, p1).
struct RightHamiltonianEval {
  double value = 0.0;
  std::vector<double> d1, d2;  // gradients w.r.t. q0 and p1
  BoundaryMomentum bm;
};

template <class Sys>
RightHamiltonianEval evaluate_discrete_right_hamiltonian(const Sys& sys,
                                                         std::span<const double> q0,
                                                         std::span<const double> p1, double h,
                                                         const TviConfig& cfg) {
  RightHamiltonianEval out;
  out.bm = solve_initial_momentum(sys, q0, p1, h, cfg);
  auto parts = detail::right_parts<Sys, double>(
      sys, q0, std::span<const double>(out.bm.p0tilde), p1, h, cfg.r, cfg.rule);
  out.value = parts.hval;
  auto [d1, d2] = detail::right_gradients(parts);
  out.d1 = std::move(d1);
  out.d2 = std::move(d2);
  return out;
}

template <class Sys>
double discrete_right_hamiltonian(const Sys& sys, std::span<const double> q0,
                                  std::span<const double> p1, double h, const TviConfig& cfg) {
  return evaluate_discrete_right_hamiltonian(sys, q0, p1, h, cfg).value;
}

/// Discrete left Hamiltonian and its gradients at (q1, p0).
struct LeftHamiltonianEval {
  double value = 0.0;
  std::vector<double> d1, d2;  // gradients w.r.t. q1 and p0
  LeftBoundary lb;
};

template <class Sys>
LeftHamiltonianEval evaluate_discrete_left_hamiltonian(const Sys& sys, std::span<const double> q1,
                                                       std::span<const double> p0, double h,
                                                       const TviConfig& cfg) {
  LeftHamiltonianEval out;
  out.lb = solve_initial_position(sys, q1, p0, h, cfg);
  auto parts = detail::left_parts<Sys, double>(
      sys, std::span<const double>(out.lb.q0tilde), p0, q1, h, cfg.r, cfg.rule);
  out.value = parts.hval;
  auto [d1, d2] = detail::left_gradients(parts);
  out.d1 = std::move(d1);
  out.d2 = std::move(d2);
  return out;
}

template <class Sys>
double discrete_left_hamiltonian(const Sys& sys, std::span<const double> q1,
                                 std::span<const double> p0, double h, const TviConfig& cfg) {
  return evaluate_discrete_left_hamiltonian(sys, q1, p0, h, cfg).value;
}

/// One step of the right Hamiltonian integrator: solve the 2n-dimensional
/// system
///   F(q0, pt0) - p1 = 0,   p0 - D1 H+(q0, pt0, p1) = 0
/// for (p1, pt0) jointly, then read q1 = D2 H+.
template <class Sys>
StepResult step_right(const Sys& sys, std::span<const double> q0, std::span<const double> p0,
                      double h, const TviConfig& cfg) {
  const std::size_t un = q0.size();
  detail::validate_step_params(sys.dim(), q0.size(), p0.size(), h, cfg.r, cfg.rule);

  HamJet jet = ham_prolong(sys, q0, p0, cfg.r + 1);
  std::vector<double> p1g = momentum_at(sys, jet, h, cfg.r + 1);
  std::vector<double> x(2 * un);
  for (std::size_t i = 0; i < un; ++i) {
    x[i] = p1g[i];      // p1 guess: Taylor flow endpoint momentum
    x[un + i] = p0[i];  // pt0 guess
  }

  auto residual = [&](const std::vector<double>& xc) {
    std::span<const double> p1s(xc.data(), un), pts(xc.data() + un, un);
    auto parts = detail::right_parts<Sys, double>(sys, q0, pts, p1s, h, cfg.r, cfg.rule);
    auto [d1, d2] = detail::right_gradients(parts);
    std::vector<double> rr(2 * un);
    for (std::size_t i = 0; i < un; ++i) {
      rr[i] = parts.F[i] - p1s[i];
      rr[un + i] = p0[i] - d1[i];
    }
    return rr;
  };
  auto jacobian = [&](const std::vector<double>& xc) {
    using S = Dual<double>;
    std::vector<S> p1s, pts;
    p1s.reserve(un);
    pts.reserve(un);
    for (std::size_t i = 0; i < un; ++i) p1s.push_back(S::seeded(xc[i], 2 * un, i));
    for (std::size_t i = 0; i < un; ++i) pts.push_back(S::seeded(xc[un + i], 2 * un, un + i));
    auto parts = detail::right_parts<Sys, S>(sys, q0, std::span<const S>(pts),
                                             std::span<const S>(p1s), h, cfg.r, cfg.rule);
    auto [d1, d2] = detail::right_gradients(parts);
    const int n2 = static_cast<int>(2 * un);
    Mat<double> jac(n2, n2);
    for (std::size_t i = 0; i < un; ++i) {
      S r1 = parts.F[i] - p1s[i];
      S r2 = S(p0[i]) - d1[i];
      for (std::size_t j = 0; j < 2 * un; ++j) {
        jac(static_cast<int>(i), static_cast<int>(j)) = r1.partial(j);
        jac(static_cast<int>(un + i), static_cast<int>(j)) = r2.partial(j);
      }
    }
    return jac;
  };

  auto [sol, report] = newton_solve(residual, jacobian, std::move(x), cfg.newton);

  std::span<const double> p1s(sol.data(), un), pts(sol.data() + un, un);
  auto parts = detail::right_parts<Sys, double>(sys, q0, pts, p1s, h, cfg.r, cfg.rule);
  auto [d1, d2] = detail::right_gradients(parts);

  StepResult out;
  out.q1 = std::move(d2);
  out.p1.assign(p1s.begin(), p1s.end());
  out.report = report;
  return out;
}

/// One step of the left Hamiltonian integrator: solve
///   F(qt0, p0) - q1 = 0,   q0 + D2 H-(qt0, p0, q1) = 0
/// for (q1, qt0) jointly, then read p1 = -D1 H-.
template <class Sys>
StepResult step_left(const Sys& sys, std::span<const double> q0, std::span<const double> p0,
                     double h, const TviConfig& cfg) {
  const std::size_t un = q0.size();
  detail::validate_step_params(sys.dim(), q0.size(), p0.size(), h, cfg.r, cfg.rule);

  HamJet jet = ham_prolong(sys, q0, p0, cfg.r + 1);
  std::vector<double> x(2 * un);
  for (std::size_t i = 0; i < un; ++i) {
    double acc = jet.pos.Q(static_cast<int>(i), cfg.r + 1);
    for (int k = cfg.r; k >= 0; --k) acc = acc * h + jet.pos.Q(static_cast<int>(i), k);
    x[i] = acc;        // q1 guess: explicit Taylor endpoint
    x[un + i] = q0[i]; // qt0 guess
  }

  auto residual = [&](const std::vector<double>& xc) {
    std::span<const double> q1s(xc.data(), un), qts(xc.data() + un, un);
    auto parts = detail::left_parts<Sys, double>(sys, qts, p0, q1s, h, cfg.r, cfg.rule);
    auto [d1, d2] = detail::left_gradients(parts);
    std::vector<double> rr(2 * un);
    for (std::size_t i = 0; i < un; ++i) {
      rr[i] = parts.F[i] - q1s[i];
      rr[un + i] = q0[i] + d2[i];
    }
    return rr;
  };
  auto jacobian = [&](const std::vector<double>& xc) {
    using S = Dual<double>;
    std::vector<S> q1s, qts;
    q1s.reserve(un);
    qts.reserve(un);
    for (std::size_t i = 0; i < un; ++i) q1s.push_back(S::seeded(xc[i], 2 * un, i));
    for (std::size_t i = 0; i < un; ++i) qts.push_back(S::seeded(xc[un + i], 2 * un, un + i));
    auto parts = detail::left_parts<Sys, S>(sys, std::span<const S>(qts), p0,
                                            std::span<const S>(q1s), h, cfg.r, cfg.rule);
    auto [d1, d2] = detail::left_gradients(parts);
    const int n2 = static_cast<int>(2 * un);
    Mat<double> jac(n2, n2);
    for (std::size_t i = 0; i < un; ++i) {
      S r1 = parts.F[i] - q1s[i];
      S r2 = S(q0[i]) + d2[i];
      for (std::size_t j = 0; j < 2 * un; ++j) {
        jac(static_cast<int>(i), static_cast<int>(j)) = r1.partial(j);
        jac(static_cast<int>(un + i), static_cast<int>(j)) = r2.partial(j);
      }
    }
    return jac;
  };

  auto [sol, report] = newton_solve(residual, jacobian, std::move(x), cfg.newton);

  std::span<const double> q1s(sol.data(), un), qts(sol.data() + un, un);
  auto parts = detail::left_parts<Sys, double>(sys, qts, p0, q1s, h, cfg.r, cfg.rule);
  auto [d1, d2] = detail::left_gradients(parts);

  StepResult out;
  out.q1.assign(q1s.begin(), q1s.end());
  out.p1.resize(un);
  for (std::size_t i = 0; i < un; ++i) out.p1[i] = -d1[i];
  out.report = report;
  return out;
}

/// Symmetric composition of the two maps at r = 0, trapezoid rule: a right
/// half-step followed by a left half-step (or the reverse).  The halves are
/// exact adjoints, so the composite is its own adjoint.
template <class Sys>
StepResult svhd_step(const Sys& sys, std::span<const double> q0, std::span<const double> p0,
                     double h, const NewtonConfig& newton = {}, bool right_first = true) {
  TviConfig cfg;
  cfg.r = 0;
  cfg.rule = make_rule(RuleKind::trapezoid);
  cfg.newton = newton;
  const double hh = 0.5 * h;
  StepResult a = right_first ? step_right(sys, q0, p0, hh, cfg) : step_left(sys, q0, p0, hh, cfg);
  StepResult b =
      right_first ? step_left(sys, a.q1, a.p1, hh, cfg) : step_right(sys, a.q1, a.p1, hh, cfg);
  b.report.iterations += a.report.iterations;
  b.report.final_residual = std::max(a.report.final_residual, b.report.final_residual);
  b.report.converged = a.report.converged && b.report.converged;
  return b;
}

}  // namespace tvi
