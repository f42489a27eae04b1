#pragma once

#include <span>
#include <vector>

#include "tvi/errors.hpp"
#include "tvi/jets.hpp"
#include "tvi/systems.hpp"

// Reference one-step maps written as straight-line formulas.  The
// symplectic-Euler pair and Stormer-Verlet deliberately share no code with
// the variational steppers; they are the independent yardstick the
// equivalence tests measure against.  The explicit Taylor map reuses the
// jet engine (same recurrences either way) but none of the variational
// machinery.

namespace tvi {

struct BaselineStep {
  std::vector<double> q, p;
};

namespace detail {
template <class Sys>
std::vector<double> grad_v(const Sys& sys, std::span<const double> q) {
  std::vector<double> g(q.size(), 0.0);
  sys.grad_potential(q, std::span<double>(g));
  return g;
}
}  // namespace detail

/// Symplectic Euler, momentum update first:
///   p1 = p0 - h grad V(q0),  q1 = q0 + h Minv p1.
template <class Sys>
BaselineStep euler_a_step(const Sys& sys, std::span<const double> q0, std::span<const double> p0,
                          double h) {
  const std::size_t n = q0.size();
  auto g = detail::grad_v(sys, q0);
  BaselineStep out;
  out.p.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.p[i] = p0[i] - h * g[i];
  auto v = to_velocity(sys, out.p);
  out.q.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.q[i] = q0[i] + h * v[i];
  return out;
}

/// Symplectic Euler, position update first:
///   q1 = q0 + h Minv p0,  p1 = p0 - h grad V(q1).
template <class Sys>
BaselineStep euler_b_step(const Sys& sys, std::span<const double> q0, std::span<const double> p0,
                          double h) {
  const std::size_t n = q0.size();
  auto v = to_velocity(sys, p0);
  BaselineStep out;
  out.q.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.q[i] = q0[i] + h * v[i];
  auto g = detail::grad_v(sys, out.q);
  out.p.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.p[i] = p0[i] - h * g[i];
  return out;
}

/// Stormer-Verlet (leapfrog, position form):
///   p_half = p0 - (h/2) grad V(q0),
///   q1 = q0 + h Minv p_half,
///   p1 = p_half - (h/2) grad V(q1).
template <class Sys>
BaselineStep stormer_verlet_step(const Sys& sys, std::span<const double> q0,
                                 std::span<const double> p0, double h) {
  const std::size_t n = q0.size();
  auto g0 = detail::grad_v(sys, q0);
  std::vector<double> ph(n);
  for (std::size_t i = 0; i < n; ++i) ph[i] = p0[i] - 0.5 * h * g0[i];
  auto v = to_velocity(sys, ph);
  BaselineStep out;
  out.q.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.q[i] = q0[i] + h * v[i];
  auto g1 = detail::grad_v(sys, out.q);
  out.p.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.p[i] = ph[i] - 0.5 * h * g1[i];
  return out;
}

/// Explicit Taylor map with the same truncation bookkeeping as the
/// variational steppers: position to degree r, velocity with coefficient
/// budget r+1, both evaluated at t = h.
template <class Sys>
BaselineStep taylor_step(const Sys& sys, std::span<const double> q0, std::span<const double> p0,
                         double h, int r) {
  if (r < 0) throw ConfigError("taylor_step: order must be nonnegative");
  auto v0 = to_velocity(sys, p0);
  auto tc = prolong(sys, q0, v0, r + 1);
  auto [q1, v1] = eval_state(tc, h, r);
  BaselineStep out;
  out.q = std::move(q1);
  out.p = to_momentum(sys, v1);
  return out;
}

}  // namespace tvi
