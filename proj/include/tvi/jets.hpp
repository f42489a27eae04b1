#pragma once

#include <span>
#include <utility>
#include <vector>

#include "tvi/dual.hpp"
#include "tvi/errors.hpp"
#include "tvi/matrix.hpp"
#include "tvi/series.hpp"

namespace tvi {

/// Normalized Taylor coefficients of the trajectory through (q0, v0):
/// Q(i,k) = q_i^(k)(0) / k!, for k = 0..order.  When sensitivities are
/// requested, dQdq0[k] and dQdv0[k] hold the n x n Jacobians of column k
/// with respect to the initial position and velocity.
struct TaylorCoeffs {
  int n = 0;
  int order = 0;
  Mat<double> Q;
  std::vector<Mat<double>> dQdq0, dQdv0;

  bool has_sensitivities() const { return !dQdq0.empty(); }
};

/// Lift (q0, v0) to degree-K power series satisfying q'' = accel(q, q').
/// The generic scalar T lets the same recursion produce plain coefficients
/// (T = double) or coefficients carrying derivative information (duals).
///
/// Stage k feeds the system degree-k truncations of position and velocity
/// and reads off coefficient k of the acceleration:
///   Q_{k+2} = A_k / ((k+1)(k+2)).
template <class T, class Sys>
std::vector<Series<T>> prolong_series(const Sys& sys, std::span<const T> q0,
                                      std::span<const T> v0, int K) {
  const int n = sys.dim();
  if (static_cast<int>(q0.size()) != n || static_cast<int>(v0.size()) != n)
    throw ConfigError("prolong: state dimension mismatch");
  if (K < 1) throw ConfigError("prolong: order must be >= 1");

  std::vector<Series<T>> qs;
  qs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Series<T> s(K);
    s[0] = q0[static_cast<std::size_t>(i)];
    s[1] = v0[static_cast<std::size_t>(i)];
    qs.push_back(std::move(s));
  }

  for (int k = 0; k + 2 <= K; ++k) {
    std::vector<Series<T>> qk, vk, ak;
    qk.reserve(static_cast<std::size_t>(n));
    vk.reserve(static_cast<std::size_t>(n));
    ak.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      qk.push_back(qs[static_cast<std::size_t>(i)].truncated(k));
      Series<T> v(k);
      for (int j = 0; j <= k; ++j) v[j] = double(j + 1) * qs[static_cast<std::size_t>(i)][j + 1];
      vk.push_back(std::move(v));
      ak.emplace_back(k);
    }
    sys.accel(std::span<const Series<T>>(qk), std::span<const Series<T>>(vk),
              std::span<Series<T>>(ak));
    const double denom = double(k + 1) * double(k + 2);
    for (int i = 0; i < n; ++i)
      qs[static_cast<std::size_t>(i)][k + 2] = ak[static_cast<std::size_t>(i)][k] / denom;
  }
  return qs;
}

/// Double-valued prolongation, optionally with first-order sensitivities
/// of every coefficient w.r.t. (q0, v0) (computed by seeding 2n duals).
template <class Sys>
TaylorCoeffs prolong(const Sys& sys, std::span<const double> q0, std::span<const double> v0,
                     int K, bool with_sensitivities = false) {
  const int n = sys.dim();
  TaylorCoeffs tc;
  tc.n = n;
  tc.order = K;
  tc.Q = Mat<double>(n, K + 1);
  if (!with_sensitivities) {
    auto qs = prolong_series<double>(sys, q0, v0, K);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k <= K; ++k) tc.Q(i, k) = qs[static_cast<std::size_t>(i)][k];
    return tc;
  }
  using D = Dual<double>;
  const std::size_t m = 2 * static_cast<std::size_t>(n);
  std::vector<D> qd, vd;
  qd.reserve(static_cast<std::size_t>(n));
  vd.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    qd.push_back(D::seeded(q0[static_cast<std::size_t>(i)], m, static_cast<std::size_t>(i)));
    vd.push_back(D::seeded(v0[static_cast<std::size_t>(i)], m, static_cast<std::size_t>(n + i)));
  }
  auto qs = prolong_series<D>(sys, qd, vd, K);
  tc.dQdq0.assign(static_cast<std::size_t>(K) + 1, Mat<double>(n, n));
  tc.dQdv0.assign(static_cast<std::size_t>(K) + 1, Mat<double>(n, n));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k <= K; ++k) {
      const D& c = qs[static_cast<std::size_t>(i)][k];
      tc.Q(i, k) = c.val;
      for (int j = 0; j < n; ++j) {
        tc.dQdq0[static_cast<std::size_t>(k)](i, j) = value_of(c.partial(static_cast<std::size_t>(j)));
        tc.dQdv0[static_cast<std::size_t>(k)](i, j) =
            value_of(c.partial(static_cast<std::size_t>(n + j)));
      }
    }
  }
  return tc;
}

/// Position-style evaluation: sum_{k=0..deg} s_k t^k (Horner).
template <class T>
T eval_poly(const Series<T>& s, double t, int deg) {
  if (deg < 0 || deg > s.degree()) throw ConfigError("eval_poly: degree out of range");
  T acc = s[deg];
  for (int k = deg - 1; k >= 0; --k) acc = acc * t + s[k];
  return acc;
}

/// Velocity-style evaluation: sum_{k=1..budget} k s_k t^(k-1).
template <class T>
T eval_dpoly(const Series<T>& s, double t, int budget) {
  if (budget < 0 || budget > s.degree()) throw ConfigError("eval_dpoly: budget out of range");
  if (budget == 0) return zero_like(s[0]);
  T acc = double(budget) * s[budget];
  for (int k = budget - 1; k >= 1; --k) acc = acc * t + double(k) * s[k];
  return acc;
}

/// Truncated state at time t: position to degree r, velocity with budget
/// r+1 (one more coefficient, matching the derivative of the degree-(r+1)
/// position polynomial).  Needs r+1 <= coeffs.order.
inline std::pair<std::vector<double>, std::vector<double>> eval_state(const TaylorCoeffs& tc,
                                                                      double t, int r) {
  if (r < 0 || r + 1 > tc.order) throw ConfigError("eval_state: need 0 <= r <= order-1");
  std::vector<double> q(static_cast<std::size_t>(tc.n)), v(static_cast<std::size_t>(tc.n));
  for (int i = 0; i < tc.n; ++i) {
    double qa = tc.Q(i, r);
    for (int k = r - 1; k >= 0; --k) qa = qa * t + tc.Q(i, k);
    double va = (r + 1) * tc.Q(i, r + 1);
    for (int k = r; k >= 1; --k) va = va * t + k * tc.Q(i, k);
    q[static_cast<std::size_t>(i)] = qa;
    v[static_cast<std::size_t>(i)] = va;
  }
  return {std::move(q), std::move(v)};
}

}  // namespace tvi
