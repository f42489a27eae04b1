#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tvi/errors.hpp"
#include "tvi/matrix.hpp"
#include "tvi/scalar.hpp"

// A system is any type providing
//
//   int dim() const;
//   std::string_view name() const;
//   const detail::MassData& mass_data() const;   (constant SPD mass matrix)
//   template <class T> T potential(std::span<const T> q) const;
//   template <class T> void grad_potential(std::span<const T> q, std::span<T> out) const;
//   template <class A> void accel(std::span<const A> q, std::span<const A> v,
//                                 std::span<A> out) const;
//
// with potential/grad/accel written against the elementary function set
// (+, -, *, /, sin, cos, exp, log, sqrt, inv_sqrt, pow) so that they can be
// instantiated at double, dual, series, or series-of-dual scalars alike.
// For q''= -Minv grad V systems, accel is one call to gradient_accel below;
// systems with velocity-dependent forces write accel directly.

namespace tvi {
namespace detail {

/// Constant mass matrix plus its inverse; keeps the diagonal as a flat
/// vector when applicable so hot paths can skip the full matvec.
struct MassData {
  Mat<double> M, Minv;
  std::vector<double> minv_diag;  // nonempty iff Minv is diagonal

  void set_identity(int n) {
    M = Mat<double>::identity(n);
    Minv = Mat<double>::identity(n);
    minv_diag.assign(static_cast<std::size_t>(n), 1.0);
  }

  void set_diagonal(const std::vector<double>& d) {
    const int n = static_cast<int>(d.size());
    M = Mat<double>(n, n);
    Minv = Mat<double>(n, n);
    minv_diag.resize(d.size());
    for (int i = 0; i < n; ++i) {
      if (!(d[static_cast<std::size_t>(i)] > 0.0))
        throw ConfigError("mass matrix: diagonal entries must be positive");
      M(i, i) = d[static_cast<std::size_t>(i)];
      Minv(i, i) = 1.0 / d[static_cast<std::size_t>(i)];
      minv_diag[static_cast<std::size_t>(i)] = 1.0 / d[static_cast<std::size_t>(i)];
    }
  }
};

/// accel = -Minv grad V(q), generic over the scalar ring A.
template <class Sys, class A>
void gradient_accel(const Sys& sys, std::span<const A> q, std::span<A> out) {
  const auto n = q.size();
  std::vector<A> g;
  g.reserve(n);
  for (const A& qi : q) g.push_back(zero_like(qi));
  sys.grad_potential(q, std::span<A>(g));
  const MassData& md = sys.mass_data();
  if (!md.minv_diag.empty()) {
    for (std::size_t i = 0; i < n; ++i) out[i] = g[i] * (-md.minv_diag[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      A acc = g[0] * (-md.Minv(static_cast<int>(i), 0));
      for (std::size_t j = 1; j < n; ++j)
        acc += g[j] * (-md.Minv(static_cast<int>(i), static_cast<int>(j)));
      out[i] = std::move(acc);
    }
  }
}

/// v = Minv p over any scalar ring.
template <class Sys, class A>
std::vector<A> apply_minv(const Sys& sys, std::span<const A> p) {
  const MassData& md = sys.mass_data();
  const std::size_t n = p.size();
  std::vector<A> v;
  v.reserve(n);
  if (!md.minv_diag.empty()) {
    for (std::size_t i = 0; i < n; ++i) v.push_back(p[i] * md.minv_diag[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      A acc = p[0] * md.Minv(static_cast<int>(i), 0);
      for (std::size_t j = 1; j < n; ++j)
        acc += p[j] * md.Minv(static_cast<int>(i), static_cast<int>(j));
      v.push_back(std::move(acc));
    }
  }
  return v;
}

/// p = M v over any scalar ring.
template <class Sys, class A>
std::vector<A> apply_mass(const Sys& sys, std::span<const A> v) {
  const MassData& md = sys.mass_data();
  const std::size_t n = v.size();
  std::vector<A> p;
  p.reserve(n);
  if (!md.minv_diag.empty()) {
    for (std::size_t i = 0; i < n; ++i) p.push_back(v[i] * (1.0 / md.minv_diag[i]));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      A acc = v[0] * md.M(static_cast<int>(i), 0);
      for (std::size_t j = 1; j < n; ++j)
        acc += v[j] * md.M(static_cast<int>(i), static_cast<int>(j));
      p.push_back(std::move(acc));
    }
  }
  return p;
}

}  // namespace detail

template <class Sys>
std::vector<double> to_velocity(const Sys& sys, std::span<const double> p) {
  const auto& md = sys.mass_data();
  if (!md.minv_diag.empty()) {
    std::vector<double> v(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) v[i] = md.minv_diag[i] * p[i];
    return v;
  }
  return matvec(md.Minv, p);
}

template <class Sys>
std::vector<double> to_momentum(const Sys& sys, std::span<const double> v) {
  const auto& md = sys.mass_data();
  if (!md.minv_diag.empty()) {
    std::vector<double> p(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[i] / md.minv_diag[i];
    return p;
  }
  return matvec(md.M, v);
}

/// Kinetic energy (1/2) v^T M v for any scalar ring.
template <class Sys, class A>
A kinetic_energy(const Sys& sys, std::span<const A> v) {
  const auto& md = sys.mass_data();
  A acc = zero_like(v[0]);
  if (!md.minv_diag.empty()) {
    for (std::size_t i = 0; i < v.size(); ++i) acc += v[i] * v[i] * (0.5 / md.minv_diag[i]);
  } else {
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j)
        acc += v[i] * v[j] * (0.5 * md.M(static_cast<int>(i), static_cast<int>(j)));
  }
  return acc;
}

/// Total energy H(q, p) = (1/2) p^T Minv p + V(q).
template <class Sys>
double energy(const Sys& sys, std::span<const double> q, std::span<const double> p) {
  std::vector<double> v = to_velocity(sys, p);
  double t = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) t += 0.5 * p[i] * v[i];
  return t + sys.template potential<double>(q);
}

// ---------------------------------------------------------------------------

/// V = 0; handy for exactness checks (every integrator here is exact on it).
class FreeParticle {
 public:
  explicit FreeParticle(int n = 1) : n_(n) {
    if (n < 1) throw ConfigError("free_particle: dimension must be positive");
    md_.set_identity(n);
  }
  int dim() const { return n_; }
  std::string_view name() const { return "free_particle"; }
  const detail::MassData& mass_data() const { return md_; }

  template <class T>
  T potential(std::span<const T> q) const {
    return zero_like(q[0]);
  }
  template <class T>
  void grad_potential(std::span<const T> q, std::span<T> out) const {
    for (std::size_t i = 0; i < q.size(); ++i) out[i] = zero_like(q[i]);
  }
  template <class A>
  void accel(std::span<const A> q, std::span<const A>, std::span<A> out) const {
    detail::gradient_accel(*this, q, out);
  }

 private:
  int n_;
  detail::MassData md_;
};

/// V = (1/2) q^2, unit mass and frequency.
class HarmonicOscillator {
 public:
  HarmonicOscillator() { md_.set_identity(1); }
  int dim() const { return 1; }
  std::string_view name() const { return "harmonic_oscillator"; }
  const detail::MassData& mass_data() const { return md_; }

  template <class T>
  T potential(std::span<const T> q) const {
    return 0.5 * q[0] * q[0];
  }
  template <class T>
  void grad_potential(std::span<const T> q, std::span<T> out) const {
    out[0] = q[0];
  }
  template <class A>
  void accel(std::span<const A> q, std::span<const A>, std::span<A> out) const {
    detail::gradient_accel(*this, q, out);
  }

 private:
  detail::MassData md_;
};

/// Planar pendulum, V = g (1 - cos q), unit mass and length, g = 9.8.
/// Energy is zero at the hanging rest state.
class Pendulum {
 public:
  explicit Pendulum(double g = 9.8) : g_(g) { md_.set_identity(1); }
  int dim() const { return 1; }
  std::string_view name() const { return "pendulum"; }
  const detail::MassData& mass_data() const { return md_; }
  double gravity() const { return g_; }

  template <class T>
  T potential(std::span<const T> q) const {
    return g_ * (1.0 - cos(q[0]));
  }
  template <class T>
  void grad_potential(std::span<const T> q, std::span<T> out) const {
    out[0] = g_ * sin(q[0]);
  }
  template <class A>
  void accel(std::span<const A> q, std::span<const A>, std::span<A> out) const {
    detail::gradient_accel(*this, q, out);
  }

 private:
  double g_;
  detail::MassData md_;
};

/// Planar Kepler problem, V = -1/|q|, unit masses.
class Kepler2D {
 public:
  Kepler2D() { md_.set_identity(2); }
  int dim() const { return 2; }
  std::string_view name() const { return "kepler2d"; }
  const detail::MassData& mass_data() const { return md_; }

  template <class T>
  T potential(std::span<const T> q) const {
    T r2 = q[0] * q[0] + q[1] * q[1];
    return -inv_sqrt(r2);
  }
  template <class T>
  void grad_potential(std::span<const T> q, std::span<T> out) const {
    T r2 = q[0] * q[0] + q[1] * q[1];
    T ir = inv_sqrt(r2);
    T ir3 = ir * ir * ir;  // grad(-1/r) = q / r^3
    out[0] = q[0] * ir3;
    out[1] = q[1] * ir3;
  }
  template <class A>
  void accel(std::span<const A> q, std::span<const A>, std::span<A> out) const {
    detail::gradient_accel(*this, q, out);
  }

 private:
  detail::MassData md_;
};

/// Henon-Heiles: V = (1/2)(q1^2 + q2^2) + q1^2 q2 - q2^3 / 3.
class HenonHeiles {
 public:
  HenonHeiles() { md_.set_identity(2); }
  int dim() const { return 2; }
  std::string_view name() const { return "henon_heiles"; }
  const detail::MassData& mass_data() const { return md_; }

  template <class T>
  T potential(std::span<const T> q) const {
    return 0.5 * (q[0] * q[0] + q[1] * q[1]) + q[0] * q[0] * q[1] -
           q[1] * q[1] * q[1] * (1.0 / 3.0);
  }
  template <class T>
  void grad_potential(std::span<const T> q, std::span<T> out) const {
    out[0] = q[0] + 2.0 * q[0] * q[1];
    out[1] = q[1] + q[0] * q[0] - q[1] * q[1];
  }
  template <class A>
  void accel(std::span<const A> q, std::span<const A>, std::span<A> out) const {
    detail::gradient_accel(*this, q, out);
  }

 private:
  detail::MassData md_;
};

/// Fermi-Pasta-Ulam chain of three stiff springs (6 dof, fixed walls):
/// V = (omega^2/4) sum (q_{2i} - q_{2i-1})^2 + sum (soft spring diffs)^4,
/// with the soft diffs q1, q3 - q2, q5 - q4, -q6 in 1-based labeling.
class FermiPastaUlam {
 public:
  explicit FermiPastaUlam(double omega = 50.0) : omega_(omega) {
    if (!(omega > 0.0)) throw ConfigError("fpu: omega must be positive");
    md_.set_identity(6);
  }
  int dim() const { return 6; }
  std::string_view name() const { return "fpu"; }
  const detail::MassData& mass_data() const { return md_; }
  double omega() const { return omega_; }

  template <class T>
  T potential(std::span<const T> q) const {
    const double w2 = omega_ * omega_;
    T stiff = sq(q[1] - q[0]) + sq(q[3] - q[2]) + sq(q[5] - q[4]);
    T soft = quart(q[0]) + quart(q[2] - q[1]) + quart(q[4] - q[3]) + quart(-q[5]);
    return 0.25 * w2 * stiff + soft;
  }
  template <class T>
  void grad_potential(std::span<const T> q, std::span<T> out) const {
    const double w2 = omega_ * omega_;
    for (std::size_t i = 0; i < 6; ++i) out[i] = zero_like(q[i]);
    // Stiff pairs (a, b): d/dq_a (w2/4)(q_b - q_a)^2 = -(w2/2)(q_b - q_a).
    for (std::size_t a = 0; a < 6; a += 2) {
      T s = (0.5 * w2) * (q[a + 1] - q[a]);
      out[a] -= s;
      out[a + 1] += s;
    }
    // Soft quartic couplings, walls at both ends.
    T c0 = 4.0 * cube(q[0]);
    out[0] += c0;
    T c1 = 4.0 * cube(q[2] - q[1]);
    out[1] -= c1;
    out[2] += c1;
    T c2 = 4.0 * cube(q[4] - q[3]);
    out[3] -= c2;
    out[4] += c2;
    T c3 = 4.0 * cube(-q[5]);
    out[5] -= c3;
  }
  template <class A>
  void accel(std::span<const A> q, std::span<const A>, std::span<A> out) const {
    detail::gradient_accel(*this, q, out);
  }

 private:
  template <class T>
  static T sq(const T& x) {
    return x * x;
  }
  template <class T>
  static T cube(const T& x) {
    return x * x * x;
  }
  template <class T>
  static T quart(const T& x) {
    T x2 = x * x;
    return x2 * x2;
  }

  double omega_;
  detail::MassData md_;
};

/// Gravitational N-body system (sun + outer planets + Pluto in the bundled
/// data).  Coordinates are packed (x0,y0,z0, x1,y1,z1, ...); the mass
/// matrix is diag(m_i) repeated per axis.
class OuterSolar {
 public:
  OuterSolar(std::vector<std::string> names, std::vector<double> masses,
             double G = 2.95912208286e-4)
      : names_(std::move(names)), m_(std::move(masses)), G_(G) {
    if (m_.size() < 2) throw ConfigError("n-body: need at least two bodies");
    if (names_.size() != m_.size()) throw ConfigError("n-body: names/masses length mismatch");
    std::vector<double> diag;
    diag.reserve(3 * m_.size());
    for (double m : m_) {
      if (!(m > 0.0)) throw ConfigError("n-body: masses must be positive");
      diag.insert(diag.end(), 3, m);
    }
    md_.set_diagonal(diag);
  }

  int dim() const { return static_cast<int>(3 * m_.size()); }
  int bodies() const { return static_cast<int>(m_.size()); }
  std::string_view name() const { return "outer_solar"; }
  const detail::MassData& mass_data() const { return md_; }
  const std::vector<double>& masses() const { return m_; }
  const std::vector<std::string>& body_names() const { return names_; }
  double gravitational_constant() const { return G_; }

  template <class T>
  T potential(std::span<const T> q) const {
    T acc = zero_like(q[0]);
    const std::size_t nb = m_.size();
    for (std::size_t i = 0; i < nb; ++i) {
      for (std::size_t j = i + 1; j < nb; ++j) {
        T dx = q[3 * i] - q[3 * j];
        T dy = q[3 * i + 1] - q[3 * j + 1];
        T dz = q[3 * i + 2] - q[3 * j + 2];
        T r2 = dx * dx + dy * dy + dz * dz;
        acc -= (G_ * m_[i] * m_[j]) * inv_sqrt(r2);
      }
    }
    return acc;
  }

  template <class T>
  void grad_potential(std::span<const T> q, std::span<T> out) const {
    for (std::size_t i = 0; i < q.size(); ++i) out[i] = zero_like(q[i]);
    const std::size_t nb = m_.size();
    for (std::size_t i = 0; i < nb; ++i) {
      for (std::size_t j = i + 1; j < nb; ++j) {
        T dx = q[3 * i] - q[3 * j];
        T dy = q[3 * i + 1] - q[3 * j + 1];
        T dz = q[3 * i + 2] - q[3 * j + 2];
        T r2 = dx * dx + dy * dy + dz * dz;
        T ir = inv_sqrt(r2);
        T w = (G_ * m_[i] * m_[j]) * (ir * ir * ir);  // grad(-w/r) = w (qi - qj)/r^3
        T gx = dx * w;
        T gy = dy * w;
        T gz = dz * w;
        out[3 * i] += gx;
        out[3 * i + 1] += gy;
        out[3 * i + 2] += gz;
        out[3 * j] -= gx;
        out[3 * j + 1] -= gy;
        out[3 * j + 2] -= gz;
      }
    }
  }

  template <class A>
  void accel(std::span<const A> q, std::span<const A>, std::span<A> out) const {
    detail::gradient_accel(*this, q, out);
  }

 private:
  std::vector<std::string> names_;
  std::vector<double> m_;
  double G_;
  detail::MassData md_;
};

/// Velocity-dependent test force f = -omega^2 q - gamma v; exercises the
/// general second-order prolongation (not part of the benchmark set, and
/// its "potential" ignores the dissipation).
class DampedOscillator {
 public:
  DampedOscillator(double omega = 1.0, double gamma = 0.1) : w2_(omega * omega), gamma_(gamma) {
    md_.set_identity(1);
  }
  int dim() const { return 1; }
  std::string_view name() const { return "damped_oscillator"; }
  const detail::MassData& mass_data() const { return md_; }

  template <class T>
  T potential(std::span<const T> q) const {
    return 0.5 * w2_ * q[0] * q[0];
  }
  template <class T>
  void grad_potential(std::span<const T> q, std::span<T> out) const {
    out[0] = w2_ * q[0];
  }
  template <class A>
  void accel(std::span<const A> q, std::span<const A> v, std::span<A> out) const {
    out[0] = -(w2_ * q[0]) - gamma_ * v[0];
  }

 private:
  double w2_, gamma_;
  detail::MassData md_;
};

}  // namespace tvi
