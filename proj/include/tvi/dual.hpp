#pragma once

#include <cassert>
#include <cstddef>
#include <type_traits>
#include <utility>
#include <vector>

#include "tvi/errors.hpp"
#include "tvi/scalar.hpp"

namespace tvi {

/// Forward-mode dual number carrying a runtime-sized vector of partial
/// derivatives alongside the value.  The partial vector may be empty, which
/// means "all partials are zero"; lifted constants stay allocation-free that
/// way.  Nesting, e.g. Dual<Dual<double>>, propagates exact second
/// derivatives through the same arithmetic.
template <class T>
struct Dual {
  T val{};
  std::vector<T> der;  // empty == zero gradient

  Dual() = default;
  Dual(T v) : val(std::move(v)) {}

  template <class U>
    requires(std::is_arithmetic_v<U> && !std::is_same_v<U, T>)
  Dual(U v) : val(static_cast<double>(v)) {}

  /// Value v seeded as the dir-th of m independent variables.
  static Dual seeded(T v, std::size_t m, std::size_t dir) {
    Dual d(std::move(v));
    d.der.assign(m, T(0));
    d.der[dir] = T(1);
    return d;
  }

  /// Partial w.r.t. direction i (empty vector reads as zero).
  T partial(std::size_t i) const { return der.empty() ? T(0) : der[i]; }

  Dual& operator+=(const Dual& o) { *this = *this + o; return *this; }
  Dual& operator-=(const Dual& o) { *this = *this - o; return *this; }
  Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }

  friend Dual operator+(const Dual& a, const Dual& b) {
    Dual r(a.val + b.val);
    if (a.der.empty()) {
      r.der = b.der;
    } else if (b.der.empty()) {
      r.der = a.der;
    } else {
      assert(a.der.size() == b.der.size());
      r.der.reserve(a.der.size());
      for (std::size_t i = 0; i < a.der.size(); ++i) r.der.push_back(a.der[i] + b.der[i]);
    }
    return r;
  }

  friend Dual operator-(const Dual& a, const Dual& b) {
    Dual r(a.val - b.val);
    if (a.der.empty()) {
      r.der.reserve(b.der.size());
      for (const T& d : b.der) r.der.push_back(-d);
    } else if (b.der.empty()) {
      r.der = a.der;
    } else {
      assert(a.der.size() == b.der.size());
      r.der.reserve(a.der.size());
      for (std::size_t i = 0; i < a.der.size(); ++i) r.der.push_back(a.der[i] - b.der[i]);
    }
    return r;
  }

  friend Dual operator-(const Dual& a) {
    Dual r(-a.val);
    r.der.reserve(a.der.size());
    for (const T& d : a.der) r.der.push_back(-d);
    return r;
  }

  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.val * b.val);
    if (a.der.empty()) {
      r.der.reserve(b.der.size());
      for (const T& d : b.der) r.der.push_back(a.val * d);
    } else if (b.der.empty()) {
      r.der.reserve(a.der.size());
      for (const T& d : a.der) r.der.push_back(d * b.val);
    } else {
      assert(a.der.size() == b.der.size());
      r.der.reserve(a.der.size());
      for (std::size_t i = 0; i < a.der.size(); ++i)
        r.der.push_back(a.der[i] * b.val + a.val * b.der[i]);
    }
    return r;
  }

  // (a/b)' = a'/b - (a/b) b'/b, evaluated with one division per direction.
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r(a.val / b.val);
    if (a.der.empty()) {
      r.der.reserve(b.der.size());
      for (const T& d : b.der) r.der.push_back(-(r.val * d) / b.val);
    } else if (b.der.empty()) {
      r.der.reserve(a.der.size());
      for (const T& d : a.der) r.der.push_back(d / b.val);
    } else {
      assert(a.der.size() == b.der.size());
      r.der.reserve(a.der.size());
      for (std::size_t i = 0; i < a.der.size(); ++i)
        r.der.push_back((a.der[i] - r.val * b.der[i]) / b.val);
    }
    return r;
  }
};

template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.val);
}

template <class T>
Dual<T> zero_like(const Dual<T>& x) {
  Dual<T> z(zero_like(x.val));
  z.der.assign(x.der.size(), T(0));
  return z;
}

namespace detail {
// Chain rule for a unary elementary: result value f, result partials f' * x'.
template <class T>
Dual<T> unary_chain(T f, const T& fprime, const Dual<T>& x) {
  Dual<T> r(std::move(f));
  r.der.reserve(x.der.size());
  for (const T& d : x.der) r.der.push_back(fprime * d);
  return r;
}
}  // namespace detail

template <class T>
Dual<T> sin(const Dual<T>& x) {
  return detail::unary_chain(sin(x.val), cos(x.val), x);
}

template <class T>
Dual<T> cos(const Dual<T>& x) {
  return detail::unary_chain(cos(x.val), -sin(x.val), x);
}

template <class T>
Dual<T> exp(const Dual<T>& x) {
  T f = exp(x.val);
  return detail::unary_chain(f, f, x);
}

template <class T>
Dual<T> log(const Dual<T>& x) {
  if (value_of(x.val) <= 0.0) throw DomainError("log: nonpositive argument");
  return detail::unary_chain(log(x.val), T(1) / x.val, x);
}

template <class T>
Dual<T> sqrt(const Dual<T>& x) {
  if (value_of(x.val) <= 0.0) throw DomainError("sqrt: nonpositive argument");
  T s = sqrt(x.val);
  return detail::unary_chain(s, T(0.5) / s, x);
}

template <class T>
Dual<T> inv_sqrt(const Dual<T>& x) {
  if (value_of(x.val) <= 0.0) throw DomainError("inv_sqrt: nonpositive argument");
  T w = inv_sqrt(x.val);
  // d(x^-1/2) = -x^-3/2 / 2 = -(w / x) / 2
  return detail::unary_chain(w, T(-0.5) * w / x.val, x);
}

template <class T>
Dual<T> pow(const Dual<T>& x, double alpha) {
  if (value_of(x.val) <= 0.0) throw DomainError("pow: nonpositive base");
  T f = pow(x.val, alpha);
  return detail::unary_chain(f, T(alpha) * f / x.val, x);
}

}  // namespace tvi
