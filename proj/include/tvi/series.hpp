#pragma once

#include <cassert>
#include <cstddef>
#include <utility>
#include <vector>

#include "tvi/errors.hpp"
#include "tvi/scalar.hpp"

namespace tvi {

/// Truncated power series sum_{k=0..K} c_k t^k over any scalar ring T
/// (double, Dual<double>, nested duals).  All binary operations require both
/// operands to share the truncation degree K.  Elementary functions use the
/// standard convolution recurrences; domain violations at the constant term
/// (log/sqrt/pow of a nonpositive value, division by a zero constant term)
/// raise DomainError immediately.
template <class T>
class Series {
 public:
  explicit Series(int degree) : c_(static_cast<std::size_t>(degree) + 1, T(0)) {
    assert(degree >= 0);
  }
  Series(int degree, T c0) : Series(degree) { c_[0] = std::move(c0); }

  static Series constant(int degree, T v) { return Series(degree, std::move(v)); }

  /// c0 + t, the expansion variable itself.  Needs degree >= 1.
  static Series variable(int degree, T c0) {
    assert(degree >= 1);
    Series s(degree, std::move(c0));
    s.c_[1] = T(1);
    return s;
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }

  T& operator[](int k) {
    assert(k >= 0 && k <= degree());
    return c_[static_cast<std::size_t>(k)];
  }
  const T& operator[](int k) const {
    assert(k >= 0 && k <= degree());
    return c_[static_cast<std::size_t>(k)];
  }

  /// Copy of the leading coefficients as a lower-degree series.
  Series truncated(int new_degree) const {
    assert(new_degree >= 0 && new_degree <= degree());
    Series s(new_degree);
    for (int k = 0; k <= new_degree; ++k) s.c_[static_cast<std::size_t>(k)] = c_[static_cast<std::size_t>(k)];
    return s;
  }

  Series& operator+=(const Series& o) {
    assert(degree() == o.degree());
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  Series& operator-=(const Series& o) {
    assert(degree() == o.degree());
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }

  friend Series operator+(Series a, const Series& b) { a += b; return a; }
  friend Series operator-(Series a, const Series& b) { a -= b; return a; }

  friend Series operator-(const Series& a) {
    Series r(a.degree());
    for (std::size_t k = 0; k < a.c_.size(); ++k) r.c_[k] = -a.c_[k];
    return r;
  }

  // Cauchy product truncated at the common degree.
  friend Series operator*(const Series& a, const Series& b) {
    assert(a.degree() == b.degree());
    const int K = a.degree();
    Series r(K);
    for (int n = 0; n <= K; ++n) {
      T acc = a.c_[0] * b.c_[static_cast<std::size_t>(n)];
      for (int k = 1; k <= n; ++k)
        acc += a.c_[static_cast<std::size_t>(k)] * b.c_[static_cast<std::size_t>(n - k)];
      r.c_[static_cast<std::size_t>(n)] = std::move(acc);
    }
    return r;
  }

  // Long division: q_n = (a_n - sum_{k<n} q_k b_{n-k}) / b_0.
  friend Series operator/(const Series& a, const Series& b) {
    assert(a.degree() == b.degree());
    if (value_of(b.c_[0]) == 0.0)
      throw DomainError("series division: zero constant term in divisor");
    const int K = a.degree();
    Series q(K);
    for (int n = 0; n <= K; ++n) {
      T acc = a.c_[static_cast<std::size_t>(n)];
      for (int k = 0; k < n; ++k)
        acc -= q.c_[static_cast<std::size_t>(k)] * b.c_[static_cast<std::size_t>(n - k)];
      q.c_[static_cast<std::size_t>(n)] = acc / b.c_[0];
    }
    return q;
  }

  friend Series operator+(Series a, double s) { a.c_[0] += T(s); return a; }
  friend Series operator+(double s, Series a) { a.c_[0] += T(s); return a; }
  friend Series operator-(Series a, double s) { a.c_[0] -= T(s); return a; }
  friend Series operator-(double s, const Series& a) {
    Series r = -a;
    r.c_[0] += T(s);
    return r;
  }
  friend Series operator*(Series a, double s) {
    for (auto& c : a.c_) c = c * s;
    return a;
  }
  friend Series operator*(double s, Series a) { return std::move(a) * s; }
  friend Series operator/(Series a, double s) {
    for (auto& c : a.c_) c = c / s;
    return a;
  }
  friend Series operator/(double s, const Series& a) {
    return Series::constant(a.degree(), T(s)) / a;
  }

 private:
  std::vector<T> c_;
};

template <class T>
double value_of(const Series<T>& s) {
  return value_of(s[0]);
}

template <class T>
Series<T> zero_like(const Series<T>& s) {
  return Series<T>(s.degree());
}

/// exp via g' = f' g:  g_n = (1/n) sum_{j=1..n} j f_j g_{n-j}.
template <class T>
Series<T> exp(const Series<T>& f) {
  const int K = f.degree();
  Series<T> g(K);
  g[0] = exp(f[0]);
  for (int n = 1; n <= K; ++n) {
    T acc = T(1) * f[1] * g[n - 1];
    for (int j = 2; j <= n; ++j) acc += double(j) * f[j] * g[n - j];
    g[n] = acc / double(n);
  }
  return g;
}

/// log via g' = f'/f:  g_n = (n f_n - sum_{j=1..n-1} j g_j f_{n-j}) / (n f_0).
template <class T>
Series<T> log(const Series<T>& f) {
  if (value_of(f[0]) <= 0.0) throw DomainError("series log: nonpositive constant term");
  const int K = f.degree();
  Series<T> g(K);
  g[0] = log(f[0]);
  for (int n = 1; n <= K; ++n) {
    T acc = double(n) * f[n];
    for (int j = 1; j < n; ++j) acc -= double(j) * g[j] * f[n - j];
    g[n] = acc / (double(n) * f[0]);
  }
  return g;
}

/// Joint recurrence from s' = f' c and c' = -f' s.
template <class T>
std::pair<Series<T>, Series<T>> sin_cos(const Series<T>& f) {
  const int K = f.degree();
  Series<T> s(K), c(K);
  s[0] = sin(f[0]);
  c[0] = cos(f[0]);
  for (int n = 1; n <= K; ++n) {
    T sa = T(1) * f[1] * c[n - 1];
    T ca = T(1) * f[1] * s[n - 1];
    for (int j = 2; j <= n; ++j) {
      sa += double(j) * f[j] * c[n - j];
      ca += double(j) * f[j] * s[n - j];
    }
    s[n] = sa / double(n);
    c[n] = -(ca / double(n));
  }
  return {std::move(s), std::move(c)};
}

template <class T>
Series<T> sin(const Series<T>& f) {
  return sin_cos(f).first;
}

template <class T>
Series<T> cos(const Series<T>& f) {
  return sin_cos(f).second;
}

/// sqrt via g*g = f:  g_n = (f_n - sum_{j=1..n-1} g_j g_{n-j}) / (2 g_0).
template <class T>
Series<T> sqrt(const Series<T>& f) {
  if (value_of(f[0]) <= 0.0) throw DomainError("series sqrt: nonpositive constant term");
  const int K = f.degree();
  Series<T> g(K);
  g[0] = sqrt(f[0]);
  for (int n = 1; n <= K; ++n) {
    T acc = f[n];
    for (int j = 1; j < n; ++j) acc -= g[j] * g[n - j];
    g[n] = acc / (2.0 * g[0]);
  }
  return g;
}

/// Real power via f g' = alpha f' g:
/// g_n = (1/(n f_0)) sum_{k=0..n-1} (alpha (n-k) - k) f_{n-k} g_k.
template <class T>
Series<T> pow(const Series<T>& f, double alpha) {
  if (value_of(f[0]) <= 0.0) throw DomainError("series pow: nonpositive constant term");
  const int K = f.degree();
  Series<T> g(K);
  g[0] = pow(f[0], alpha);
  for (int n = 1; n <= K; ++n) {
    T acc = (alpha * n) * f[n] * g[0];
    for (int k = 1; k < n; ++k) acc += (alpha * (n - k) - k) * f[n - k] * g[k];
    g[n] = acc / (double(n) * f[0]);
  }
  return g;
}

/// x^(-1/2) through the pow recurrence; kept as a named elementary so scalar
/// rings can share one inverse-square-root code path (Kepler, n-body).
template <class T>
Series<T> inv_sqrt(const Series<T>& f) {
  if (value_of(f[0]) <= 0.0) throw DomainError("series inv_sqrt: nonpositive constant term");
  const int K = f.degree();
  Series<T> g(K);
  g[0] = inv_sqrt(f[0]);
  const double alpha = -0.5;
  for (int n = 1; n <= K; ++n) {
    T acc = (alpha * n) * f[n] * g[0];
    for (int k = 1; k < n; ++k) acc += (alpha * (n - k) - k) * f[n - k] * g[k];
    g[n] = acc / (double(n) * f[0]);
  }
  return g;
}

}  // namespace tvi
