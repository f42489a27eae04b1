#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tvi/errors.hpp"
#include "tvi/scalar.hpp"

namespace tvi {

/// Dense row-major matrix over any scalar ring T.  Sized for the small
/// systems that show up here (n <= a few dozen), so no blocking or views;
/// the point is that LU factorization works unchanged when T is a dual
/// number, which is how multiplier solves stay differentiable.
template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols)
      : r_(rows), c_(cols), d_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), T(0)) {
    assert(rows >= 0 && cols >= 0);
  }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }

  T& operator()(int i, int j) {
    assert(i >= 0 && i < r_ && j >= 0 && j < c_);
    return d_[static_cast<std::size_t>(i) * static_cast<std::size_t>(c_) + static_cast<std::size_t>(j)];
  }
  const T& operator()(int i, int j) const {
    assert(i >= 0 && i < r_ && j >= 0 && j < c_);
    return d_[static_cast<std::size_t>(i) * static_cast<std::size_t>(c_) + static_cast<std::size_t>(j)];
  }

  bool empty() const { return d_.empty(); }

 private:
  int r_ = 0, c_ = 0;
  std::vector<T> d_;
};

template <class T>
Mat<T> transposed(const Mat<T>& a) {
  Mat<T> t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

template <class T>
std::vector<T> matvec(const Mat<T>& a, std::span<const T> x) {
  assert(static_cast<std::size_t>(a.cols()) == x.size());
  std::vector<T> y;
  y.reserve(static_cast<std::size_t>(a.rows()));
  for (int i = 0; i < a.rows(); ++i) {
    T acc = T(0);
    for (int j = 0; j < a.cols(); ++j) acc += a(i, j) * x[static_cast<std::size_t>(j)];
    y.push_back(std::move(acc));
  }
  return y;
}

template <class T>
Mat<T> matmul(const Mat<T>& a, const Mat<T>& b) {
  assert(a.cols() == b.rows());
  Mat<T> c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k)
      for (int j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
  return c;
}

/// Solve A x = b by Gaussian elimination with partial pivoting on the
/// underlying double magnitudes.  Works for dual-valued T, propagating
/// derivative parts through the elimination.  Throws SingularMatrixError
/// when the best pivot is negligible relative to the matrix scale.
template <class T>
std::vector<T> lu_solve(Mat<T> a, std::vector<T> b) {
  const int n = a.rows();
  assert(a.cols() == n && static_cast<int>(b.size()) == n);

  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(value_of(a(i, j))));
  if (scale == 0.0) throw SingularMatrixError("lu_solve: zero matrix");

  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(value_of(a(k, k)));
    for (int i = k + 1; i < n; ++i) {
      double m = std::abs(value_of(a(i, k)));
      if (m > best) {
        best = m;
        piv = i;
      }
    }
    if (!(best > 1e-14 * scale))
      throw SingularMatrixError("lu_solve: singular matrix (pivot " + std::to_string(best) + ")");
    if (piv != k) {
      for (int j = k; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(piv)]);
    }
    for (int i = k + 1; i < n; ++i) {
      T f = a(i, k) / a(k, k);
      for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      b[static_cast<std::size_t>(i)] -= f * b[static_cast<std::size_t>(k)];
      a(i, k) = T(0);
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    T acc = std::move(b[static_cast<std::size_t>(i)]);
    for (int j = i + 1; j < n; ++j) acc -= a(i, j) * b[static_cast<std::size_t>(j)];
    b[static_cast<std::size_t>(i)] = acc / a(i, i);
  }
  return b;
}

/// Columns of A^-1 via n right-hand sides.  Fine at these sizes.
template <class T>
Mat<T> lu_invert(const Mat<T>& a) {
  const int n = a.rows();
  assert(a.cols() == n);
  Mat<T> inv(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<T> e(static_cast<std::size_t>(n), T(0));
    e[static_cast<std::size_t>(j)] = T(1);
    std::vector<T> x = lu_solve(a, std::move(e));
    for (int i = 0; i < n; ++i) inv(i, j) = std::move(x[static_cast<std::size_t>(i)]);
  }
  return inv;
}

inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double inf_norm(const Mat<double>& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
    m = std::max(m, s);
  }
  return m;
}

}  // namespace tvi
