#pragma once

#include <cmath>

// The elementary function set every scalar ring in this library supports:
// +, -, *, /, sin, cos, exp, log, sqrt, inv_sqrt and pow with a real
// exponent.  Dual<T> and Series<T> overload the same names, so generic code
// written against unqualified calls works at every level of the tower
// (double, Dual<double>, Series<Dual<double>>, ...).

namespace tvi {

using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

inline double inv_sqrt(double x) { return 1.0 / std::sqrt(x); }

/// Strip all derivative/series structure down to the underlying double.
constexpr double value_of(double x) { return x; }

/// A zero with the same shape (partial count, truncation degree) as x.
constexpr double zero_like(double) { return 0.0; }

}  // namespace tvi
