#pragma once

#include <functional>

namespace nlfront {

using ScalarFn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod integral of f over [a, b] (finite).
double integrate(const ScalarFn& f, double a, double b, double rel_tol = 1e-12);

/// Bisection root of a sign-changing f on [lo, hi]; stops when the bracket is
/// below rel_tol relative width.
double bisect_root(const ScalarFn& f, double lo, double hi, double rel_tol = 1e-14);

}  // namespace nlfront
