#pragma once

#include <cmath>
#include <utility>

namespace cvsteady::numerics {

/// Bisection for the sign change of `f` on [lo, hi]. Requires f(lo) and
/// f(hi) to differ in sign (zero counts as the `lo` side). Stops when the
/// bracket is narrower than `tol` or stops shrinking in floating point.
template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
  const bool lo_negative = f(lo) < 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((f(mid) < 0.0) == lo_negative) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Golden-section search for the minimizer of a unimodal `f` on [lo, hi].
template <class F>
std::pair<double, double> golden_section_minimize(F&& f, double lo, double hi,
                                                  double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  const double x = 0.5 * (lo + hi);
  return {x, f(x)};
}

}  // namespace cvsteady::numerics
