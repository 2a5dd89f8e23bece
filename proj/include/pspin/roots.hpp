#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pspin {

/// Thrown when a numerical routine cannot produce a valid answer for
/// otherwise valid inputs (bracket failure, non-convergence).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Bracket {
  double lo;
  double hi;
};

/// Bisection on [lo, hi] until the bracket is narrower than width.
/// Requires a sign change between the endpoints.
template <typename F>
Bracket bisect(const F& f, double lo, double hi, double width, int max_iters = 400) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return {lo, lo};
  if (fhi == 0.0) return {hi, hi};
  if ((flo < 0.0) == (fhi < 0.0)) throw NumericalError("bisect: endpoints do not bracket a root");
  for (int i = 0; i < max_iters && hi - lo > width; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return {mid, mid};
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

/// Bisection followed by secant steps that are only accepted while they
/// stay inside the final bracket. Returns the point with the smallest |f|.
template <typename F>
double bracketed_root(const F& f, double lo, double hi, double width = 1e-13, int secant_steps = 4) {
  const Bracket b = bisect(f, lo, hi, width);
  double x0 = b.lo, x1 = b.hi;
  double f0 = f(x0), f1 = f(x1);
  double best = std::abs(f0) <= std::abs(f1) ? x0 : x1;
  double fbest = std::min(std::abs(f0), std::abs(f1));
  for (int i = 0; i < secant_steps && f1 != f0; ++i) {
    const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    if (!(x2 >= b.lo && x2 <= b.hi)) break;
    const double f2 = f(x2);
    if (std::abs(f2) < fbest) {
      best = x2;
      fbest = std::abs(f2);
    }
    if (f2 == 0.0) break;
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f2;
  }
  return best;
}

}  // namespace pspin
