#pragma once

#include <cmath>
#include <algorithm>

#include "error.hpp"

namespace phasebench {

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Bisection on a bracket with f(lo)*f(hi) <= 0. Stops when the bracket width
// falls below xtol (absolute) or f hits zero exactly.
template <class F>
RootResult bisect(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0, true};
  if (fhi == 0.0) return {hi, 0.0, 0, true};
  if (!(flo * fhi < 0.0))
    fail(errc::invariant_violation, "no-bracket",
         "bisect: endpoints do not bracket a sign change");
  RootResult r;
  for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0 || hi - lo <= xtol) {
      r.x = mid;
      r.fx = fm;
      r.converged = true;
      return r;
    }
    if (flo * fm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  r.x = 0.5 * (lo + hi);
  r.fx = f(r.x);
  r.converged = hi - lo <= xtol;
  return r;
}

// Safeguarded Newton: steps are accepted only while they stay inside the
// current bracket, which is tightened every iteration; otherwise bisect.
// Converges for any continuous f with a sign change on [lo, hi].
template <class F, class DF>
RootResult newton_bisect(F&& f, DF&& df, double lo, double hi, double xtol,
                         int max_iter = 100) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0, true};
  if (fhi == 0.0) return {hi, 0.0, 0, true};
  if (!(flo * fhi < 0.0))
    fail(errc::invariant_violation, "no-bracket",
         "newton_bisect: endpoints do not bracket a sign change");
  double x = 0.5 * (lo + hi);
  double fx = f(x);
  double step = hi - lo;
  RootResult r;
  for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
    if (fx == 0.0) break;
    // tighten the bracket around the sign change
    if (flo * fx < 0.0) {
      hi = x;
    } else {
      lo = x;
      flo = fx;
    }
    if (hi - lo <= xtol) break;
    double d = df(x);
    double xn = x - fx / d;
    if (!(d != 0.0) || !(xn > lo) || !(xn < hi))
      xn = 0.5 * (lo + hi);
    step = std::fabs(xn - x);
    if (step <= xtol * std::max(1.0, std::fabs(x))) {
      x = xn;
      fx = f(x);
      break;
    }
    x = xn;
    fx = f(x);
  }
  r.x = x;
  r.fx = fx;
  r.converged = (fx == 0.0) || (hi - lo <= xtol) ||
                step <= xtol * std::max(1.0, std::fabs(x));
  return r;
}

} // namespace phasebench
