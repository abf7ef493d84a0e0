#pragma once

#include <cmath>
#include <utility>

namespace cvmono {

/// Golden-section minimization of a unimodal scalar function on [lo, hi].
/// Returns {argmin, min}. The interval is shrunk until its width falls
/// below xtol (plus a relative floor near large |x|).
template <typename Scalar, typename F>
std::pair<Scalar, Scalar> golden_minimize(F&& f, Scalar lo, Scalar hi, Scalar xtol,
                                          int max_iter = 200) {
  const Scalar invphi = Scalar(0.6180339887498948482);
  if (hi < lo) std::swap(lo, hi);
  Scalar a = lo, b = hi;
  Scalar x1 = b - invphi * (b - a);
  Scalar x2 = a + invphi * (b - a);
  Scalar f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  Scalar xm = (a + b) / 2;
  Scalar fm = f(xm);
  if (f1 < fm) { xm = x1; fm = f1; }
  if (f2 < fm) { xm = x2; fm = f2; }
  return {xm, fm};
}

/// Coarse grid scan over [lo, hi) followed by golden-section refinement
/// around the best grid cell.
template <typename Scalar, typename F>
std::pair<Scalar, Scalar> grid_then_golden(F&& f, Scalar lo, Scalar hi, int grid_points,
                                           Scalar xtol) {
  const Scalar step = (hi - lo) / Scalar(grid_points);
  Scalar best_x = lo, best_f = f(lo);
  for (int i = 1; i < grid_points; ++i) {
    const Scalar x = lo + step * Scalar(i);
    const Scalar fx = f(x);
    if (fx < best_f) { best_f = fx; best_x = x; }
  }
  auto [xr, fr] = golden_minimize(f, best_x - step, best_x + step, xtol);
  if (fr < best_f) return {xr, fr};
  return {best_x, best_f};
}

}  // namespace cvmono
