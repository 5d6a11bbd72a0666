#ifndef POLYFRONT_QUADRATURE_HPP_
#define POLYFRONT_QUADRATURE_HPP_

#include <cmath>

namespace polyfront {

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) {
    return left + right + diff / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature with Richardson correction.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol,
                        int max_depth = 40) {
  if (a == b) return 0.0;
  // seed with a few panels so narrow features are not skipped
  const int panels = 4;
  double h = (b - a) / panels, sum = 0.0;
  for (int n = 0; n < panels; ++n) {
    double lo = a + n * h, hi = n + 1 == panels ? b : a + (n + 1) * h;
    double flo = f(lo), fhi = f(hi), fmid = f(0.5 * (lo + hi));
    double w = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    sum += detail::simpson_step(f, lo, hi, flo, fmid, fhi, w, tol / panels,
                                max_depth);
  }
  return sum;
}

}  // namespace polyfront

#endif  // POLYFRONT_QUADRATURE_HPP_
