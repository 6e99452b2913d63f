#pragma once

#include <cmath>
#include <numbers>

#include "hslimit/error.hpp"

namespace hslimit {

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

namespace detail {

template <class F>
double simpson_step(F &f, double a, double fa, double b, double fb, double m,
                    double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson quadrature with Richardson correction. `tol` is an
/// absolute error target for the whole interval.
template <class F>
double integrate_adaptive(F &&f, double a, double b, double tol = 1e-12,
                          int max_depth = 50) {
  if (b <= a)
    return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

/// Integral over [a, b] of a function that is smooth inside but only Hölder
/// continuous at b. The interval is split at b - (b-a) 2^-k, each piece
/// handled adaptively, until the remaining tail is below `tail_tol` given a
/// bound `sup_abs` on |f|.
template <class F>
double integrate_to_singular_end(F &&f, double a, double b, double sup_abs,
                                 double tol = 1e-13, double tail_tol = 1e-14) {
  if (b <= a)
    return 0.0;
  double total = 0.0;
  double lo = a;
  double width = 0.5 * (b - a);
  for (int k = 0; k < 200; ++k) {
    const double hi = b - width;
    total += integrate_adaptive(f, lo, hi, tol);
    lo = hi;
    if (sup_abs * (b - lo) < tail_tol)
      break;
    width *= 0.5;
  }
  return total;
}

/// Bisection for an increasing function g with g(lo) < 0 < g(hi).
template <class G>
double bisect_increasing(G &&g, double lo, double hi, double x_tol = 0.0,
                         int max_iter = 200) {
  double glo = g(lo);
  double ghi = g(hi);
  if (!(glo <= 0.0 && ghi >= 0.0))
    throw Error("bisect_increasing: root not bracketed");
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= x_tol)
      break;
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace hslimit
