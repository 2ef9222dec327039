#pragma once

#include <cmath>
#include <functional>

#include "rtmvdr/errors.hpp"

namespace rtmvdr {

namespace detail {

template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0) throw QuadratureFailure("adaptive quadrature depth exhausted");
  if (std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature on [a, b].
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-12) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 60);
}

/// Integral over [0, inf) via the substitution t = u / (1 - u).
template <class F>
double integrate_halfline(const F& f, double tol = 1e-12) {
  auto g = [&f](double u) {
    if (u >= 1.0) return 0.0;
    double t = u / (1.0 - u);
    double jac = 1.0 / ((1.0 - u) * (1.0 - u));
    return f(t) * jac;
  };
  return integrate(g, 0.0, 1.0, tol);
}

}  // namespace rtmvdr
