#pragma once

// Small scalar numerics shared by the modules: fixed Gauss-Legendre rules,
// adaptive Simpson, bracketed root finding and a vector RK4 step.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace rothe::numerics {

/// 8-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 8> kGaussNodes8 = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGaussWeights8 = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss_legendre8(F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGaussNodes8.size(); ++i) {
    sum += kGaussWeights8[i] * f(mid + half * kGaussNodes8[i]);
  }
  return half * sum;
}

namespace detail {
template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson with Richardson correction; `tol` is absolute.
template <class F>
double adaptive_simpson(F f, double a, double b, double tol,
                        int max_depth = 50) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Bisection for an increasing function g on [lo, hi] with g(lo) <= 0 <= g(hi).
template <class G>
double bisect_increasing(G&& g, double lo, double hi, int iterations = 200) {
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

using OdeRhs = std::function<void(double t, const std::vector<double>& y,
                                  std::vector<double>& dydt)>;

/// One classical Runge-Kutta step of size h, in place.
inline void rk4_step(const OdeRhs& rhs, double t, double h,
                     std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  rhs(t, y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  rhs(t + 0.5 * h, tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  rhs(t + 0.5 * h, tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  rhs(t + h, tmp, k4);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

}  // namespace rothe::numerics
