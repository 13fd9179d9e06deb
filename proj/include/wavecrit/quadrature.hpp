#pragma once

// Adaptive one-dimensional quadrature on a 7/15 Gauss-Kronrod pair with
// recursive bisection. The error budget is split proportionally to the
// subinterval length, so refinement concentrates where the local Kronrod
// error estimate is large. Evaluation order is fixed, which keeps results
// bit-reproducible run to run.

#include <cmath>
#include <string>
#include <utility>

#include "wavecrit/util.hpp"

namespace wavecrit::quad {

struct Options {
  double abs_tol = 1e-10;
  int max_depth = 45;
  // Bisect at least this deep before trusting the local error estimate;
  // guards against spikes that fall between the Kronrod nodes.
  int min_depth = 0;
};

struct Result {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  int depth_reached = 0;
  bool converged = true;
};

namespace detail {

// QUADPACK 15-point Kronrod nodes/weights and the embedded 7-point Gauss
// weights on [-1, 1].
inline constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
inline constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679,  0.1903505780647854,  0.2044329400752989, 0.2094821410847278};
inline constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
                                  0.4179591836734694};

template <class F>
inline void gk15(F& f, double a, double b, double& kronrod, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double f1 = f(c - x);
    const double f2 = f(c + x);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  kronrod = resk * h;
  err = std::abs((resk - resg) * h);
}

template <class F>
void refine(F& f, double a, double b, double tol, int depth, Options const& opt, Result& out) {
  double v, e;
  gk15(f, a, b, v, e);
  out.evaluations += 15;
  if (depth > out.depth_reached) out.depth_reached = depth;
  // Accept on tolerance or on the rounding floor of the local magnitude;
  // without the floor, tolerances far below the integrand scale recurse
  // to max_depth everywhere.
  const bool rounding_floor = e <= 1e-13 * std::abs(v);
  if (((e <= tol || rounding_floor) && depth >= opt.min_depth) || depth >= opt.max_depth) {
    if (e > tol && !rounding_floor && !(e <= 1e-2 * std::abs(v) + opt.abs_tol))
      out.converged = false;
    out.value += v;
    out.error_estimate += e;
    return;
  }
  const double c = 0.5 * (a + b);
  refine(f, a, c, 0.5 * tol, depth + 1, opt, out);
  refine(f, c, b, 0.5 * tol, depth + 1, opt, out);
}

}  // namespace detail

template <class F>
Result integrate(F&& f, double a, double b, Options opt = {}) {
  Result out;
  if (a == b) return out;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  detail::refine(f, a, b, opt.abs_tol, 0, opt, out);
  out.value *= sign;
  return out;
}

// Like integrate() but splits at interior breakpoints first (integrand
// kinks, zone switches); breakpoints outside (a, b) are ignored.
template <class F, class It>
Result integrate_split(F&& f, double a, double b, It break_first, It break_last, Options opt = {}) {
  Result out;
  if (a == b) return out;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  double last = a;
  const double len = b - a;
  for (It it = break_first; it != break_last; ++it) {
    const double x = *it;
    if (x <= last || x >= b) continue;
    Options piece = opt;
    piece.abs_tol = opt.abs_tol * ((x - last) / len);
    detail::refine(f, last, x, piece.abs_tol, 0, piece, out);
    last = x;
  }
  Options piece = opt;
  piece.abs_tol = opt.abs_tol * ((b - last) / len);
  detail::refine(f, last, b, piece.abs_tol, 0, piece, out);
  out.value *= sign;
  return out;
}

template <class F>
double integrate_or_throw(F&& f, double a, double b, Options opt = {},
                          const char* what = "quadrature") {
  Result r = integrate(std::forward<F>(f), a, b, opt);
  if (!r.converged)
    throw numerical_error(std::string(what) + ": did not reach tolerance (err=" +
                          std::to_string(r.error_estimate) + ", tol=" + std::to_string(opt.abs_tol) +
                          ", depth=" + std::to_string(r.depth_reached) + ")");
  return r.value;
}

// Fixed composite Simpson rule; used by test oracles and rough magnitude
// estimates. n_panels must be >= 1.
template <class F>
double simpson(F&& f, double a, double b, int n_panels) {
  const int n = 2 * n_panels;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + h * i) * ((i % 2 == 1) ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace wavecrit::quad
