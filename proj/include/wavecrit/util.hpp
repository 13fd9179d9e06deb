#pragma once

// Small shared utilities: the <y> = 1 + |y| weight, error taxonomy,
// log-log least-squares fits, a deterministic parallel_for, grids and a
// FNV-1a hash used for content-addressed run directories.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wavecrit {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// <y> = 1 + |y|
inline double bracket(double y) { return 1.0 + std::abs(y); }

// Input failed validation before any numerics ran.
class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A quadrature or time stepper could not reach its tolerance.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fixed-point iteration diverged; carries the norm history seen so far.
class divergence_error : public std::runtime_error {
 public:
  divergence_error(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

inline bool nearly_equal(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Nodes 0, h, 2h, ..., up to and including x_max (x_max must be a near
// multiple of h; the last node is snapped to x_max).
inline std::vector<double> uniform_grid(double x_max, double h) {
  if (!(h > 0.0) || !(x_max >= 0.0))
    throw validation_error("uniform_grid: need h > 0 and x_max >= 0");
  const auto count = static_cast<std::size_t>(std::floor(x_max / h + 1e-9));
  std::vector<double> g(count + 1);
  for (std::size_t i = 0; i <= count; ++i) g[i] = static_cast<double>(i) * h;
  if (g.back() < x_max - 1e-9 * std::max(1.0, x_max)) g.push_back(x_max);
  g.back() = std::min(g.back(), x_max);
  return g;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t count = 0;
};

inline LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  LinearFit fit;
  const std::size_t n = std::min(xs.size(), ys.size());
  if (n < 2) return fit;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.count = n;
  if (n > 2) {
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ss += e * e;
    }
    fit.slope_stderr = std::sqrt(ss / (static_cast<double>(n - 2) * sxx));
  }
  return fit;
}

// Slope of log|v| against log<t> over the window t in [t_lo, t_hi];
// non-positive samples are skipped.
inline LinearFit fit_loglog_slope(const std::vector<double>& ts, const std::vector<double>& vs,
                                  double t_lo, double t_hi) {
  std::vector<double> xs, ys;
  const std::size_t n = std::min(ts.size(), vs.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (ts[i] < t_lo || ts[i] > t_hi) continue;
    const double a = std::abs(vs[i]);
    if (!(a > 0.0) || !std::isfinite(a)) continue;
    xs.push_back(std::log(bracket(ts[i])));
    ys.push_back(std::log(a));
  }
  return fit_line(xs, ys);
}

// Static round-robin partition; each index is computed exactly once and
// written to caller-owned storage, so the result does not depend on the
// thread schedule. Worker exceptions are rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned max_threads = 0) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (max_threads != 0) hw = std::min(hw, max_threads);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace wavecrit
