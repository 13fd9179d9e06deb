#pragma once

// Closed-form solver for the free radial wave equation in n = 3,
//
//   u_tt - u_rr - (2/r) u_r = 0,  u(0,r) = 0,  u_t(0,r) = g(r),
//
// via u(t,r) = Int_{-1}^{1} H_g(t + r s) ds with H_g(rho) = rho g(rho)/2,
// together with the weighted sup-norm framework
//   ||u||_{X_kappa} = sup <t+|r|><t-|r|>^{kappa-1} |u|
//                   + sup <r>^{-1} <t+|r|><t-|r|>^{kappa-1} |d_r(r u)|.

#include <cmath>
#include <utility>

#include "wavecrit/field.hpp"
#include "wavecrit/profiles.hpp"
#include "wavecrit/quadrature.hpp"
#include "wavecrit/util.hpp"

namespace wavecrit::radial_linear {

// H_g(rho) = rho g(rho) / 2, odd in rho since g is even. Holds its own
// copy of the profile, so it can outlive the argument.
class OddSourceProfile {
 public:
  explicit OddSourceProfile(RadialProfile g) : g_(std::move(g)) {}
  double operator()(double rho) const { return 0.5 * rho * g_(rho); }
  double derivative(double rho) const { return 0.5 * (g_(rho) + rho * g_.derivative(rho)); }

 private:
  RadialProfile g_;
};

inline OddSourceProfile h_of(RadialProfile g) { return OddSourceProfile(std::move(g)); }

namespace detail {

// Int_{-1}^{1} H(t + r s) ds, with the spherical-means cancellation
// Int_{t-r}^{r-t} H = 0 applied when t <= r (H odd). Unit amplitude; the
// caller rescales, which keeps the result exactly linear in the data.
// support clips the rho-domain for compactly supported data, so narrow
// supports inside wide intervals are never missed by the sampling.
template <class H>
double sigma_average(H&& h, double t, double r, double support, const quad::Options& opt,
                     const char* what) {
  r = std::abs(r);
  if (r == 0.0) return 2.0 * h(t);
  if (r < 1.0) {
    auto f = [&](double s) { return h(t + r * s); };
    return quad::integrate_or_throw(f, -1.0, 1.0, opt, what);
  }
  double lo = t - r, hi = t + r;
  if (t <= r) lo = r - t;  // odd-part cancellation
  if (std::isfinite(support)) {
    // H vanishes outside [-support, support]; on [r-t, r+t] it also
    // vanishes below r - t >= 0, so clipping keeps the value exact.
    lo = std::max(lo, -support);
    hi = std::min(hi, support);
    if (lo >= hi) return 0.0;
  }
  quad::Options scaled = opt;
  scaled.abs_tol = opt.abs_tol * r;
  auto f = [&](double rho) { return h(rho); };
  return quad::integrate_or_throw(f, lo, hi, scaled, what) / r;
}

}  // namespace detail

// u^lin(t, r); exact branch u(t, 0) = t g(t) at the origin.
inline double linear_solution(const RadialProfile& g, double t, double r,
                              quad::Options opt = {}) {
  if (!(t >= 0.0)) throw std::domain_error("linear_solution: requires t >= 0");
  if (g.is_zero()) return 0.0;
  r = std::abs(r);
  if (r == 0.0) return t * g(t);
  auto unit = [&](double rho) {
    const double a = std::abs(rho);
    if (a >= g.support_radius) return 0.0;
    return 0.5 * rho * g.shape(a);
  };
  return g.amplitude * detail::sigma_average(unit, t, r, g.support_radius, opt, "linear_solution");
}

// Pure-quadrature path (no origin shortcut); used to cross-check the
// closed-form r = 0 branch.
inline double linear_solution_quadrature(const RadialProfile& g, double t, double r,
                                         quad::Options opt = {}) {
  if (!(t >= 0.0)) throw std::domain_error("linear_solution_quadrature: requires t >= 0");
  if (g.is_zero()) return 0.0;
  r = std::abs(r);
  auto unit = [&](double s) {
    const double rho = t + r * s;
    const double a = std::abs(rho);
    if (a >= g.support_radius) return 0.0;
    return 0.5 * rho * g.shape(a);
  };
  return g.amplitude * quad::integrate_or_throw(unit, -1.0, 1.0, opt, "linear_solution_quadrature");
}

// d_r(r u^lin) = H_g(t+r) + H_g(t-r), exactly (no quadrature).
inline double dr_ru_linear(const RadialProfile& g, double t, double r) {
  OddSourceProfile h(g);
  return h(t + r) + h(t - r);
}

// r d_t u^lin = H_g(t+r) - H_g(t-r).
inline double dt_ru_linear(const RadialProfile& g, double t, double r) {
  OddSourceProfile h(g);
  return h(t + r) - h(t - r);
}

inline SpaceTimeField fill_linear_field(const RadialProfile& g, std::vector<double> t_grid,
                                        std::vector<double> r_grid, quad::Options opt = {},
                                        bool parallel = true) {
  SpaceTimeField f;
  f.t_grid = std::move(t_grid);
  f.r_grid = std::move(r_grid);
  f.origin = FieldOrigin::Linear;
  f.allocate();
  const std::size_t nr = f.nr();
  parallel_for(
      f.nt(),
      [&](std::size_t it) {
        const double t = f.t_grid[it];
        for (std::size_t ir = 0; ir < nr; ++ir) {
          const double r = f.r_grid[ir];
          f.u[it * nr + ir] = linear_solution(g, t, r, opt);
          f.dr_ru[it * nr + ir] = dr_ru_linear(g, t, r);
        }
      },
      parallel ? 0 : 1);
  f.validate();
  return f;
}

struct WeightedNormReport {
  double norm_u = 0.0;
  double norm_dru = 0.0;
  double total = 0.0;
  double argmax_u_t = 0.0, argmax_u_r = 0.0;
  double argmax_dru_t = 0.0, argmax_dru_r = 0.0;
};

inline double weight_u(double t, double r, double kappa) {
  return bracket(t + std::abs(r)) * std::pow(bracket(t - std::abs(r)), kappa - 1.0);
}

// Grid supremum of the two weighted components of the X_kappa norm.
inline WeightedNormReport xkappa_norm(const SpaceTimeField& f, double kappa) {
  if (!(kappa > 1.0)) throw std::domain_error("xkappa_norm: requires kappa > 1");
  WeightedNormReport rep;
  const std::size_t nr = f.nr();
  for (std::size_t it = 0; it < f.nt(); ++it) {
    const double t = f.t_grid[it];
    for (std::size_t ir = 0; ir < nr; ++ir) {
      const double r = f.r_grid[ir];
      const double w = weight_u(t, r, kappa);
      const double vu = w * std::abs(f.u[it * nr + ir]);
      const double vd = w / bracket(r) * std::abs(f.dr_ru[it * nr + ir]);
      if (vu > rep.norm_u) {
        rep.norm_u = vu;
        rep.argmax_u_t = t;
        rep.argmax_u_r = r;
      }
      if (vd > rep.norm_dru) {
        rep.norm_dru = vd;
        rep.argmax_dru_t = t;
        rep.argmax_dru_r = r;
      }
    }
  }
  rep.total = rep.norm_u + rep.norm_dru;
  return rep;
}

// Same norm evaluated on the difference of two equally gridded fields.
inline WeightedNormReport xkappa_norm_difference(const SpaceTimeField& a, const SpaceTimeField& b,
                                                 double kappa, std::size_t nr_limit = 0) {
  WeightedNormReport rep;
  const std::size_t nr = a.nr();
  const std::size_t nr_use = nr_limit == 0 ? nr : std::min(nr, nr_limit);
  for (std::size_t it = 0; it < a.nt(); ++it) {
    const double t = a.t_grid[it];
    for (std::size_t ir = 0; ir < nr_use; ++ir) {
      const double r = a.r_grid[ir];
      const double w = weight_u(t, r, kappa);
      const double vu = w * std::abs(a.u[it * nr + ir] - b.u[it * nr + ir]);
      const double vd = w / bracket(r) * std::abs(a.dr_ru[it * nr + ir] - b.dr_ru[it * nr + ir]);
      if (vu > rep.norm_u) {
        rep.norm_u = vu;
        rep.argmax_u_t = t;
        rep.argmax_u_r = r;
      }
      if (vd > rep.norm_dru) {
        rep.norm_dru = vd;
        rep.argmax_dru_t = t;
        rep.argmax_dru_r = r;
      }
    }
  }
  rep.total = rep.norm_u + rep.norm_dru;
  return rep;
}

}  // namespace wavecrit::radial_linear
