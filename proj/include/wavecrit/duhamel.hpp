#pragma once

// The nonlinear Duhamel operator
//
//   Lu(t,r) = Int_0^t <s>^{-(p-1)} Int_{-1}^{1} H_u[s](t-s+r q) dq ds,
//   H_u[s](rho) = rho f(u(s,rho)) / 2,
//
// the Picard iteration u_{n+1} = u^lin + L u_n for global solutions, the
// admissible kappa range, and numerical verifiers for the one-dimensional
// estimate I(xi) and the zone bounds on I_0, I_0', I_{1,+-}.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wavecrit/exponents.hpp"
#include "wavecrit/field.hpp"
#include "wavecrit/profiles.hpp"
#include "wavecrit/quadrature.hpp"
#include "wavecrit/radial_linear.hpp"
#include "wavecrit/util.hpp"

namespace wavecrit::duhamel {

// Even nonlinearity with f(0) = 0 and |f'(u)| <= derivative_bound |u|^{p-1}.
struct Nonlinearity {
  double p = 2.0;
  std::function<double(double)> f;
  double derivative_bound = 2.0;

  static Nonlinearity power(double p) {
    Nonlinearity n;
    n.p = p;
    n.f = [p](double u) { return std::pow(std::abs(u), p); };
    n.derivative_bound = p;
    return n;
  }

  double operator()(double u) const { return f(u); }
};

struct KappaRange {
  double p = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool lower_inclusive = true;
  bool empty = true;

  bool contains(double kappa) const {
    if (empty) return false;
    if (lower_inclusive ? kappa < lower : kappa <= lower) return false;
    return kappa <= upper;
  }
};

// Admissible kappa for the fixed-point solver:
//   (3-p)/(p-1) <= kappa <= 2(p-1)  for p in (p0(5), 2),
//   1 < kappa <= 2(p-1)             for p >= 2.
// Empty (a value, not an error) when p <= p0(5); the two endpoint
// formulas coincide exactly at the root.
inline KappaRange kappa_range(double p) {
  if (!(p > 1.0)) throw std::domain_error("kappa_range: requires p > 1");
  KappaRange kr;
  kr.p = p;
  const double p0_5 = exponents::strauss_p0(5.0);
  if (p <= p0_5) return kr;
  if (p < 2.0) {
    kr.lower = (3.0 - p) / (p - 1.0);
    kr.upper = 2.0 * (p - 1.0);
    kr.lower_inclusive = true;
  } else {
    kr.lower = 1.0;
    kr.upper = 2.0 * (p - 1.0);
    kr.lower_inclusive = false;
  }
  kr.empty = kr.lower > kr.upper;
  return kr;
}

// Variant used by the integral-lemma verifier: for p > 2 the lemma holds
// on the wider interval [1/(p-1), 2(p-1)].
inline KappaRange kappa_range_lemma(double p) {
  KappaRange kr = kappa_range(p);
  if (!kr.empty && p > 2.0) {
    kr.lower = 1.0 / (p - 1.0);
    kr.lower_inclusive = true;
  }
  if (!kr.empty && p == 2.0) kr.upper = 2.0;
  return kr;
}

struct LOptions {
  quad::Options outer{1e-12, 45};
  quad::Options inner{1e-13, 45};
};

namespace detail {

// Inner integral Int_{-1}^{1} H_u[s](t-s+r q) dq for fixed s, computed as
// a rho-integral over [t-s-r, t-s+r] when r >= 1 (with the odd-part
// cancellation for t-s <= r) and as a q-integral otherwise.
template <class U>
double inner_average(const U& u, const Nonlinearity& f, double s, double tau, double r,
                     const quad::Options& opt) {
  auto h = [&](double rho) { return 0.5 * rho * f(u(s, rho)); };
  if (r == 0.0) return 2.0 * h(tau);
  if (r < 1.0) {
    auto integrand = [&](double q) { return h(tau + r * q); };
    return quad::integrate_or_throw(integrand, -1.0, 1.0, opt, "apply_L inner");
  }
  double lo = tau - r, hi = tau + r;
  if (tau <= r) lo = r - tau;  // H_u[s] odd
  quad::Options scaled = opt;
  scaled.abs_tol = opt.abs_tol * r;
  // u concentrates along |rho| = s and H has a kink at rho = 0; split
  // there so wide intervals cannot hide the ridge from the sampling.
  const double breaks[3] = {-s, 0.0, s};
  quad::Result res = quad::integrate_split(h, lo, hi, breaks, breaks + 3, scaled);
  if (!res.converged) throw numerical_error("apply_L inner: quadrature did not converge");
  return res.value / r;
}

}  // namespace detail

// Lu(t, r) for a generic evaluator u(s, rho); even in r by construction.
template <class U>
double apply_L_eval(const U& u, const Nonlinearity& f, double p, double t, double r,
                    const LOptions& opt = {}) {
  if (!(t >= 0.0)) throw std::domain_error("apply_L: requires t >= 0");
  if (t == 0.0) return 0.0;
  r = std::abs(r);
  auto outer = [&](double s) {
    return std::pow(bracket(s), -(p - 1.0)) * detail::inner_average(u, f, s, t - s, r, opt.inner);
  };
  double breaks[3] = {0.5 * (t - r), t - r, 0.5 * (t + r)};  // domain switch and cone ridges
  std::sort(breaks, breaks + 3);
  return quad::integrate_split(outer, 0.0, t, breaks, breaks + 3, opt.outer).value;
}

// d_r(r Lu)(t, r) = Int_0^t <s>^{-(p-1)} (H_u[s](t-s+r) + H_u[s](t-s-r)) ds.
template <class U>
double dr_rLu_eval(const U& u, const Nonlinearity& f, double p, double t, double r,
                   const LOptions& opt = {}) {
  if (!(t >= 0.0)) throw std::domain_error("dr_rLu: requires t >= 0");
  if (t == 0.0) return 0.0;
  r = std::abs(r);
  auto h = [&](double s, double rho) { return 0.5 * rho * f(u(s, rho)); };
  auto outer = [&](double s) {
    return std::pow(bracket(s), -(p - 1.0)) * (h(s, t - s + r) + h(s, t - s - r));
  };
  // |t - s -+ r| = s at s = (t -+ r)/2: the characteristic arguments cross
  // the light cone of u there.
  double breaks[3] = {0.5 * (t - r), t - r, 0.5 * (t + r)};
  std::sort(breaks, breaks + 3);
  return quad::integrate_split(outer, 0.0, t, breaks, breaks + 3, opt.outer).value;
}

// Spec-facing overloads on a sampled field (interpolation out of range is
// a domain error).
inline double apply_L(const SpaceTimeField& u, double p, double t, double r,
                      const LOptions& opt = {}) {
  FieldInterpolator interp(u, Extrapolation::Error);
  return apply_L_eval(interp, Nonlinearity::power(p), p, t, r, opt);
}

inline double dr_rLu(const SpaceTimeField& u, double p, double t, double r,
                     const LOptions& opt = {}) {
  FieldInterpolator interp(u, Extrapolation::Error);
  return dr_rLu_eval(interp, Nonlinearity::power(p), p, t, r, opt);
}

struct PicardGrid {
  double dt = 0.5;
  double dr = 0.5;
  double t_max = 50.0;
  // Radius of the region where norms are measured and the field is
  // reported; 0 selects t_max + 5.
  double r_norm = 0.0;
};

struct PicardOptions {
  double tol = 1e-7;       // absolute convergence threshold in X_kappa
  double tol_rel = 1e-3;   // ... or this fraction of the first correction
  int max_iter = 10;
  // Quadrature tolerances are scaled to the data size (epsilon^p for the
  // nonlinear integrals, epsilon for the linear fill) so that accuracy is
  // relative to the fields actually present.
  bool auto_quad_tol = true;
  double quad_tol_factor = 1e-5;
  LOptions l_opts{};
  quad::Options lin_opts{1e-12, 45};
  bool parallel = true;
  bool enforce_kappa_range = true;
};

struct IterationReport {
  std::vector<double> iterate_norms;  // ||u_n||_{X_kappa} on the norm region
  std::vector<double> differences;    // ||u_{n+1} - u_n||_{X_kappa}
  bool converged = false;
  int iterations = 0;
  double contraction_ratio = 0.0;  // geometric mean of successive difference ratios
  double correction_boundary_max = 0.0;
  radial_linear::WeightedNormReport final_norm;
  SpaceTimeField field;  // u restricted to the norm region
};

// Picard iteration u_0 = u^lin, u_{n+1} = u^lin + L u_n on a fixed tensor
// grid. The correction w_n = u_n - u^lin is stored out to
// r_norm + t_max and extended by zero beyond (its X_kappa decay makes the
// dropped tail negligible; the boundary magnitude is reported). u^lin is
// precomputed out to r_norm + 2 t_max so every characteristic sample of
// the linear part stays on-grid.
inline IterationReport picard_solve(const RadialProfile& g, double p, double kappa,
                                    const PicardGrid& grid, const PicardOptions& opt = {}) {
  const KappaRange kr = kappa_range(p);
  if (opt.enforce_kappa_range) {
    if (kr.empty)
      throw validation_error("picard_solve: kappa range empty (requires p > p0(5))");
    if (!kr.contains(kappa))
      throw validation_error("picard_solve: kappa outside the admissible range");
  }
  if (!(grid.dt > 0.0) || !(grid.dr > 0.0) || !(grid.t_max > 0.0))
    throw validation_error("picard_solve: grid steps and horizon must be positive");

  LOptions l_opts = opt.l_opts;
  quad::Options lin_opts = opt.lin_opts;
  if (opt.auto_quad_tol) {
    const double data_scale = std::max(g.epsilon, 1e-12);
    const double forcing_scale = std::pow(data_scale, p);
    l_opts.outer.abs_tol = std::max(1e-14, opt.quad_tol_factor * forcing_scale);
    l_opts.inner.abs_tol = std::max(1e-15, 0.1 * opt.quad_tol_factor * forcing_scale);
    lin_opts.abs_tol = std::max(1e-15, 1e-7 * data_scale);
  }

  const double r_norm = grid.r_norm > 0.0 ? grid.r_norm : grid.t_max + 5.0;
  const double r_store = r_norm + grid.t_max;
  const double r_lin = r_store + grid.t_max;

  const std::vector<double> t_grid = uniform_grid(grid.t_max, grid.dt);
  const std::vector<double> r_store_grid = uniform_grid(r_store, grid.dr);
  const std::vector<double> r_lin_grid = uniform_grid(r_lin, grid.dr);
  const std::size_t nr_norm = uniform_grid(r_norm, grid.dr).size();

  const Nonlinearity f = Nonlinearity::power(p);

  const SpaceTimeField ulin =
      radial_linear::fill_linear_field(g, t_grid, r_lin_grid, lin_opts, opt.parallel);
  const FieldInterpolator ulin_interp(ulin, Extrapolation::Error);

  SpaceTimeField w;  // current correction u_n - u^lin on the store grid
  w.t_grid = t_grid;
  w.r_grid = r_store_grid;
  w.origin = FieldOrigin::Picard;
  w.allocate();

  // Evaluator for u_n = u^lin + w_n; w is zero-extended beyond r_store.
  struct IterateEval {
    const FieldInterpolator* lin;
    const SpaceTimeField* w;
    FieldInterpolator w_interp;
    double operator()(double s, double rho) const { return (*lin)(s, rho) + w_interp(s, rho); }
  };

  IterationReport rep;
  const std::size_t nt = t_grid.size();
  const std::size_t nr_store = r_store_grid.size();

  auto compose_field = [&](const SpaceTimeField& corr) {
    SpaceTimeField out;
    out.t_grid = t_grid;
    out.r_grid = std::vector<double>(r_store_grid.begin(),
                                     r_store_grid.begin() + static_cast<long>(nr_norm));
    out.origin = FieldOrigin::Picard;
    out.allocate();
    const std::size_t nr_lin = ulin.nr();
    for (std::size_t it = 0; it < nt; ++it)
      for (std::size_t ir = 0; ir < nr_norm; ++ir) {
        out.u[it * nr_norm + ir] = ulin.u[it * nr_lin + ir] + corr.u[it * nr_store + ir];
        out.dr_ru[it * nr_norm + ir] =
            ulin.dr_ru[it * nr_lin + ir] + corr.dr_ru[it * nr_store + ir];
      }
    return out;
  };

  rep.iterate_norms.push_back(radial_linear::xkappa_norm(compose_field(w), kappa).total);

  for (int n = 0; n < opt.max_iter; ++n) {
    IterateEval u_n{&ulin_interp, &w, FieldInterpolator(w, Extrapolation::Zero)};

    SpaceTimeField w_next;
    w_next.t_grid = t_grid;
    w_next.r_grid = r_store_grid;
    w_next.origin = FieldOrigin::Picard;
    w_next.allocate();

    parallel_for(
        nt,
        [&](std::size_t it) {
          const double t = t_grid[it];
          for (std::size_t ir = 0; ir < nr_store; ++ir) {
            const double r = r_store_grid[ir];
            w_next.u[it * nr_store + ir] = apply_L_eval(u_n, f, p, t, r, l_opts);
            w_next.dr_ru[it * nr_store + ir] = dr_rLu_eval(u_n, f, p, t, r, l_opts);
          }
        },
        opt.parallel ? 0 : 1);

    const double diff =
        radial_linear::xkappa_norm_difference(w_next, w, kappa, nr_norm).total;
    rep.differences.push_back(diff);
    w = std::move(w_next);
    rep.iterate_norms.push_back(radial_linear::xkappa_norm(compose_field(w), kappa).total);
    rep.iterations = n + 1;

    if (diff < std::max(opt.tol, opt.tol_rel * rep.differences.front())) {
      rep.converged = true;
      break;
    }
    const std::size_t k = rep.differences.size();
    if (k >= 3 && rep.differences[k - 1] > rep.differences[k - 2] &&
        rep.differences[k - 2] > rep.differences[k - 3]) {
      throw divergence_error(
          "picard_solve: differences grew for 3 consecutive iterations "
          "(data too large or parameters outside the admissible range)",
          rep.differences);
    }
  }

  double ratio_log = 0.0;
  int ratio_count = 0;
  for (std::size_t i = 1; i < rep.differences.size(); ++i) {
    if (rep.differences[i - 1] > 0.0 && rep.differences[i] > 0.0) {
      ratio_log += std::log(rep.differences[i] / rep.differences[i - 1]);
      ++ratio_count;
    }
  }
  rep.contraction_ratio = ratio_count > 0 ? std::exp(ratio_log / ratio_count) : 0.0;

  for (std::size_t it = 0; it < nt; ++it)
    rep.correction_boundary_max =
        std::max(rep.correction_boundary_max, std::abs(w.u[it * nr_store + nr_store - 1]));

  rep.field = compose_field(w);
  rep.final_norm = radial_linear::xkappa_norm(rep.field, kappa);
  return rep;
}

// ---------------------------------------------------------------------------
// Estimate verifiers.

struct IEntry {
  double xi = 0.0;
  double value = 0.0;       // I(xi)
  double normalized = 0.0;  // I(xi) <xi>^{kappa - p}, bounded by the lemma
};

// I(xi) = Int_{-xi}^{xi} <eta+xi> <eta-xi>^{-(p-1)} <eta>^{-p(kappa-1)} deta.
inline std::vector<IEntry> verify_I(double p, double kappa, const std::vector<double>& xi_values,
                                    quad::Options opt = {1e-10, 45}) {
  std::vector<IEntry> out;
  out.reserve(xi_values.size());
  for (double xi : xi_values) {
    if (!(xi >= 0.0)) throw std::domain_error("verify_I: requires xi >= 0");
    IEntry e;
    e.xi = xi;
    if (xi > 0.0) {
      auto integrand = [&](double eta) {
        return bracket(eta + xi) * std::pow(bracket(eta - xi), -(p - 1.0)) *
               std::pow(bracket(eta), -p * (kappa - 1.0));
      };
      // Rough scale first, then an absolute tolerance proportional to it.
      const double scale =
          std::abs(quad::simpson(integrand, -xi, xi, 2000)) + std::pow(bracket(xi), p - kappa);
      quad::Options scaled = opt;
      scaled.abs_tol = std::max(1e-13, opt.abs_tol * scale);
      const double breaks[1] = {0.0};
      quad::Result r = quad::integrate_split(integrand, -xi, xi, breaks, breaks + 1, scaled);
      if (!r.converged) throw numerical_error("verify_I: quadrature did not converge");
      e.value = r.value;
    }
    e.normalized = e.value * std::pow(bracket(xi), kappa - p);
    out.push_back(e);
  }
  return out;
}

enum class EstimateZone {
  FarInterior,  // t >= 2r
  SmallR,       // r <= 1 and t <= 2r
  NearCone,     // r >= 1 and r <= t <= 2r
  Exterior,     // r >= 1 and t <= r
};

inline const char* to_string(EstimateZone z) {
  switch (z) {
    case EstimateZone::FarInterior: return "t>=2r";
    case EstimateZone::SmallR: return "r<=1,t<=2r";
    case EstimateZone::NearCone: return "r>=1,r<=t<=2r";
    default: return "r>=1,t<=r";
  }
}

struct ZoneSample {
  double t = 0.0, r = 0.0;
  EstimateZone zone = EstimateZone::FarInterior;
  double I0 = 0.0;        // I_0 (or I_0' in the exterior zone)
  double I1_minus = 0.0;
  double I1_plus = 0.0;
  double I0_bound = 0.0;
  double I1_minus_bound = 0.0;
  double I1_plus_bound = 0.0;
  double I0_ratio = 0.0;
  double I1_minus_ratio = 0.0;
  double I1_plus_ratio = 0.0;
};

namespace detail {

inline double envelope(double s, double rho, double p, double kappa) {
  return std::pow(bracket(s + std::abs(rho)), -p) *
         std::pow(bracket(s - std::abs(rho)), -p * (kappa - 1.0)) * bracket(rho);
}

inline double I0_integral(double t, double r, double p, double kappa, bool reduced,
                          const quad::Options& inner_opt, const quad::Options& outer_opt) {
  auto outer = [&](double s) {
    double lo = reduced ? r - (t - s) : t - s - r;
    double hi = reduced ? r + (t - s) : t - s + r;
    if (lo >= hi) return 0.0;
    auto f = [&](double rho) { return envelope(s, rho, p, kappa); };
    const double breaks[3] = {-s, 0.0, s};  // kinks of |rho| and |s -+ rho|
    return std::pow(bracket(s), -(p - 1.0)) *
           quad::integrate_split(f, lo, hi, breaks, breaks + 3, inner_opt).value;
  };
  double breaks[3] = {0.5 * (t - r), t - r, 0.5 * (t + r)};
  std::sort(breaks, breaks + 3);
  return quad::integrate_split(outer, 0.0, t, breaks, breaks + 3, outer_opt).value;
}

inline double I1_integral(double t, double r, double p, double kappa, double sign,
                          const quad::Options& opt) {
  auto f = [&](double s) {
    const double arg = t - s + sign * r;
    return std::pow(bracket(s), -(p - 1.0)) * envelope(s, arg, p, kappa);
  };
  double breaks[4] = {0.5 * (t - r), t - r, 0.5 * (t + r), t + r};
  std::sort(breaks, breaks + 4);
  return quad::integrate_split(f, 0.0, t, breaks, breaks + 4, opt).value;
}

}  // namespace detail

// Evaluates I_0 / I_0' and I_{1,+-} by direct quadrature of their
// definitions, classifies each sample into the zone structure of the
// propositions and reports computed/claimed ratios. Every ratio in a run
// must stay below one finite ceiling per zone.
inline std::vector<ZoneSample> verify_I0_I1(double p, double kappa,
                                            const std::vector<std::pair<double, double>>& samples,
                                            quad::Options opt = {1e-11, 45}) {
  std::vector<ZoneSample> out;
  out.reserve(samples.size());
  for (auto [t, r] : samples) {
    if (!(t >= 0.0) || !(r >= 0.0))
      throw std::domain_error("verify_I0_I1: requires t, r >= 0");
    ZoneSample z;
    z.t = t;
    z.r = r;
    const bool exterior = (r >= 1.0 && t <= r);
    if (t >= 2.0 * r)
      z.zone = EstimateZone::FarInterior;
    else if (r <= 1.0)
      z.zone = EstimateZone::SmallR;
    else if (t >= r)
      z.zone = EstimateZone::NearCone;
    else
      z.zone = EstimateZone::Exterior;

    z.I0 = detail::I0_integral(t, r, p, kappa, exterior, opt, opt);
    z.I1_minus = detail::I1_integral(t, r, p, kappa, -1.0, opt);
    z.I1_plus = detail::I1_integral(t, r, p, kappa, +1.0, opt);

    switch (z.zone) {
      case EstimateZone::FarInterior:
      case EstimateZone::SmallR:
        z.I0_bound = r * std::pow(bracket(t + r), -kappa);
        break;
      case EstimateZone::NearCone:
      case EstimateZone::Exterior:
        z.I0_bound = std::pow(bracket(t - r), -(kappa - 1.0));
        break;
    }
    z.I1_minus_bound = (t >= 2.0 * r) ? std::pow(bracket(t - r), -kappa)
                                      : std::pow(bracket(t - r), -(kappa - 1.0));
    z.I1_plus_bound = std::pow(bracket(t + r), -kappa);

    z.I0_ratio = z.I0_bound > 0.0 ? z.I0 / z.I0_bound : 0.0;
    z.I1_minus_ratio = z.I1_minus / z.I1_minus_bound;
    z.I1_plus_ratio = z.I1_plus / z.I1_plus_bound;
    out.push_back(z);
  }
  return out;
}

}  // namespace wavecrit::duhamel
