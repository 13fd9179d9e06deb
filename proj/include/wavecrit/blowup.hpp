#pragma once

// Blow-up laboratory: the test weight phi_1, Glassey functionals F and
// F_1, the ODE blow-up lemma engine for F'' >= K1 (t+R)^{-q} F^p, a
// leapfrog finite-difference radial solver for desk-scale experiments,
// and the n = 3 Radon-transform check.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wavecrit/field.hpp"
#include "wavecrit/profiles.hpp"
#include "wavecrit/quadrature.hpp"
#include "wavecrit/transforms.hpp"
#include "wavecrit/util.hpp"

namespace wavecrit::blowup {

// phi_1(x) = Int_{S^{n-1}} e^{x.w} dw evaluated by quadrature over the
// sphere; n = 3 admits the closed form 4 pi sinh(r)/r.
inline double phi1(double r, int n, quad::Options opt = {1e-10, 45}) {
  if (!(r >= 0.0)) throw std::domain_error("phi1: requires r >= 0");
  if (n == 3) {
    auto f = [&](double theta) { return std::exp(r * std::cos(theta)) * std::sin(theta); };
    return 2.0 * kPi * quad::integrate_or_throw(f, 0.0, kPi, opt, "phi1");
  }
  if (n == 2) {
    auto f = [&](double theta) { return std::exp(r * std::cos(theta)); };
    return quad::integrate_or_throw(f, 0.0, 2.0 * kPi, opt, "phi1");
  }
  throw std::domain_error("phi1: quadrature form implemented for n in {2, 3}");
}

inline double phi1_closed_n3(double r) {
  if (r < 1e-6) return 4.0 * kPi * (1.0 + r * r / 6.0);
  return 4.0 * kPi * std::sinh(r) / r;
}

// log phi_1(r); phi_1 grows like e^r, so psi_1 = phi_1 e^{-t} is formed in
// log space. n = 1 uses phi_1 = 2 cosh r directly.
inline double log_phi1(double r, int n) {
  if (!(r >= 0.0)) throw std::domain_error("log_phi1: requires r >= 0");
  switch (n) {
    case 1:
      return r + std::log1p(std::exp(-2.0 * r));  // log(e^r + e^{-r})
    case 3:
      if (r < 1e-6) return std::log(4.0 * kPi * (1.0 + r * r / 6.0));
      if (r < 30.0) return std::log(4.0 * kPi * std::sinh(r) / r);
      return std::log(2.0 * kPi) + r + std::log1p(-std::exp(-2.0 * r)) - std::log(r);
    case 2: {
      if (r < 30.0) return std::log(phi1(r, 2));
      // 2 pi I_0(r) ~ sqrt(2 pi / r) e^r (1 + 1/(8r) + 9/(128 r^2)).
      return 0.5 * std::log(2.0 * kPi / r) + r +
             std::log1p(1.0 / (8.0 * r) + 9.0 / (128.0 * r * r));
    }
    default:
      throw std::domain_error("log_phi1: n in {1, 2, 3}");
  }
}

inline double surface_area(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    case 3: return 4.0 * kPi;
    default: throw std::domain_error("surface_area: n in {1, 2, 3}");
  }
}

struct GlasseySeries {
  std::vector<double> t;
  std::vector<double> F;   // F(t)  = |S^{n-1}| Int u r^{n-1} dr
  std::vector<double> F1;  // F1(t) = |S^{n-1}| Int u phi_1(r) e^{-t} r^{n-1} dr
};

// Composite trapezoid over the stored r grid (fields are compactly
// supported, so the grid covers the support).
inline GlasseySeries glassey_functionals(const SpaceTimeField& f, int n) {
  if (n < 1 || n > 3) throw std::domain_error("glassey_functionals: n in {1, 2, 3}");
  GlasseySeries out;
  const std::size_t nt = f.nt(), nr = f.nr();
  out.t = f.t_grid;
  out.F.resize(nt);
  out.F1.resize(nt);
  std::vector<double> rpow(nr), psi_weight(nr);
  for (std::size_t ir = 0; ir < nr; ++ir)
    rpow[ir] = std::pow(f.r_grid[ir], static_cast<double>(n - 1));
  const double area = surface_area(n);
  for (std::size_t it = 0; it < nt; ++it) {
    const double t = f.t_grid[it];
    for (std::size_t ir = 0; ir < nr; ++ir)
      psi_weight[ir] = std::exp(log_phi1(f.r_grid[ir], n) - t);
    double acc_f = 0.0, acc_f1 = 0.0;
    for (std::size_t ir = 0; ir + 1 < nr; ++ir) {
      const double h = f.r_grid[ir + 1] - f.r_grid[ir];
      const double a0 = f.u[it * nr + ir] * rpow[ir];
      const double a1 = f.u[it * nr + ir + 1] * rpow[ir + 1];
      acc_f += 0.5 * h * (a0 + a1);
      acc_f1 += 0.5 * h * (a0 * psi_weight[ir] + a1 * psi_weight[ir + 1]);
    }
    out.F[it] = area * acc_f;
    out.F1[it] = area * acc_f1;
  }
  return out;
}

// Lower bound of the positivity lemma:
//   F1(t) >= 1/2 (1 - e^{-2t}) Int (f+g) phi_1 + e^{-2t} Int f phi_1.
inline double f1_lower_bound(const RadialProfile& v0, const RadialProfile& v1, int n, double t,
                             quad::Options opt = {1e-10, 45}) {
  const double r_max = std::max(v0.support_radius, v1.support_radius);
  if (!std::isfinite(r_max))
    throw std::domain_error("f1_lower_bound: requires compactly supported data");
  auto weighted = [&](const RadialProfile& g) {
    if (g.is_zero()) return 0.0;
    auto integrand = [&](double r) {
      return g(r) * std::exp(log_phi1(r, n)) * std::pow(r, static_cast<double>(n - 1));
    };
    return surface_area(n) * quad::integrate_or_throw(integrand, 0.0, r_max, opt, "f1_lower_bound");
  };
  const double int_f = weighted(v0);
  const double int_fg = int_f + weighted(v1);
  return 0.5 * (1.0 - std::exp(-2.0 * t)) * int_fg + std::exp(-2.0 * t) * int_f;
}

// ---------------------------------------------------------------------------
// ODE blow-up lemma engine.

struct OdeBlowupInstance {
  double p = 2.0;
  double q = 2.0;
  double K1 = 1.0;
  double R = 1.0;
  double a = 1.0;
  double K0 = 1.0;
  double T1 = 0.0;
  // Initial conditions; NaN selects the marginal profile K0 (t+R)^a.
  double F0 = std::numeric_limits<double>::quiet_NaN();
  double Fdot0 = std::numeric_limits<double>::quiet_NaN();

  bool subcritical() const { return a >= 1.0 && a > (q - 2.0) / (p - 1.0); }
  bool critical() const {
    return nearly_equal(a, (q - 2.0) / (p - 1.0)) && q >= p + 1.0 - 1e-12;
  }
};

enum class BlowupVerdictKind { BlewUp, BoundedThroughHorizon, Inconclusive };

inline const char* to_string(BlowupVerdictKind k) {
  switch (k) {
    case BlowupVerdictKind::BlewUp: return "blew-up";
    case BlowupVerdictKind::BoundedThroughHorizon: return "bounded-through-horizon";
    default: return "inconclusive";
  }
}

struct BlowupDiagnostics {
  std::vector<double> times;
  std::vector<double> F_series;
  std::vector<double> F1_series;  // empty for pure ODE runs
  double fitted_growth_exponent = 0.0;
  double fit_stderr = 0.0;
  std::optional<double> estimated_Tstar;
  BlowupVerdictKind verdict = BlowupVerdictKind::Inconclusive;
  double escape_time_coarse = 0.0;
  double escape_time_fine = 0.0;
  long steps = 0;
};

namespace detail {

struct OdeRun {
  bool escaped = false;
  bool underflow = false;
  double escape_time = 0.0;
  long steps = 0;
  std::vector<double> times, values;
};

// RK4 with a step controlled by the local scales F/|F'| and sqrt(F/F'');
// the step collapses geometrically as a blow-up is approached.
inline OdeRun integrate_extremal(const OdeBlowupInstance& inst, double horizon,
                                 double escape_threshold, double safety, std::size_t store_max) {
  OdeRun run;
  auto rhs = [&](double t, double F) {
    return inst.K1 * std::pow(t + inst.R, -inst.q) * std::pow(std::abs(F), inst.p);
  };
  double t = inst.T1;
  double F = std::isnan(inst.F0) ? inst.K0 * std::pow(inst.T1 + inst.R, inst.a) : inst.F0;
  double V = std::isnan(inst.Fdot0)
                 ? inst.a * inst.K0 * std::pow(inst.T1 + inst.R, inst.a - 1.0)
                 : inst.Fdot0;
  const double dt_max = std::max((horizon - inst.T1) / 2000.0, 1e-12);
  const long max_steps = 50'000'000;
  const std::size_t stride_target = store_max == 0 ? 1 : store_max;

  std::vector<double> ts, fs;
  ts.push_back(t);
  fs.push_back(F);

  while (t < horizon) {
    const double acc = rhs(t, F);
    double dt = dt_max;
    if (std::abs(V) > 0.0) dt = std::min(dt, safety * (std::abs(F) + inst.R) / std::abs(V));
    if (acc > 0.0) dt = std::min(dt, safety * std::sqrt((std::abs(F) + inst.R) / acc));
    dt = std::min(dt, horizon - t);
    if (!(dt > 1e-13 * (t + inst.R))) {
      run.underflow = true;
      break;
    }
    // Classical RK4 on (F, V).
    const double k1F = V, k1V = rhs(t, F);
    const double k2F = V + 0.5 * dt * k1V, k2V = rhs(t + 0.5 * dt, F + 0.5 * dt * k1F);
    const double k3F = V + 0.5 * dt * k2V, k3V = rhs(t + 0.5 * dt, F + 0.5 * dt * k2F);
    const double k4F = V + dt * k3V, k4V = rhs(t + dt, F + dt * k3F);
    const double F_new = F + dt / 6.0 * (k1F + 2.0 * k2F + 2.0 * k3F + k4F);
    const double V_new = V + dt / 6.0 * (k1V + 2.0 * k2V + 2.0 * k3V + k4V);
    ++run.steps;
    if (run.steps > max_steps) {
      run.underflow = true;
      break;
    }
    if (!std::isfinite(F_new) || F_new >= escape_threshold) {
      // Linear interpolation of the crossing inside the step.
      double cross = t + dt;
      if (std::isfinite(F_new) && F_new > F && V > 0.0)
        cross = t + dt * (escape_threshold - F) / (F_new - F);
      run.escaped = true;
      run.escape_time = cross;
      ts.push_back(cross);
      fs.push_back(escape_threshold);
      break;
    }
    t += dt;
    F = F_new;
    V = V_new;
    ts.push_back(t);
    fs.push_back(F);
  }

  // Subsample the stored series to at most store_max points.
  const std::size_t stride = std::max<std::size_t>(1, ts.size() / stride_target);
  for (std::size_t i = 0; i < ts.size(); i += stride) {
    run.times.push_back(ts[i]);
    run.values.push_back(fs[i]);
  }
  if (run.times.back() != ts.back()) {
    run.times.push_back(ts.back());
    run.values.push_back(fs.back());
  }
  return run;
}

}  // namespace detail

struct OdeOptions {
  double step_safety = 0.02;
  std::size_t store_max = 2000;
  double fit_window_lo = -1.0;  // <0 selects [T1 + 0.25 W, T1 + 0.75 W]
  double fit_window_hi = -1.0;
};

// Integrates the extremal ODE F'' = K1 (t+R)^{-q} |F|^p twice (step
// constants c and c/2); a blow-up verdict requires both runs to escape,
// and T* is the Richardson extrapolation 2 T_{c/2} - T_c of the escape
// times.
inline BlowupDiagnostics ode_blowup_integrate(const OdeBlowupInstance& inst, double horizon,
                                              double escape_threshold,
                                              const OdeOptions& opt = {}) {
  if (!(inst.p > 1.0)) throw std::domain_error("ode_blowup_integrate: requires p > 1");
  if (!(inst.K1 > 0.0) || !(inst.R > 0.0))
    throw std::domain_error("ode_blowup_integrate: requires K1, R > 0");
  if (!(horizon > inst.T1)) throw std::domain_error("ode_blowup_integrate: horizon <= T1");

  detail::OdeRun coarse =
      detail::integrate_extremal(inst, horizon, escape_threshold, opt.step_safety, opt.store_max);
  detail::OdeRun fine = detail::integrate_extremal(inst, horizon, escape_threshold,
                                                   0.5 * opt.step_safety, opt.store_max);

  BlowupDiagnostics diag;
  diag.times = fine.times;
  diag.F_series = fine.values;
  diag.steps = coarse.steps + fine.steps;
  diag.escape_time_coarse = coarse.escape_time;
  diag.escape_time_fine = fine.escape_time;

  if (coarse.escaped && fine.escaped) {
    diag.verdict = BlowupVerdictKind::BlewUp;
    diag.estimated_Tstar = 2.0 * fine.escape_time - coarse.escape_time;
  } else if (coarse.escaped != fine.escaped || coarse.underflow || fine.underflow) {
    diag.verdict = BlowupVerdictKind::Inconclusive;
  } else {
    diag.verdict = BlowupVerdictKind::BoundedThroughHorizon;
  }

  // Growth-exponent fit of log F against log(t + R) over the fit window.
  const double t_end = fine.times.back();
  double lo = opt.fit_window_lo, hi = opt.fit_window_hi;
  if (lo < 0.0 || hi <= lo) {
    lo = inst.T1 + 0.25 * (t_end - inst.T1);
    hi = inst.T1 + 0.75 * (t_end - inst.T1);
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < fine.times.size(); ++i) {
    const double t = fine.times[i], F = fine.values[i];
    if (t < lo || t > hi || !(F > 0.0)) continue;
    xs.push_back(std::log(t + inst.R));
    ys.push_back(std::log(F));
  }
  const LinearFit fit = fit_line(xs, ys);
  diag.fitted_growth_exponent = fit.slope;
  diag.fit_stderr = fit.slope_stderr;
  return diag;
}

// ---------------------------------------------------------------------------
// Finite-difference radial solver.

struct FdGrid {
  double dr = 0.02;
  double dt = 0.0;      // 0 selects 0.4 dr / sqrt(n)
  double r_max = 0.0;   // 0 selects data support + horizon + padding
  double store_dt = 0.5;  // spacing of stored time levels
};

struct FdOptions {
  double overflow_guard = 1e12;
  double cfl_safety = 0.98;  // dt <= cfl_safety * dr / sqrt(n)
  double speed_weight_constant = 1.0;
};

struct FdResult {
  SpaceTimeField field;
  bool blowup_candidate = false;
  double blow_time = 0.0;
  double data_support_radius = 0.0;
  long steps = 0;
};

// Leapfrog in time, centered in space, for
//   u_tt + (mu/<t>) u_t + mass_coefficient <t>^{-2} u
//     = u_rr + ((n-1)/r) u_r + C <t>^w |u|^p,
// with even reflection at r = 0 and the Laplacian limit n u_rr at the
// origin cell. The damping term is centered, so the update stays explicit.
inline FdResult radial_fd_solve(const transforms::ProblemSpec& spec, const RadialProfile& v0,
                                const RadialProfile& v1, const FdGrid& grid, double horizon,
                                const FdOptions& opt = {}) {
  using transforms::ProblemForm;
  if (spec.form != ProblemForm::Damped && spec.form != ProblemForm::WeightedWave)
    throw std::domain_error("radial_fd_solve: supports the damped and weighted-wave forms");
  if (spec.n < 1 || spec.n > 3) throw std::domain_error("radial_fd_solve: n in {1, 2, 3}");
  if (spec.initial_time < 0.0)
    throw validation_error("radial_fd_solve: negative initial time is not representable");
  const double support = std::max(v0.support_radius, v1.support_radius);
  if (!std::isfinite(support))
    throw validation_error("radial_fd_solve: requires compactly supported data");
  if (!(grid.dr > 0.0) || !(horizon > spec.initial_time))
    throw validation_error("radial_fd_solve: need dr > 0 and horizon > initial time");

  const int n = spec.n;
  const double dr = grid.dr;
  const double cfl_limit = opt.cfl_safety * dr / std::sqrt(static_cast<double>(n));
  const double dt = grid.dt > 0.0 ? grid.dt : 0.4 * dr / std::sqrt(static_cast<double>(n));
  if (dt > cfl_limit)
    throw validation_error("radial_fd_solve: time step violates the CFL limit dt <= " +
                           std::to_string(cfl_limit));

  const double t0 = spec.initial_time;
  const double span = horizon - t0;
  const double r_max = grid.r_max > 0.0 ? grid.r_max : support + span + 4.0 * dr;
  const std::size_t nr = static_cast<std::size_t>(std::ceil(r_max / dr)) + 1;
  const long nsteps = static_cast<long>(std::ceil(span / dt));
  const long stride = std::max<long>(1, static_cast<long>(std::llround(grid.store_dt / dt)));

  const double mu = spec.form == ProblemForm::Damped ? spec.mu : 0.0;
  const double mass_c = spec.mass_coefficient;
  const double w = spec.weight_exponent;
  const double cnl = spec.nonlinearity_constant * opt.speed_weight_constant;
  const double pexp = spec.p;

  std::vector<double> prev(nr), cur(nr), next(nr);
  for (std::size_t j = 0; j < nr; ++j) prev[j] = v0(static_cast<double>(j) * dr);

  auto laplacian = [&](const std::vector<double>& u, std::size_t j) {
    if (j == 0) return static_cast<double>(n) * 2.0 * (u[1] - u[0]) / (dr * dr);
    if (j + 1 >= nr) return 0.0;
    const double r = static_cast<double>(j) * dr;
    return (u[j + 1] - 2.0 * u[j] + u[j - 1]) / (dr * dr) +
           (n - 1.0) / r * (u[j + 1] - u[j - 1]) / (2.0 * dr);
  };
  auto forcing = [&](double t, double u) {
    return cnl * std::pow(bracket(t), w) * std::pow(std::abs(u), pexp) -
           mass_c * std::pow(bracket(t), -2.0) * u;
  };

  // First step by Taylor expansion at t0.
  for (std::size_t j = 0; j < nr; ++j) {
    const double r = static_cast<double>(j) * dr;
    const double g = v1(r);
    const double acc = laplacian(prev, j) + forcing(t0, prev[j]) - mu / bracket(t0) * g;
    cur[j] = prev[j] + dt * g + 0.5 * dt * dt * acc;
  }
  cur[nr - 1] = 0.0;

  FdResult out;
  out.data_support_radius = support;
  SpaceTimeField& f = out.field;
  f.origin = FieldOrigin::FiniteDifference;
  f.problem = transforms::to_string(spec.form);
  f.r_grid.resize(nr);
  for (std::size_t j = 0; j < nr; ++j) f.r_grid[j] = static_cast<double>(j) * dr;

  std::vector<std::vector<double>> stored;
  auto store_level = [&](double t, const std::vector<double>& u) {
    f.t_grid.push_back(t);
    stored.push_back(u);
  };
  store_level(t0, prev);
  if (stride == 1) store_level(t0 + dt, cur);

  double t = t0 + dt;
  for (long k = 1; k < nsteps; ++k) {
    const double d = mu / bracket(t);
    const double denom = 1.0 + 0.5 * d * dt;
    for (std::size_t j = 0; j + 1 < nr; ++j) {
      const double rhs = laplacian(cur, j) + forcing(t, cur[j]);
      next[j] =
          (rhs * dt * dt + 2.0 * cur[j] - prev[j] + 0.5 * d * dt * prev[j]) / denom;
    }
    next[nr - 1] = 0.0;
    ++out.steps;
    t += dt;

    double umax = 0.0;
    for (double x : next) umax = std::max(umax, std::abs(x));
    if (!std::isfinite(umax) || umax > opt.overflow_guard) {
      out.blowup_candidate = true;
      out.blow_time = t;
      break;
    }
    std::swap(prev, cur);
    std::swap(cur, next);
    if ((k + 1) % stride == 0 || k + 1 == nsteps) store_level(t, cur);
  }

  const std::size_t nt = f.t_grid.size();
  f.u.resize(nt * nr);
  f.dr_ru.resize(nt * nr);
  for (std::size_t it = 0; it < nt; ++it) {
    const std::vector<double>& u = stored[it];
    for (std::size_t j = 0; j < nr; ++j) f.u[it * nr + j] = u[j];
    // d_r(r u), centered; odd extension of (r u) through the origin
    // gives (r1 u1 - (-r1 u1)) / (2 dr) = u1 at r = 0.
    f.dr_ru[it * nr + 0] = u[1];
    for (std::size_t j = 1; j + 1 < nr; ++j) {
      const double rp = static_cast<double>(j + 1) * dr, rm = static_cast<double>(j - 1) * dr;
      f.dr_ru[it * nr + j] = (rp * u[j + 1] - rm * u[j - 1]) / (2.0 * dr);
    }
    f.dr_ru[it * nr + nr - 1] = 0.0;
  }
  return out;
}

// Radon transform of a radial field in n = 3:
//   Ru(t, rho) = 2 pi Int_rho^{r_max} u(t, r) r dr
// (plane integral of u over {x . w = rho}).
inline double radon_n3(const SpaceTimeField& f, double t, double rho) {
  if (!(rho >= 0.0)) throw std::domain_error("radon_n3: requires rho >= 0");
  // Nearest stored time level.
  std::size_t it = 0;
  double best = kInf;
  for (std::size_t i = 0; i < f.nt(); ++i) {
    const double d = std::abs(f.t_grid[i] - t);
    if (d < best) {
      best = d;
      it = i;
    }
  }
  const std::size_t nr = f.nr();
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < nr; ++j) {
    const double r0 = f.r_grid[j], r1 = f.r_grid[j + 1];
    if (r1 <= rho) continue;
    double a = std::max(r0, rho);
    const double w0 = f.u[it * nr + j], w1 = f.u[it * nr + j + 1];
    // Linear interpolation of u on [a, r1], exact integral of u(r) r dr.
    auto uval = [&](double r) { return w0 + (w1 - w0) * (r - r0) / (r1 - r0); };
    const double ua = uval(a), ub = w1;
    const double h = r1 - a;
    acc += h / 6.0 * (ua * a * 2.0 + ua * r1 + ub * a + ub * r1 * 2.0);
  }
  return 2.0 * kPi * acc;
}

}  // namespace wavecrit::blowup
