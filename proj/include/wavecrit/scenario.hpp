#pragma once

// Scenario: one experiment description parsed from a TOML file, with
// validation and a canonical serialization used for content addressing.

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavecrit/duhamel.hpp"
#include "wavecrit/profiles.hpp"
#include "wavecrit/toml_lite.hpp"
#include "wavecrit/transforms.hpp"
#include "wavecrit/util.hpp"

namespace wavecrit::harness {

enum class SolverKind { Linear, Picard, Fd, OdeLemma, Verify, Exponents, Classify, Transform };

inline const char* to_string(SolverKind s) {
  switch (s) {
    case SolverKind::Linear: return "linear";
    case SolverKind::Picard: return "picard";
    case SolverKind::Fd: return "fd";
    case SolverKind::OdeLemma: return "ode-lemma";
    case SolverKind::Verify: return "verify";
    case SolverKind::Exponents: return "exponents";
    case SolverKind::Classify: return "classify";
    default: return "transform";
  }
}

inline std::optional<SolverKind> solver_from_string(const std::string& s) {
  if (s == "linear") return SolverKind::Linear;
  if (s == "picard") return SolverKind::Picard;
  if (s == "fd") return SolverKind::Fd;
  if (s == "ode-lemma" || s == "blowup-ode") return SolverKind::OdeLemma;
  if (s == "verify") return SolverKind::Verify;
  if (s == "exponents") return SolverKind::Exponents;
  if (s == "classify") return SolverKind::Classify;
  if (s == "transform") return SolverKind::Transform;
  return std::nullopt;
}

struct DataDescriptor {
  std::string profile = "zero";  // zero | algebraic | bump
  double epsilon = 0.0;          // amplitude for algebraic profiles
  double height = 0.0;           // amplitude for bumps
  double radius = 1.0;
  double kappa = 1.5;

  RadialProfile build() const {
    if (profile == "zero") return zero_profile();
    if (profile == "algebraic") return algebraic_profile(epsilon, kappa);
    if (profile == "bump") return bump_profile(height, radius, kappa);
    throw validation_error("data profile must be zero|algebraic|bump, got '" + profile + "'");
  }
};

struct GridConfig {
  double dt = 0.5;
  double dr = 0.5;
  double t_max = 50.0;
  double r_max = 0.0;     // 0 = auto
  double store_dt = 0.5;  // fd output spacing
};

struct OdeConfig {
  double p = 2.0, q = 2.0, K0 = 1.0, K1 = 1.0, R = 1.0, a = 1.0, T1 = 0.0;
  double F0 = std::numeric_limits<double>::quiet_NaN();
  double Fdot0 = std::numeric_limits<double>::quiet_NaN();
  double horizon = 1e3;
  double escape_threshold = 1e12;
};

struct VerifyConfig {
  std::vector<double> p_values{1.9};
  std::vector<double> kappa_values{1.5};
  std::vector<double> xi_values{10.0, 100.0, 1000.0};
  int zone_samples = 100;
  double sample_t_max = 200.0;
};

struct FitWindow {
  double t_lo = 10.0;
  double t_hi = 50.0;
};

struct Scenario {
  std::string name = "scenario";
  SolverKind solver = SolverKind::Linear;
  transforms::ProblemSpec problem;
  std::string transform = "auto";  // for the transform subcommand
  double kappa = 1.5;
  DataDescriptor data;      // g = u_t(0) for linear/picard
  DataDescriptor data_v0;   // displacement datum for fd
  bool has_v0 = false;
  GridConfig grid;
  OdeConfig ode;
  VerifyConfig verify;
  FitWindow fit;
  double tol = 1e-7;
  int max_iter = 8;

  // Sweep axes: parameter name -> values. Applied by set_parameter.
  std::map<std::string, std::vector<double>> sweep_axes;

  void set_parameter(const std::string& key, double value);
  std::string canonical() const;
  std::string hash() const { return hex16(fnv1a64(canonical())); }
  std::vector<std::string> validate() const;
};

inline void Scenario::set_parameter(const std::string& key, double value) {
  if (key == "p") {
    problem.p = value;
    ode.p = value;
  } else if (key == "mu")
    problem.mu = value;
  else if (key == "m")
    problem.m = value;
  else if (key == "n")
    problem.n = static_cast<int>(std::llround(value));
  else if (key == "kappa") {
    kappa = value;
    data.kappa = value;
  } else if (key == "epsilon")
    data.epsilon = value;
  else if (key == "height")
    data.height = value;
  else if (key == "radius")
    data.radius = value;
  else if (key == "t_max")
    grid.t_max = value;
  else if (key == "K0")
    ode.K0 = value;
  else if (key == "K1")
    ode.K1 = value;
  else if (key == "q")
    ode.q = value;
  else
    throw validation_error("sweep: unknown parameter '" + key + "'");
}

namespace detail {

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

// Canonical key=value serialization (sorted, locale-independent); the
// scenario hash is FNV-1a over this string.
inline std::string Scenario::canonical() const {
  std::map<std::string, std::string> kv;
  kv["name"] = name;
  kv["solver"] = to_string(solver);
  kv["problem.n"] = detail::fmt(problem.n);
  kv["problem.mu"] = detail::fmt(problem.mu);
  kv["problem.m"] = detail::fmt(problem.m);
  kv["problem.p"] = detail::fmt(problem.p);
  kv["problem.form"] = transforms::to_string(problem.form);
  kv["problem.weight_exponent"] = detail::fmt(problem.weight_exponent);
  kv["problem.mass_coefficient"] = detail::fmt(problem.mass_coefficient);
  kv["transform"] = transform;
  kv["kappa"] = detail::fmt(kappa);
  kv["data.profile"] = data.profile;
  kv["data.epsilon"] = detail::fmt(data.epsilon);
  kv["data.height"] = detail::fmt(data.height);
  kv["data.radius"] = detail::fmt(data.radius);
  kv["data.kappa"] = detail::fmt(data.kappa);
  if (has_v0) {
    kv["data_v0.profile"] = data_v0.profile;
    kv["data_v0.epsilon"] = detail::fmt(data_v0.epsilon);
    kv["data_v0.height"] = detail::fmt(data_v0.height);
    kv["data_v0.radius"] = detail::fmt(data_v0.radius);
  }
  kv["grid.dt"] = detail::fmt(grid.dt);
  kv["grid.dr"] = detail::fmt(grid.dr);
  kv["grid.t_max"] = detail::fmt(grid.t_max);
  kv["grid.r_max"] = detail::fmt(grid.r_max);
  kv["grid.store_dt"] = detail::fmt(grid.store_dt);
  kv["ode.p"] = detail::fmt(ode.p);
  kv["ode.q"] = detail::fmt(ode.q);
  kv["ode.K0"] = detail::fmt(ode.K0);
  kv["ode.K1"] = detail::fmt(ode.K1);
  kv["ode.R"] = detail::fmt(ode.R);
  kv["ode.a"] = detail::fmt(ode.a);
  kv["ode.T1"] = detail::fmt(ode.T1);
  kv["ode.horizon"] = detail::fmt(ode.horizon);
  kv["ode.escape_threshold"] = detail::fmt(ode.escape_threshold);
  kv["fit.t_lo"] = detail::fmt(fit.t_lo);
  kv["fit.t_hi"] = detail::fmt(fit.t_hi);
  kv["tol"] = detail::fmt(tol);
  kv["max_iter"] = detail::fmt(max_iter);
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

inline std::vector<std::string> Scenario::validate() const {
  std::vector<std::string> errors;
  if (!(problem.p > 1.0)) errors.push_back("problem.p: must be > 1");
  if (problem.n < 1) errors.push_back("problem.n: must be >= 1");
  if (!(grid.dt > 0.0) && solver != SolverKind::Fd) errors.push_back("grid.dt: must be > 0");
  if (!(grid.dr > 0.0)) errors.push_back("grid.dr: must be > 0");
  if (!(grid.t_max > 0.0)) errors.push_back("grid.t_max: must be > 0");
  switch (solver) {
    case SolverKind::Picard: {
      const auto kr = duhamel::kappa_range(problem.p);
      if (kr.empty)
        errors.push_back("kappa: kappa range empty (picard requires p > p0(5))");
      else if (!kr.contains(kappa))
        errors.push_back("kappa: outside the admissible range [" + detail::fmt(kr.lower) + ", " +
                         detail::fmt(kr.upper) + "]");
      if (data.profile == "zero" && data.epsilon != 0.0)
        errors.push_back("data.epsilon: nonzero epsilon with zero profile");
      break;
    }
    case SolverKind::Fd: {
      if (problem.n > 3) errors.push_back("problem.n: fd solver supports n in {1,2,3}");
      if (data.profile == "algebraic" || (has_v0 && data_v0.profile == "algebraic"))
        errors.push_back("data.profile: fd solver requires compactly supported data");
      break;
    }
    case SolverKind::OdeLemma: {
      if (!(ode.p > 1.0)) errors.push_back("ode.p: must be > 1");
      if (!(ode.K1 > 0.0)) errors.push_back("ode.K1: must be > 0");
      if (!(ode.R > 0.0)) errors.push_back("ode.R: must be > 0");
      if (!(ode.horizon > ode.T1)) errors.push_back("ode.horizon: must exceed ode.T1");
      break;
    }
    case SolverKind::Verify: {
      if (verify.p_values.size() != verify.kappa_values.size())
        errors.push_back("verify: p_values and kappa_values must have equal length");
      break;
    }
    default: break;
  }
  return errors;
}

inline DataDescriptor parse_data_section(const toml::Table& t, const std::string& prefix) {
  DataDescriptor d;
  d.profile = t.string_or(prefix + ".profile", "zero");
  d.epsilon = t.number_or(prefix + ".epsilon", 0.0);
  d.height = t.number_or(prefix + ".height", 0.0);
  d.radius = t.number_or(prefix + ".radius", 1.0);
  d.kappa = t.number_or(prefix + ".kappa", 1.5);
  return d;
}

inline Scenario scenario_from_toml(const toml::Table& t) {
  Scenario sc;
  sc.name = t.string_or("name", "scenario");
  const std::string solver_name = t.string_or("solver", "linear");
  const auto solver = solver_from_string(solver_name);
  if (!solver) throw validation_error("solver: unknown solver '" + solver_name + "'");
  sc.solver = *solver;

  sc.problem.n = static_cast<int>(t.number_or("problem.n", 3));
  sc.problem.mu = t.number_or("problem.mu", 2.0);
  sc.problem.m = t.number_or("problem.m", 0.0);
  sc.problem.p = t.number_or("problem.p", 1.9);
  const std::string form = t.string_or("problem.form", "weighted-wave");
  if (form == "damped")
    sc.problem.form = transforms::ProblemForm::Damped;
  else if (form == "weighted-wave")
    sc.problem.form = transforms::ProblemForm::WeightedWave;
  else if (form == "variable-speed-wave")
    sc.problem.form = transforms::ProblemForm::VariableSpeedWave;
  else if (form == "exponential-speed-wave")
    sc.problem.form = transforms::ProblemForm::ExponentialSpeedWave;
  else
    throw validation_error("problem.form: unknown form '" + form + "'");
  sc.problem.weight_exponent =
      t.number_or("problem.weight_exponent",
                  sc.problem.form == transforms::ProblemForm::WeightedWave
                      ? -(sc.problem.p - 1.0)
                      : 0.0);
  sc.problem.mass_coefficient = t.number_or("problem.mass_coefficient", 0.0);
  sc.transform = t.string_or("transform", "auto");

  sc.kappa = t.number_or("kappa", 1.5);
  sc.data = parse_data_section(t, "data");
  if (!t.has("data.kappa")) sc.data.kappa = sc.kappa;
  if (t.has("data_v0.profile")) {
    sc.data_v0 = parse_data_section(t, "data_v0");
    sc.has_v0 = true;
  }

  // fd selects a CFL-safe step automatically unless one is given.
  sc.grid.dt = t.number_or("grid.dt", sc.solver == SolverKind::Fd ? 0.0 : 0.5);
  sc.grid.dr = t.number_or("grid.dr", 0.5);
  sc.grid.t_max = t.number_or("grid.t_max", 50.0);
  sc.grid.r_max = t.number_or("grid.r_max", 0.0);
  sc.grid.store_dt = t.number_or("grid.store_dt", 0.5);

  sc.ode.p = t.number_or("ode.p", sc.problem.p);
  sc.ode.q = t.number_or("ode.q", 2.0);
  sc.ode.K0 = t.number_or("ode.K0", 1.0);
  sc.ode.K1 = t.number_or("ode.K1", 1.0);
  sc.ode.R = t.number_or("ode.R", 1.0);
  sc.ode.a = t.number_or("ode.a", 1.0);
  sc.ode.T1 = t.number_or("ode.T1", 0.0);
  if (t.has("ode.F0")) sc.ode.F0 = *t.number("ode.F0");
  if (t.has("ode.Fdot0")) sc.ode.Fdot0 = *t.number("ode.Fdot0");
  sc.ode.horizon = t.number_or("ode.horizon", 1e3);
  sc.ode.escape_threshold = t.number_or("ode.escape_threshold", 1e12);

  if (auto v = t.numbers("verify.p_values")) sc.verify.p_values = *v;
  if (auto v = t.numbers("verify.kappa_values")) sc.verify.kappa_values = *v;
  if (auto v = t.numbers("verify.xi_values")) sc.verify.xi_values = *v;
  sc.verify.zone_samples = static_cast<int>(t.number_or("verify.zone_samples", 100));
  sc.verify.sample_t_max = t.number_or("verify.sample_t_max", 200.0);

  sc.fit.t_lo = t.number_or("fit.t_lo", 10.0);
  sc.fit.t_hi = t.number_or("fit.t_hi", 50.0);
  sc.tol = t.number_or("tol", 1e-7);
  sc.max_iter = static_cast<int>(t.number_or("max_iter", 8));

  for (const auto& key : t.keys_with_prefix("sweep.")) {
    const std::string param = key.substr(6);
    auto vals = t.numbers(key);
    if (!vals || vals->empty())
      throw validation_error("sweep." + param + ": expected a non-empty numeric array");
    sc.sweep_axes[param] = *vals;
  }
  return sc;
}

inline Scenario scenario_from_string(const std::string& text) {
  return scenario_from_toml(toml::parse(text));
}

}  // namespace wavecrit::harness
