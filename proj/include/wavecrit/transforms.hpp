#pragma once

// Changes of variables between the scale-invariant damped problem and its
// weighted-wave / variable-speed reductions. Each transform maps a
// ProblemSpec descriptor to a new descriptor plus the induced linear map
// on initial data; no fields are solved here.

#include <cmath>
#include <string>
#include <utility>

#include "wavecrit/util.hpp"

namespace wavecrit::transforms {

enum class ProblemForm {
  Damped,                // v_tt - Lap v + mu/<t> v_t (+ m/(4<t>^2) v) = <t>^w |v|^p
  WeightedWave,          // u_tt - Lap u + mass_coefficient <t>^{-2} u = C <t>^w |u|^p
  VariableSpeedWave,     // w_tt - <t>^{2l} Lap w = C <t>^w |w|^p
  ExponentialSpeedWave,  // w_tt - e^{2t} Lap w = e^{w t} |w|^p
};

inline const char* to_string(ProblemForm f) {
  switch (f) {
    case ProblemForm::Damped: return "damped";
    case ProblemForm::WeightedWave: return "weighted-wave";
    case ProblemForm::VariableSpeedWave: return "variable-speed-wave";
    default: return "exponential-speed-wave";
  }
}

struct ProblemSpec {
  int n = 3;
  double mu = 0.0;
  double m = 0.0;
  double p = 2.0;
  ProblemForm form = ProblemForm::Damped;
  // Power of <t> multiplying |u|^p (coefficient of t in the exponential
  // for ExponentialSpeedWave).
  double weight_exponent = 0.0;
  // l: propagation speed <t>^l (or e^{l t} for the exponential form).
  double speed_exponent = 0.0;
  // Coefficient of <t>^{-2} u.
  double mass_coefficient = 0.0;
  // Time at which the transformed data are prescribed (t-bar / t-sharp).
  double initial_time = 0.0;
  // Constant c_mu in front of the nonlinearity.
  double nonlinearity_constant = 1.0;
};

// (u0, u1) = (a v0 + b v1, c v0 + d v1).
struct DataMap {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  std::string time_reparameterization = "identity";

  double det() const { return a * d - b * c; }

  DataMap inverse() const {
    const double dt = det();
    if (dt == 0.0) throw std::domain_error("DataMap::inverse: singular map");
    DataMap inv;
    inv.a = d / dt;
    inv.b = -b / dt;
    inv.c = -c / dt;
    inv.d = a / dt;
    inv.time_reparameterization = "inverse of " + time_reparameterization;
    return inv;
  }

  std::pair<double, double> apply(double v0, double v1) const {
    return {a * v0 + b * v1, c * v0 + d * v1};
  }

  bool is_identity(double tol = 1e-12) const {
    return std::abs(a - 1) <= tol && std::abs(b) <= tol && std::abs(c) <= tol &&
           std::abs(d - 1) <= tol;
  }
};

// second after first: (u0,u1) = second(first(v0,v1)).
inline DataMap compose(const DataMap& second, const DataMap& first) {
  DataMap out;
  out.a = second.a * first.a + second.b * first.c;
  out.b = second.a * first.b + second.b * first.d;
  out.c = second.c * first.a + second.d * first.c;
  out.d = second.c * first.b + second.d * first.d;
  out.time_reparameterization =
      first.time_reparameterization + " then " + second.time_reparameterization;
  return out;
}

// v -> <t>^{mu-1} v: damping mu becomes mu# = 2 - mu, the nonlinearity
// picks up <t>^{(mu#-1)(p-1)}, and u1 = v1 + (mu-1) v0. Involutive.
inline std::pair<ProblemSpec, DataMap> dissipation_shift(const ProblemSpec& spec) {
  if (spec.form != ProblemForm::Damped)
    throw std::domain_error("dissipation_shift: requires the damped form");
  if (!nearly_equal(spec.m, 0.0))
    throw std::domain_error("dissipation_shift: requires zero mass term");
  const double mu_sharp = 2.0 - spec.mu;
  ProblemSpec out = spec;
  out.mu = mu_sharp;
  out.weight_exponent = spec.weight_exponent + (mu_sharp - 1.0) * (spec.p - 1.0);
  DataMap map;
  map.c = spec.mu - 1.0;  // = 1 - mu#
  map.time_reparameterization = "identity";
  return {out, map};
}

// mu < 1: t |-> Lambda(t) - 1 with Lambda(t) = <t>^{l+1}/(l+1),
// l = mu/(1-mu); yields a free wave with polynomial speed <t>^l, weight
// <t>^{2l}, data prescribed at t-bar = (1-mu)^{-(1-mu)} - 1.
inline std::pair<ProblemSpec, DataMap> time_reparam_sub1(const ProblemSpec& spec) {
  if (spec.form != ProblemForm::Damped)
    throw std::domain_error("time_reparam_sub1: requires the damped form");
  if (!(spec.mu < 1.0)) throw std::domain_error("time_reparam_sub1: requires mu < 1");
  const double mu = spec.mu;
  const double ell = mu / (1.0 - mu);
  ProblemSpec out = spec;
  out.form = ProblemForm::VariableSpeedWave;
  out.mu = 0.0;
  out.speed_exponent = ell;
  out.weight_exponent = 2.0 * ell;
  out.initial_time = std::pow(1.0 - mu, -(1.0 - mu)) - 1.0;
  out.nonlinearity_constant = 1.0;
  DataMap map;
  map.d = std::pow(1.0 - mu, -mu);
  map.time_reparameterization = "Lambda(t) = <t>^{l+1}/(l+1), l = mu/(1-mu)";
  return {out, map};
}

// mu > 1: dissipation shift followed by the polynomial reparameterization;
// speed exponent l# = (2-mu)/(mu-1), weight 2 l# - (p-1), constant
// c_mu = (mu-1)^{(mu-1)(p-1)}, data at t# = (mu-1)^{-(mu-1)} - 1.
inline std::pair<ProblemSpec, DataMap> time_reparam_super1(const ProblemSpec& spec) {
  if (spec.form != ProblemForm::Damped)
    throw std::domain_error("time_reparam_super1: requires the damped form");
  if (!(spec.mu > 1.0)) throw std::domain_error("time_reparam_super1: requires mu > 1");
  const double mu = spec.mu;
  const double ell_sharp = (2.0 - mu) / (mu - 1.0);
  ProblemSpec out = spec;
  out.form = ProblemForm::VariableSpeedWave;
  out.mu = 0.0;
  out.speed_exponent = ell_sharp;
  out.weight_exponent = 2.0 * ell_sharp - (spec.p - 1.0);
  out.initial_time = std::pow(mu - 1.0, -(mu - 1.0)) - 1.0;
  out.nonlinearity_constant = std::pow(mu - 1.0, (mu - 1.0) * (spec.p - 1.0));
  DataMap map;
  const double scale = std::pow(mu - 1.0, -(2.0 - mu));
  map.c = scale * (mu - 1.0);
  map.d = scale;
  map.time_reparameterization = "Lambda(t) = <t>^{l#+1}/(l#+1) after v -> <t>^{mu-1} v";
  return {out, map};
}

// mu = 1: Lambda(t) = e^t turns the problem into a free wave with speed
// e^t and nonlinearity weight e^{2t}; the data map is the identity.
inline std::pair<ProblemSpec, DataMap> exponential_reparam(const ProblemSpec& spec) {
  if (spec.form != ProblemForm::Damped)
    throw std::domain_error("exponential_reparam: requires the damped form");
  if (!nearly_equal(spec.mu, 1.0)) throw std::domain_error("exponential_reparam: requires mu = 1");
  ProblemSpec out = spec;
  out.form = ProblemForm::ExponentialSpeedWave;
  out.mu = 0.0;
  out.speed_exponent = 1.0;   // speed e^t
  out.weight_exponent = 2.0;  // weight e^{2t}
  out.initial_time = 0.0;
  out.nonlinearity_constant = 1.0;
  DataMap map;
  map.time_reparameterization = "Lambda(t) = e^t";
  return {out, map};
}

// u = <t>^{mu/2} v absorbs the damping into a scale-invariant mass
// (mu(2-mu)+m)/4 <t>^{-2} and the weight <t>^{-(mu/2)(p-1)};
// u1 = v1 + (mu/2) v0.
inline std::pair<ProblemSpec, DataMap> mass_shift(const ProblemSpec& spec) {
  if (spec.form != ProblemForm::Damped)
    throw std::domain_error("mass_shift: requires the damped form");
  const double mu = spec.mu;
  ProblemSpec out = spec;
  out.form = ProblemForm::WeightedWave;
  out.mu = 0.0;
  out.m = 0.0;
  out.mass_coefficient = (mu * (2.0 - mu) + spec.m) / 4.0;
  out.weight_exponent = -(mu / 2.0) * (spec.p - 1.0);
  out.nonlinearity_constant = 1.0;
  DataMap map;
  map.c = mu / 2.0;
  map.time_reparameterization = "identity";
  return {out, map};
}

}  // namespace wavecrit::transforms
