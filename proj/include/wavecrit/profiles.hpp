#pragma once

// Radial data profiles: even evaluable maps r -> g(r) with derivative
// access and (epsilon, kappa) decay metadata, |g^{(h)}(r)| <=
// epsilon <r>^{-(kappa+1+h)} for h = 0, 1.

#include <cmath>
#include <functional>
#include <utility>

#include "wavecrit/util.hpp"

namespace wavecrit {

struct RadialProfile {
  // shape / shape_prime are defined for rho >= 0; the even/odd extensions
  // are applied by the accessors below. g(r) = amplitude * shape(|r|).
  std::function<double(double)> shape;
  std::function<double(double)> shape_prime;
  double amplitude = 1.0;
  double epsilon = 1.0;  // decay bound per the (kappa+1+h) envelope
  double kappa = 2.0;
  double support_radius = kInf;  // finite for compactly supported data

  double operator()(double r) const {
    const double a = std::abs(r);
    if (a >= support_radius) return 0.0;
    return amplitude * shape(a);
  }

  // g'(-r) = -g'(r) since g is even; the symmetric derivative at r = 0
  // is 0 even when the shape has a kink there.
  double derivative(double r) const {
    if (r == 0.0) return 0.0;
    const double a = std::abs(r);
    if (a >= support_radius) return 0.0;
    const double d = amplitude * shape_prime(a);
    return r < 0.0 ? -d : d;
  }

  bool is_zero() const { return amplitude == 0.0; }

  RadialProfile scaled(double factor) const {
    RadialProfile out = *this;
    out.amplitude *= factor;
    out.epsilon *= std::abs(factor);
    return out;
  }
};

inline RadialProfile zero_profile() {
  RadialProfile p;
  p.shape = [](double) { return 0.0; };
  p.shape_prime = [](double) { return 0.0; };
  p.amplitude = 0.0;
  p.epsilon = 0.0;
  p.support_radius = 0.0;
  return p;
}

// g(r) = amplitude <r>^{-(kappa+1)}. The tight eq-greg bound constant is
// amplitude * (kappa+1) because of the derivative envelope.
inline RadialProfile algebraic_profile(double amplitude, double kappa) {
  if (!(kappa > 1.0)) throw std::domain_error("algebraic_profile: requires kappa > 1");
  RadialProfile p;
  p.shape = [kappa](double r) { return std::pow(1.0 + r, -(kappa + 1.0)); };
  p.shape_prime = [kappa](double r) { return -(kappa + 1.0) * std::pow(1.0 + r, -(kappa + 2.0)); };
  p.amplitude = amplitude;
  p.kappa = kappa;
  p.epsilon = std::abs(amplitude) * (kappa + 1.0);
  return p;
}

// Compactly supported C^3 bump height * (1 - (r/R)^2)^4 on [0, R).
inline RadialProfile bump_profile(double height, double radius, double kappa = 2.0) {
  if (!(radius > 0.0)) throw std::domain_error("bump_profile: requires radius > 0");
  RadialProfile p;
  p.shape = [radius](double r) {
    const double s = r / radius;
    if (s >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return q * q * q * q;
  };
  p.shape_prime = [radius](double r) {
    const double s = r / radius;
    if (s >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return -8.0 * r / (radius * radius) * q * q * q;
  };
  p.amplitude = height;
  p.kappa = kappa;
  p.support_radius = radius;
  // Measure the decay-bound constant on a sample of the support.
  double sup = 0.0;
  const int samples = 4000;
  for (int i = 0; i <= samples; ++i) {
    const double r = radius * i / samples;
    const double w0 = std::abs(p.shape(r)) * std::pow(1.0 + r, kappa + 1.0);
    const double w1 = std::abs(p.shape_prime(r)) * std::pow(1.0 + r, kappa + 2.0);
    sup = std::max({sup, w0, w1});
  }
  p.epsilon = std::abs(height) * sup;
  return p;
}

// a*f + b*g with the pointwise-maximum metadata.
inline RadialProfile lincomb(double a, const RadialProfile& f, double b, const RadialProfile& g) {
  RadialProfile out;
  // Capture copies; profiles are cheap value types.
  RadialProfile fc = f, gc = g;
  out.shape = [a, b, fc, gc](double r) { return a * fc(r) + b * gc(r); };
  out.shape_prime = [a, b, fc, gc](double r) { return a * fc.derivative(r) + b * gc.derivative(r); };
  out.amplitude = 1.0;
  out.epsilon = std::abs(a) * f.epsilon + std::abs(b) * g.epsilon;
  out.kappa = std::min(f.kappa, g.kappa);
  out.support_radius = std::max(f.support_radius * (a != 0.0 ? 1.0 : 0.0),
                                g.support_radius * (b != 0.0 ? 1.0 : 0.0));
  return out;
}

}  // namespace wavecrit
