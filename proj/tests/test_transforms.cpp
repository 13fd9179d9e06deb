#include <doctest.h>

#include <cmath>

#include "wavecrit/transforms.hpp"

using namespace wavecrit;
using namespace wavecrit::transforms;

namespace {

ProblemSpec damped(double mu, double p = 2.0, double m = 0.0) {
  ProblemSpec s;
  s.form = ProblemForm::Damped;
  s.mu = mu;
  s.p = p;
  s.m = m;
  return s;
}

}  // namespace

TEST_SUITE("transforms") {
  TEST_CASE("dissipation_shift at mu = 2 removes the damping") {
    const auto [spec, map] = dissipation_shift(damped(2.0, 1.9));
    CHECK(spec.mu == doctest::Approx(0.0));
    CHECK(spec.weight_exponent == doctest::Approx(-(1.9 - 1.0)));
    CHECK(map.a == doctest::Approx(1.0));
    CHECK(map.b == doctest::Approx(0.0));
    CHECK(map.c == doctest::Approx(1.0));  // u1 = v1 + v0
    CHECK(map.d == doctest::Approx(1.0));
  }

  TEST_CASE("dissipation_shift fixed point at mu = 1") {
    const auto [spec, map] = dissipation_shift(damped(1.0, 2.3));
    CHECK(spec.mu == doctest::Approx(1.0));
    CHECK(spec.weight_exponent == doctest::Approx(0.0));
    CHECK(map.is_identity());
  }

  TEST_CASE("dissipation_shift is an involution") {
    for (double mu = -3.0; mu <= 5.0; mu += 0.16) {
      const auto first = dissipation_shift(damped(mu, 1.8));
      const auto second = dissipation_shift(first.first);
      CHECK(second.first.mu == doctest::Approx(mu).epsilon(1e-14));
      CHECK(second.first.weight_exponent == doctest::Approx(0.0).epsilon(1e-13));
      const DataMap round_trip = compose(second.second, first.second);
      CHECK(round_trip.is_identity(1e-12));
    }
  }

  TEST_CASE("every data map is invertible and composes to the identity") {
    const ProblemSpec specs[] = {damped(2.0, 1.9), damped(0.5, 2.0), damped(3.0, 2.0),
                                 damped(1.0, 2.0), damped(-1.0, 2.5)};
    for (const auto& s : specs) {
      DataMap map;
      if (nearly_equal(s.mu, 1.0))
        map = exponential_reparam(s).second;
      else if (s.mu < 1.0)
        map = time_reparam_sub1(s).second;
      else
        map = time_reparam_super1(s).second;
      CHECK(map.det() != 0.0);
      CHECK(compose(map.inverse(), map).is_identity(1e-12));
      // Sampled data round-trip.
      const auto [u0, u1] = map.apply(0.37, -1.21);
      const auto [v0, v1] = map.inverse().apply(u0, u1);
      CHECK(v0 == doctest::Approx(0.37).epsilon(1e-12));
      CHECK(v1 == doctest::Approx(-1.21).epsilon(1e-12));
    }
  }

  TEST_CASE("time_reparam_sub1 reference values") {
    SUBCASE("mu = 0 is the identity reparameterization") {
      const auto [spec, map] = time_reparam_sub1(damped(0.0));
      CHECK(spec.speed_exponent == doctest::Approx(0.0));
      CHECK(spec.initial_time == doctest::Approx(0.0));
      CHECK(map.is_identity());
    }
    SUBCASE("mu = 1/2") {
      const auto [spec, map] = time_reparam_sub1(damped(0.5));
      CHECK(spec.speed_exponent == doctest::Approx(1.0));
      CHECK(spec.weight_exponent == doctest::Approx(2.0));
      CHECK(spec.initial_time == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));
    }
    SUBCASE("mu = -1 lands in the negative-time branch") {
      const auto [spec, map] = time_reparam_sub1(damped(-1.0));
      CHECK(spec.speed_exponent == doctest::Approx(-0.5));
      CHECK(spec.speed_exponent > -1.0);
      CHECK(spec.initial_time == doctest::Approx(-0.75).epsilon(1e-14));
      CHECK(spec.initial_time > -1.0);
      CHECK(spec.initial_time < 0.0);
    }
    CHECK_THROWS_AS((void)time_reparam_sub1(damped(1.5)), std::domain_error);
  }

  TEST_CASE("ell sign iff mu in (0,1), and the t-bar range") {
    const double upper = std::exp(1.0 / std::exp(1.0)) - 1.0;
    for (int i = 1; i <= 50; ++i) {
      const double mu = -2.0 + 3.0 * i / 51.0;  // spans (-2, 1)
      if (mu >= 1.0) continue;
      const auto [spec, map] = time_reparam_sub1(damped(mu));
      if (mu > 0.0) {
        CHECK(spec.speed_exponent > 0.0);
        CHECK(spec.initial_time > 0.0);
        CHECK(spec.initial_time <= upper + 1e-12);
      } else if (mu < 0.0) {
        CHECK(spec.speed_exponent < 0.0);
        CHECK(spec.speed_exponent > -1.0);
        CHECK(spec.initial_time > -1.0);
        CHECK(spec.initial_time <= 0.0);
      }
    }
    // t-bar -> 0 at both ends of (0, 1).
    CHECK(time_reparam_sub1(damped(1e-7)).first.initial_time == doctest::Approx(0.0).epsilon(1e-5));
    CHECK(time_reparam_sub1(damped(1.0 - 1e-7)).first.initial_time ==
          doctest::Approx(0.0).epsilon(1e-5));
  }

  TEST_CASE("time_reparam_super1 reference values") {
    SUBCASE("mu = 2 composes to the dissipation shift") {
      const auto [spec, map] = time_reparam_super1(damped(2.0, 1.9));
      CHECK(spec.speed_exponent == doctest::Approx(0.0));
      CHECK(spec.initial_time == doctest::Approx(0.0));
      CHECK(spec.nonlinearity_constant == doctest::Approx(1.0));
      const auto [dspec, dmap] = dissipation_shift(damped(2.0, 1.9));
      CHECK(spec.weight_exponent == doctest::Approx(dspec.weight_exponent));
      CHECK(map.c == doctest::Approx(dmap.c));
      CHECK(map.d == doctest::Approx(dmap.d));
    }
    SUBCASE("mu = 3, p = 2") {
      const auto [spec, map] = time_reparam_super1(damped(3.0, 2.0));
      CHECK(spec.speed_exponent == doctest::Approx(-0.5));
      CHECK(spec.initial_time == doctest::Approx(-0.75).epsilon(1e-14));
      // c_mu = (mu-1)^{(mu-1)(p-1)} = 2^2
      CHECK(spec.nonlinearity_constant == doctest::Approx(4.0).epsilon(1e-14));
    }
    SUBCASE("mu = 3/2, p = 2") {
      const auto [spec, map] = time_reparam_super1(damped(1.5, 2.0));
      CHECK(spec.nonlinearity_constant == doctest::Approx(std::pow(0.5, 0.5)).epsilon(1e-14));
    }
    CHECK_THROWS_AS((void)time_reparam_super1(damped(0.5)), std::domain_error);
  }

  TEST_CASE("exponential_reparam at mu = 1") {
    const auto [spec, map] = exponential_reparam(damped(1.0, 2.0));
    CHECK(spec.form == ProblemForm::ExponentialSpeedWave);
    CHECK(spec.speed_exponent == doctest::Approx(1.0));
    CHECK(spec.weight_exponent == doctest::Approx(2.0));
    CHECK(map.is_identity());
    CHECK_THROWS_AS((void)exponential_reparam(damped(1.2)), std::domain_error);
    // Lambda(t) = e^t and log are inverse: round trip on sampled times.
    for (double t : {0.0, 0.5, 2.0, 10.0})
      CHECK(std::log(std::exp(t)) == doctest::Approx(t).epsilon(1e-12));
  }

  TEST_CASE("mass_shift reference values") {
    SUBCASE("m = (mu-2)mu cancels the mass coefficient") {
      for (double mu : {0.5, 1.0, 2.0, 3.5}) {
        const auto [spec, map] = mass_shift(damped(mu, 2.0, (mu - 2.0) * mu));
        CHECK(spec.mass_coefficient == doctest::Approx(0.0).epsilon(1e-13));
      }
    }
    SUBCASE("mu = 0, m = 0 is the identity") {
      const auto [spec, map] = mass_shift(damped(0.0, 2.0));
      CHECK(spec.mass_coefficient == doctest::Approx(0.0));
      CHECK(spec.weight_exponent == doctest::Approx(0.0));
      CHECK(map.is_identity());
    }
    SUBCASE("mu = 2, m = 0 agrees with the dissipation shift") {
      const auto [spec, map] = mass_shift(damped(2.0, 1.9));
      const auto [dspec, dmap] = dissipation_shift(damped(2.0, 1.9));
      CHECK(spec.weight_exponent == doctest::Approx(dspec.weight_exponent));
      CHECK(spec.mass_coefficient == doctest::Approx(0.0));
      CHECK(map.c == doctest::Approx(dmap.c));
      CHECK(map.d == doctest::Approx(dmap.d));
    }
  }
}
