#include <doctest.h>

#include <cmath>

#include "wavecrit/duhamel.hpp"
#include "wavecrit/exponents.hpp"
#include "wavecrit/profiles.hpp"
#include "wavecrit/quadrature.hpp"
#include "wavecrit/radial_linear.hpp"

using namespace wavecrit;
using namespace wavecrit::duhamel;

namespace {

// Smooth synthetic evaluator for oracle comparisons.
struct SmoothField {
  double amp = 0.01;
  double operator()(double s, double rho) const {
    return amp / (1.0 + s) * std::exp(-rho * rho / 8.0);
  }
};

// Brute-force tensor-product Simpson oracle for L on an arbitrary
// evaluator; independent of the adaptive quadrature path.
template <class U>
double brute_force_L(const U& u, double p, double t, double r, int panels) {
  auto inner = [&](double s) {
    auto h = [&](double q) {
      const double rho = t - s + r * q;
      return 0.5 * rho * std::pow(std::abs(u(s, rho)), p);
    };
    return quad::simpson(h, -1.0, 1.0, panels);
  };
  auto outer = [&](double s) { return std::pow(bracket(s), -(p - 1.0)) * inner(s); };
  return quad::simpson(outer, 0.0, t, panels);
}

}  // namespace

TEST_SUITE("duhamel") {
  TEST_CASE("kappa_range piecewise definition") {
    const auto kr2 = kappa_range(2.0);
    CHECK_FALSE(kr2.empty);
    CHECK(kr2.lower == doctest::Approx(1.0));
    CHECK_FALSE(kr2.lower_inclusive);
    CHECK(kr2.upper == doctest::Approx(2.0));
    CHECK(kr2.contains(2.0));
    CHECK_FALSE(kr2.contains(1.0));

    const auto kr19 = kappa_range(1.9);
    CHECK(kr19.lower == doctest::Approx(11.0 / 9.0).epsilon(1e-14));
    CHECK(kr19.upper == doctest::Approx(1.8).epsilon(1e-14));
    CHECK(kr19.contains(kr19.lower));

    CHECK(kappa_range(1.7).empty);
    CHECK(kappa_range(exponents::strauss_p0(5.0)).empty);
  }

  TEST_CASE("the two endpoint formulas coincide exactly at p0(5)") {
    const double p = exponents::strauss_p0(5.0);
    CHECK((3.0 - p) / (p - 1.0) == doctest::Approx(2.0 * (p - 1.0)).epsilon(1e-13));
  }

  TEST_CASE("kappa range nonempty iff p > p0(5)") {
    const double root = exponents::strauss_p0(5.0);
    for (double p = 1.05; p < 3.0; p += 0.01) {
      if (p > root + 1e-9)
        CHECK_FALSE(kappa_range(p).empty);
      else if (p < root - 1e-9)
        CHECK(kappa_range(p).empty);
    }
  }

  TEST_CASE("lemma variant widens the range for p > 2") {
    const auto kr = kappa_range_lemma(2.5);
    CHECK(kr.lower == doctest::Approx(1.0 / 1.5).epsilon(1e-14));
    CHECK(kr.lower_inclusive);
    CHECK(kr.upper == doctest::Approx(3.0));
  }

  TEST_CASE("power nonlinearity: even, vanishing at zero, Lipschitz bound") {
    const auto f = Nonlinearity::power(1.9);
    CHECK(f(0.0) == 0.0);
    for (double u : {-2.0, -0.3, 0.7, 1.5}) CHECK(f(u) == doctest::Approx(f(-u)));
    for (double u : {-1.5, -0.2, 0.4, 2.0})
      for (double v : {-0.7, 0.1, 1.1}) {
        const double lhs = std::abs(f(u) - f(v));
        const double rhs = 1.9 * std::abs(u - v) *
                           (std::pow(std::abs(u), 0.9) + std::pow(std::abs(v), 0.9));
        CHECK(lhs <= rhs * (1.0 + 1e-12) + 1e-15);
      }
  }

  TEST_CASE("L of the zero field is zero") {
    SpaceTimeField z;
    z.t_grid = uniform_grid(4.0, 0.5);
    z.r_grid = uniform_grid(6.0, 0.5);
    z.allocate();
    CHECK(apply_L(z, 1.9, 3.0, 1.0) == 0.0);
    CHECK(dr_rLu(z, 1.9, 3.0, 1.0) == 0.0);
    CHECK(apply_L(z, 1.9, 0.0, 1.0) == 0.0);  // vanishes at t = 0
  }

  TEST_CASE("L agrees with a tensor-product Simpson oracle on a smooth field") {
    const SmoothField u;
    const auto f = Nonlinearity::power(1.9);
    for (auto [t, r] : {std::pair{3.0, 1.7}, {3.0, 0.6}, {3.0, 0.0}, {2.0, 2.6}}) {
      const double adaptive = apply_L_eval(u, f, 1.9, t, r);
      const double oracle = brute_force_L(u, 1.9, t, r, 1000);  // 10^6 nodes
      CHECK(adaptive == doctest::Approx(oracle).epsilon(5e-7));
      CHECK(std::abs(adaptive - oracle) < 1e-8);
    }
  }

  TEST_CASE("L is even in r") {
    const SmoothField u;
    const auto f = Nonlinearity::power(1.9);
    CHECK(apply_L_eval(u, f, 1.9, 2.5, 1.3) == apply_L_eval(u, f, 1.9, 2.5, -1.3));
  }

  TEST_CASE("d_r(r Lu) matches a centered finite difference of r Lu") {
    const SmoothField u;
    const auto f = Nonlinearity::power(1.9);
    const double h = 1e-3;
    for (auto [t, r] : {std::pair{2.0, 0.8}, {3.0, 1.9}}) {
      const double exact = dr_rLu_eval(u, f, 1.9, t, r);
      auto rL = [&](double rr) { return rr * apply_L_eval(u, f, 1.9, t, rr); };
      const double fd = (rL(r + h) - rL(r - h)) / (2.0 * h);
      CHECK(fd == doctest::Approx(exact).epsilon(5e-6));
    }
  }

  TEST_CASE("picard: zero data converges immediately to the zero field") {
    PicardGrid grid{0.5, 0.5, 6.0, 8.0};
    const auto rep = picard_solve(zero_profile(), 1.9, 1.5, grid);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(rep.final_norm.total == 0.0);
    for (double v : rep.field.u) CHECK(v == 0.0);
  }

  TEST_CASE("picard: inadmissible parameters are validation errors") {
    PicardGrid grid{0.5, 0.5, 4.0, 6.0};
    CHECK_THROWS_AS((void)picard_solve(zero_profile(), 1.7, 1.5, grid), validation_error);
    CHECK_THROWS_AS((void)picard_solve(zero_profile(), 1.9, 3.0, grid), validation_error);
    CHECK_THROWS_AS((void)picard_solve(zero_profile(), 1.9, 1.0, grid), validation_error);
  }

  TEST_CASE("picard: small bump data converges fast with a tiny contraction ratio") {
    const RadialProfile g = bump_profile(1e-3, 1.0, 1.5);
    PicardGrid grid{0.5, 0.5, 8.0, 10.0};
    PicardOptions opt;
    opt.tol = 1e-10;
    const auto rep = picard_solve(g, 1.9, 1.5, grid, opt);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 4);
    CHECK(rep.contraction_ratio < 0.6);
    // The iterate equals u^lin at t = 0, which vanishes for odd H.
    for (std::size_t ir = 0; ir < rep.field.nr(); ++ir)
      CHECK(std::abs(rep.field.u_at(0, ir)) < 1e-12);
    CHECK(rep.final_norm.total > 0.0);
  }

  TEST_CASE("picard: parallel and serial runs are bit-identical") {
    const RadialProfile g = bump_profile(5e-3, 1.0, 1.5);
    PicardGrid grid{0.5, 0.5, 5.0, 6.0};
    PicardOptions par, ser;
    par.parallel = true;
    ser.parallel = false;
    const auto a = picard_solve(g, 1.9, 1.5, grid, par);
    const auto b = picard_solve(g, 1.9, 1.5, grid, ser);
    REQUIRE(a.field.u.size() == b.field.u.size());
    for (std::size_t i = 0; i < a.field.u.size(); ++i) CHECK(a.field.u[i] == b.field.u[i]);
    CHECK(a.final_norm.total == b.final_norm.total);
  }

  TEST_CASE("duhamel residual: w = u^lin + L u solves the forced equation") {
    // Moderate data so the forcing stands clear of finite-difference noise.
    const RadialProfile g = bump_profile(0.05, 1.0, 1.5);
    const double p = 1.9;
    PicardGrid grid{0.25, 0.25, 6.0, 8.0};
    PicardOptions opt;
    opt.tol = 1e-11;
    opt.max_iter = 6;
    const auto rep = picard_solve(g, p, 1.5, grid, opt);
    REQUIRE(rep.converged);

    const FieldInterpolator u_final(rep.field, Extrapolation::Zero);
    const auto f = Nonlinearity::power(p);
    LOptions lopt;
    lopt.outer = {1e-8, 45};
    lopt.inner = {1e-9, 45};
    auto w = [&](double t, double r) {
      return radial_linear::linear_solution(g, t, r, {1e-12, 45}) +
             apply_L_eval(u_final, f, p, t, r, lopt);
    };
    const double h = 0.02;
    for (auto [t, r] : {std::pair{2.0, 1.1}, {3.0, 2.0}}) {
      const double wtt = (w(t + h, r) - 2.0 * w(t, r) + w(t - h, r)) / (h * h);
      const double hr = 1.5 * h;
      const double wrr = (w(t, r + hr) - 2.0 * w(t, r) + w(t, r - hr)) / (hr * hr);
      const double wr = (w(t, r + hr) - w(t, r - hr)) / (2.0 * hr);
      const double lhs = r * r * wtt - (r * r * wrr + 2.0 * r * wr);
      const double uval = w(t, r);
      const double rhs = std::pow(bracket(t), -(p - 1.0)) * r * r * f(uval);
      CHECK(lhs == doctest::Approx(rhs).epsilon(0.25));
    }
  }

  TEST_CASE("weighted bound on d_r(r Lu) for small linear data") {
    // |d_r(r Lu)| <= C ||u||^p <r> <t+r>^{-1} <t-r>^{-(kappa-1)} with a
    // finite measured C on a sample grid.
    const double p = 1.9, kappa = 1.5;
    const RadialProfile g = algebraic_profile(1e-2, kappa);
    const auto tg = uniform_grid(10.0, 0.5);
    const auto rg = uniform_grid(20.0, 0.5);
    const auto ulin = radial_linear::fill_linear_field(g, tg, rg, {1e-13, 45});
    const double norm_u = radial_linear::xkappa_norm(ulin, kappa).total;
    const FieldInterpolator u(ulin, Extrapolation::Zero);
    const auto f = Nonlinearity::power(p);
    LOptions lopt;
    lopt.outer = {1e-12, 45};
    lopt.inner = {1e-13, 45};
    double measured_C = 0.0;
    for (double t : {1.0, 3.0, 6.0, 9.0})
      for (double r : {0.5, 2.0, 5.0, 9.0}) {
        const double lhs = std::abs(dr_rLu_eval(u, f, p, t, r, lopt));
        const double envelope = bracket(r) / bracket(t + r) *
                                std::pow(bracket(t - r), -(kappa - 1.0)) *
                                std::pow(norm_u, p);
        measured_C = std::max(measured_C, lhs / envelope);
      }
    CHECK(measured_C > 0.0);
    CHECK(measured_C < 50.0);  // single finite ceiling on the sample
  }

  TEST_CASE("power-law bound ||Lu|| / ||u||^p is stable across two decades of data") {
    const double p = 1.9, kappa = 1.5;
    const auto tg = uniform_grid(8.0, 0.5);
    const auto rg = uniform_grid(16.0, 0.5);
    double first_ratio = 0.0;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      const RadialProfile g = algebraic_profile(eps, kappa);
      const auto ulin = radial_linear::fill_linear_field(g, tg, rg, {1e-14, 45});
      const double norm_u = radial_linear::xkappa_norm(ulin, kappa).total;
      const FieldInterpolator u(ulin, Extrapolation::Zero);
      const auto f = Nonlinearity::power(p);
      LOptions lopt;
      const double scale = std::pow(eps, p);
      lopt.outer = {1e-7 * scale, 45};
      lopt.inner = {1e-8 * scale, 45};
      // Grid norm of Lu over a coarse sample rectangle.
      SpaceTimeField lu;
      lu.t_grid = uniform_grid(8.0, 1.0);
      lu.r_grid = uniform_grid(8.0, 1.0);
      lu.allocate();
      for (std::size_t it = 0; it < lu.nt(); ++it)
        for (std::size_t ir = 0; ir < lu.nr(); ++ir) {
          lu.u[lu.idx(it, ir)] = apply_L_eval(u, f, p, lu.t_grid[it], lu.r_grid[ir], lopt);
          lu.dr_ru[lu.idx(it, ir)] =
              dr_rLu_eval(u, f, p, lu.t_grid[it], lu.r_grid[ir], lopt);
        }
      const double ratio = radial_linear::xkappa_norm(lu, kappa).total / std::pow(norm_u, p);
      if (first_ratio == 0.0)
        first_ratio = ratio;
      else {
        CHECK(ratio / first_ratio < 2.0);
        CHECK(first_ratio / ratio < 2.0);
      }
    }
  }

  TEST_CASE("Lipschitz bound ||Lu - Lv|| against the sampled pair envelope") {
    const double p = 1.9, kappa = 1.5;
    const auto tg = uniform_grid(6.0, 0.5);
    const auto rg = uniform_grid(12.0, 0.5);
    const auto fu = radial_linear::fill_linear_field(algebraic_profile(1e-2, kappa), tg, rg);
    const auto fv = radial_linear::fill_linear_field(algebraic_profile(5e-3, kappa), tg, rg);
    const double nu = radial_linear::xkappa_norm(fu, kappa).total;
    const double nv = radial_linear::xkappa_norm(fv, kappa).total;
    const double nuv = radial_linear::xkappa_norm_difference(fu, fv, kappa).total;
    const FieldInterpolator iu(fu, Extrapolation::Zero), iv(fv, Extrapolation::Zero);
    const auto f = Nonlinearity::power(p);
    LOptions lopt;
    lopt.outer = {1e-12, 45};
    lopt.inner = {1e-13, 45};
    double measured_C = 0.0;
    for (double t : {1.0, 3.0, 5.0})
      for (double r : {0.0, 1.5, 4.0}) {
        const double dL =
            std::abs(apply_L_eval(iu, f, p, t, r, lopt) - apply_L_eval(iv, f, p, t, r, lopt));
        const double envelope = nuv * (std::pow(nu, p - 1.0) + std::pow(nv, p - 1.0)) /
                                (bracket(t + r) * std::pow(bracket(t - r), kappa - 1.0));
        measured_C = std::max(measured_C, dL / envelope);
      }
    CHECK(measured_C > 0.0);
    CHECK(measured_C < 50.0);
  }

  TEST_CASE("verify_I: empty interval at xi = 0 and bounded normalized values") {
    const auto entries = verify_I(2.0, 1.5, {0.0, 10.0, 100.0, 1000.0});
    CHECK(entries[0].value == 0.0);
    for (const auto& e : entries) CHECK(std::isfinite(e.normalized));
    // Away from the sharp endpoint the normalized value decays, so the
    // boundedness claim shows up as a non-increasing tail.
    CHECK(entries[3].normalized < entries[2].normalized);
    CHECK(entries[3].normalized < 2.0 * entries[1].normalized);
  }

  TEST_CASE("verify_I: 25% variation between 1e3 and 1e4 at the sharp lower endpoint") {
    const double p = 1.9, kappa = (3.0 - p) / (p - 1.0);
    const auto entries = verify_I(p, kappa, {1e3, 1e4});
    for (const auto& e : entries) {
      CHECK(std::isfinite(e.normalized));
      CHECK(e.normalized > 0.0);
    }
    const double a = entries[0].normalized, b = entries[1].normalized;
    CHECK(std::max(a, b) / std::min(a, b) - 1.0 < 0.25);
  }

  TEST_CASE("verify_I0_I1: zones, collapse at r = 0, finite ratios") {
    const std::vector<std::pair<double, double>> samples = {
        {10.0, 1.0},   // t >= 2r
        {3.0, 2.0},    // r <= t <= 2r, r >= 1
        {1.0, 4.0},    // exterior t <= r
        {0.8, 0.5},    // small r
        {10.0, 1e-8},  // near-collapsed inner interval
    };
    const auto out = verify_I0_I1(1.9, 1.5, samples);
    CHECK(out[0].zone == EstimateZone::FarInterior);
    CHECK(out[1].zone == EstimateZone::NearCone);
    CHECK(out[2].zone == EstimateZone::Exterior);
    CHECK(out[3].zone == EstimateZone::SmallR);
    for (const auto& z : out) {
      CHECK(std::isfinite(z.I0_ratio));
      CHECK(std::isfinite(z.I1_minus_ratio));
      CHECK(std::isfinite(z.I1_plus_ratio));
      CHECK(z.I0 >= 0.0);
    }
    CHECK(out[4].I0 < 1e-6);  // interval collapses with r
  }
}
