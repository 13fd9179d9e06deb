#pragma once

// Critical exponents for semilinear wave equations with scale-invariant
// damping, and the regime classification of a Cauchy problem instance
// (n, mu, m, p) into blow-up / global existence / open.

#include <cmath>
#include <string>
#include <vector>

#include "wavecrit/util.hpp"

namespace wavecrit::exponents {

// Strauss exponent: positive root of (d-1) p^2 - (d+1) p - 2 = 0.
// Defined for real d >= 1; p0(1) = +infinity.
inline double strauss_p0(double d) {
  if (!(d >= 1.0)) throw std::domain_error("strauss_p0: requires d >= 1");
  if (d == 1.0) return kInf;
  return ((d + 1.0) + std::sqrt((d + 1.0) * (d + 1.0) + 8.0 * (d - 1.0))) / (2.0 * (d - 1.0));
}

// Fujita-type exponent 1 + 2/d for effectively damped models.
inline double fujita_p_inf(double d) {
  if (!(d > 0.0)) throw std::domain_error("fujita_p_inf: requires d > 0");
  return 1.0 + 2.0 / d;
}

struct P2Value {
  double value = 0.0;
  // For n >= 4 the closed form max{p0(n+2), p_inf(n)} is a conjectured
  // critical exponent, not a theorem.
  bool conjectural = false;
};

// p2(n) = max{p0(n+2), p_inf(n)}: 3 for n=1, p0(n+2) for n=2,3,
// conjectural for n >= 4.
inline P2Value p2(int n) {
  if (n < 1) throw std::domain_error("p2: requires n >= 1");
  P2Value out;
  if (n == 1) {
    out.value = 3.0;
    return out;
  }
  out.value = std::max(strauss_p0(static_cast<double>(n + 2)), fujita_p_inf(static_cast<double>(n)));
  out.conjectural = (n >= 4);
  return out;
}

// tilde p_mu(n) = max{p_inf(n - 1 + mu/2), p0(n + mu)}, the blow-up
// threshold for the model with scale-invariant mass m = (mu-2) mu.
inline double p_mu_tilde(int n, double mu) {
  if (n < 1) throw std::domain_error("p_mu_tilde: requires n >= 1");
  if (!(mu > 0.0)) throw std::domain_error("p_mu_tilde: requires mu > 0");
  return std::max(fujita_p_inf(n - 1.0 + mu / 2.0), strauss_p0(n + mu));
}

// Closed-form piecewise version of tilde p_mu(n); must agree with
// p_mu_tilde everywhere it is defined.
inline double p_mu_tilde_piecewise(int n, double mu) {
  if (n < 1) throw std::domain_error("p_mu_tilde_piecewise: requires n >= 1");
  if (!(mu > 0.0)) throw std::domain_error("p_mu_tilde_piecewise: requires mu > 0");
  if (n >= 3) return strauss_p0(n + mu);
  if (n == 1) return fujita_p_inf(mu / 2.0);
  return (mu >= 2.0) ? fujita_p_inf(1.0 + mu / 2.0) : strauss_p0(2.0 + mu);
}

// Critical exponent 1 + 2/(n - alpha) for the space-dependent damping
// model mu <x>^{-alpha} u_t with alpha in (0,1); classification metadata
// only, no solver is attached to it.
inline double space_dependent_p_crit(int n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("space_dependent_p_crit: alpha in (0,1)");
  if (!(n > alpha)) throw std::domain_error("space_dependent_p_crit: requires n > alpha");
  return 1.0 + 2.0 / (n - alpha);
}

enum class Regime { BlowUp, GlobalExistence, Open };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::BlowUp: return "blow-up";
    case Regime::GlobalExistence: return "global-existence";
    default: return "open";
  }
}

struct RegimeVerdict {
  Regime regime = Regime::Open;
  std::vector<std::string> sources;  // all results supporting the verdict
  bool boundary = false;             // p sits exactly on a critical threshold
  std::string note;

  std::string citation() const {
    std::string out;
    for (const auto& s : sources) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }
};

// Sharpest supported verdict for v_tt - Delta v + mu/(1+t) v_t
// + m/(4(1+t)^2) v = |v|^p with data small, nonnegative where a sign is
// required. Unknown regions return Open, never a guess.
inline RegimeVerdict classify(int n, double mu, double m, double p) {
  if (n < 1) throw std::domain_error("classify: requires n >= 1");
  if (!(p > 1.0)) throw std::domain_error("classify: requires p > 1");

  RegimeVerdict v;
  const bool mass_zero = nearly_equal(m, 0.0) || std::abs(m) < 1e-12;
  const bool mass_special = mu > 0.0 && nearly_equal(m, (mu - 2.0) * mu);
  const double fujita_n = fujita_p_inf(static_cast<double>(n));

  bool blow = false, exists = false;

  auto mark_boundary = [&](double threshold) {
    if (std::isfinite(threshold) && nearly_equal(p, threshold)) v.boundary = true;
  };

  if (mass_zero) {
    if (nearly_equal(mu, 0.0)) {
      // Classical semilinear wave equation.
      const double s = strauss_p0(static_cast<double>(n));
      if (p <= s || nearly_equal(p, s)) {
        blow = true;
        v.sources.push_back("classical wave: blow-up for p <= p0(n)");
        mark_boundary(s);
      } else if (n >= 2 && (p <= (n + 3.0) / (n - 1.0) || nearly_equal(p, (n + 3.0) / (n - 1.0)))) {
        exists = true;
        v.sources.push_back("classical wave: global existence for p0(n) < p <= (n+3)/(n-1)");
      }
    }
    if (nearly_equal(mu, 2.0) && (p <= p2(n).value || nearly_equal(p, p2(n).value))) {
      blow = true;
      v.sources.push_back("Glassey-functional blow-up for mu=2, p <= p2(n) = max{p0(n+2), p_inf(n)}");
      mark_boundary(p2(n).value);
    }
    if (mu > 1.0 && (p <= fujita_n || nearly_equal(p, fujita_n))) {
      blow = true;
      v.sources.push_back("nonexistence of global weak solutions for mu > 1, p <= 1 + 2/n");
      mark_boundary(fujita_n);
      if (mu <= 2.0 && p < fujita_n)
        v.sources.push_back("L^q blow-up dynamics for mu in (1,2], p < 1 + 2/n");
    }
    if (mu > 0.0 && mu <= 1.0) {
      const double thr = 1.0 + 2.0 / (n - 1.0 + mu);
      if (p <= thr || nearly_equal(p, thr)) {
        blow = true;
        v.sources.push_back("nonexistence of global weak solutions for mu in (0,1], p <= 1 + 2/(n-1+mu)");
        mark_boundary(thr);
        if (nearly_equal(mu, 1.0) || p < thr)
          v.sources.push_back("L^q blow-up dynamics via variable-speed reduction");
      }
    }
    // Global existence results.
    if (nearly_equal(mu, 2.0)) {
      if (n == 2 && p > 2.0 && !nearly_equal(p, 2.0)) {
        exists = true;
        v.sources.push_back("global existence for n=2, mu=2, p > 2 (vector field method)");
      }
      if (n == 3 && p > strauss_p0(5.0) && !nearly_equal(p, strauss_p0(5.0))) {
        exists = true;
        v.sources.push_back("global existence for n=3 radial, mu=2, p > p0(5) (weighted pointwise estimates)");
      }
      if (n >= 5 && n % 2 == 1 && p > strauss_p0(static_cast<double>(n + 2)) &&
          !nearly_equal(p, strauss_p0(static_cast<double>(n + 2)))) {
        exists = true;
        v.sources.push_back("critical exponent p0(n+2) settled in odd dimensions n >= 5");
      }
    }
    const bool effective = (n == 1 && mu >= 5.0 / 3.0 - 1e-15) || (n == 2 && mu >= 3.0 - 1e-15) ||
                           (n >= 3 && mu >= n + 2.0 - 1e-15);
    if (effective && p > fujita_n && !nearly_equal(p, fujita_n)) {
      exists = true;
      v.sources.push_back("global existence for effective damping, p > 1 + 2/n");
    }
  }

  if (mass_special && !nearly_equal(mu, 0.0)) {
    const double thr = p_mu_tilde(n, mu);
    if (p <= thr || nearly_equal(p, thr)) {
      blow = true;
      v.sources.push_back("blow-up with scale-invariant mass m = (mu-2)mu for p <= tilde p_mu(n)");
      mark_boundary(thr);
    }
  }

  if (blow && exists)
    throw std::logic_error("classify: contradictory verdict; classification table is inconsistent");

  if (blow) {
    v.regime = Regime::BlowUp;
  } else if (exists) {
    v.regime = Regime::GlobalExistence;
  } else {
    v.regime = Regime::Open;
    if (mass_zero && nearly_equal(mu, 2.0) && n >= 4 && n % 2 == 0)
      v.note = "even n >= 4 above p2(n): open (conjectured threshold p0(n+2))";
    else if (mass_zero && mu > 2.0)
      v.note = "blow-up dynamics unknown for mu > 2 in this range";
    else if (!mass_zero && !mass_special)
      v.note = "no statement available for a general mass term";
    else
      v.note = "between known thresholds";
  }
  return v;
}

}  // namespace wavecrit::exponents
