#pragma once

// Sampled radial solutions u(t, r) together with d_r(r u) on a tensor
// grid, plus bilinear off-grid evaluation with even reflection in r.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "wavecrit/util.hpp"

namespace wavecrit {

enum class FieldOrigin { Linear, Picard, FiniteDifference, Synthetic };

inline const char* to_string(FieldOrigin o) {
  switch (o) {
    case FieldOrigin::Linear: return "linear";
    case FieldOrigin::Picard: return "picard";
    case FieldOrigin::FiniteDifference: return "finite-difference";
    default: return "synthetic";
  }
}

struct SpaceTimeField {
  std::vector<double> t_grid;  // strictly increasing, t_grid[0] >= 0
  std::vector<double> r_grid;  // strictly increasing, r_grid[0] >= 0
  std::vector<double> u;       // row-major: u[it * nr + ir]
  std::vector<double> dr_ru;   // d_r(r u) on the same layout
  FieldOrigin origin = FieldOrigin::Synthetic;
  std::string problem;

  std::size_t nt() const { return t_grid.size(); }
  std::size_t nr() const { return r_grid.size(); }
  std::size_t idx(std::size_t it, std::size_t ir) const { return it * nr() + ir; }

  double u_at(std::size_t it, std::size_t ir) const { return u[idx(it, ir)]; }
  double dr_ru_at(std::size_t it, std::size_t ir) const { return dr_ru[idx(it, ir)]; }

  void allocate() {
    u.assign(nt() * nr(), 0.0);
    dr_ru.assign(nt() * nr(), 0.0);
  }

  void validate() const {
    auto increasing = [](const std::vector<double>& g) {
      for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) return false;
      return !g.empty();
    };
    if (!increasing(t_grid) || !increasing(r_grid))
      throw validation_error("SpaceTimeField: grids must be strictly increasing");
    if (r_grid.front() < 0.0) throw validation_error("SpaceTimeField: r_grid must start at r >= 0");
    if (u.size() != nt() * nr() || dr_ru.size() != nt() * nr())
      throw validation_error("SpaceTimeField: storage does not match grid sizes");
    for (double x : u)
      if (!std::isfinite(x)) throw validation_error("SpaceTimeField: non-finite u value");
    for (double x : dr_ru)
      if (!std::isfinite(x)) throw validation_error("SpaceTimeField: non-finite dr_ru value");
  }
};

enum class Extrapolation {
  Error,  // out-of-grid evaluation is a domain error
  Zero,   // extend by zero beyond the last r column (decay tail)
};

// Bilinear interpolation of a stored field, even in r. Uniform grids get
// O(1) cell lookup; non-uniform grids fall back to binary search.
class FieldInterpolator {
 public:
  FieldInterpolator() = default;
  FieldInterpolator(const SpaceTimeField& f, Extrapolation policy,
                    bool use_dr_ru_component = false)
      : f_(&f), policy_(policy), component_dr_(use_dr_ru_component) {
    t0_ = f.t_grid.front();
    r0_ = f.r_grid.front();
    dt_ = uniform_step(f.t_grid);
    dr_ = uniform_step(f.r_grid);
  }

  double operator()(double t, double r) const {
    const auto& tg = f_->t_grid;
    const auto& rg = f_->r_grid;
    r = std::abs(r);
    if (t < tg.front() - 1e-9 || t > tg.back() + 1e-9) {
      if (policy_ == Extrapolation::Zero) return 0.0;
      throw std::domain_error("FieldInterpolator: t out of range");
    }
    if (r > rg.back() + 1e-9) {
      if (policy_ == Extrapolation::Zero) return 0.0;
      throw std::domain_error("FieldInterpolator: r out of range");
    }
    t = std::clamp(t, tg.front(), tg.back());
    r = std::clamp(r, rg.front(), rg.back());
    const auto [it, wt] = locate(tg, t, t0_, dt_);
    const auto [ir, wr] = locate(rg, r, r0_, dr_);
    const auto& data = component_dr_ ? f_->dr_ru : f_->u;
    const std::size_t nr = rg.size();
    const double v00 = data[it * nr + ir];
    const double v01 = data[it * nr + ir + 1];
    const double v10 = data[(it + 1) * nr + ir];
    const double v11 = data[(it + 1) * nr + ir + 1];
    return (1 - wt) * ((1 - wr) * v00 + wr * v01) + wt * ((1 - wr) * v10 + wr * v11);
  }

 private:
  static double uniform_step(const std::vector<double>& g) {
    if (g.size() < 2) return 0.0;
    const double h = g[1] - g[0];
    for (std::size_t i = 1; i + 1 < g.size(); ++i)
      if (std::abs((g[i + 1] - g[i]) - h) > 1e-12 * std::max(1.0, h)) return 0.0;
    return h;
  }

  static std::pair<std::size_t, double> locate(const std::vector<double>& g, double x, double x0,
                                               double h) {
    if (g.size() == 1) return {0, 0.0};
    std::size_t i;
    if (h > 0.0) {
      i = static_cast<std::size_t>(std::min<double>(
          std::max(0.0, std::floor((x - x0) / h)), static_cast<double>(g.size() - 2)));
    } else {
      i = static_cast<std::size_t>(
          std::upper_bound(g.begin(), g.end(), x) - g.begin());
      i = std::min(std::max<std::size_t>(i, 1) - 1, g.size() - 2);
    }
    const double w = (x - g[i]) / (g[i + 1] - g[i]);
    return {i, std::clamp(w, 0.0, 1.0)};
  }

  const SpaceTimeField* f_ = nullptr;
  Extrapolation policy_ = Extrapolation::Error;
  bool component_dr_ = false;
  double t0_ = 0.0, r0_ = 0.0, dt_ = 0.0, dr_ = 0.0;
};

}  // namespace wavecrit
