#pragma once

// Orchestration: dispatches a Scenario to the named solver/verifier,
// persists CSV/JSON outputs in a content-addressed run directory, and
// runs parameter sweeps with per-scenario crash isolation.

#include <atomic>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "wavecrit/blowup.hpp"
#include "wavecrit/duhamel.hpp"
#include "wavecrit/exponents.hpp"
#include "wavecrit/field.hpp"
#include "wavecrit/radial_linear.hpp"
#include "wavecrit/scenario.hpp"
#include "wavecrit/transforms.hpp"
#include "wavecrit/util.hpp"

namespace wavecrit::harness {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct RunManifest {
  std::string name;
  std::string scenario_hash;
  std::string version = kVersion;
  std::string status = "ok";  // ok | validation-error | numerical-error | divergence-error
  std::string error;
  std::string directory;
  std::vector<std::string> outputs;
  std::map<std::string, double> measurements;
  std::map<std::string, std::string> verdicts;

  json to_json(bool with_timestamp = true) const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["name"] = name;
    j["scenario_hash"] = scenario_hash;
    j["artifact_version"] = version;
    j["status"] = status;
    if (!error.empty()) j["error"] = error;
    j["outputs"] = outputs;
    j["measurements"] = measurements;
    j["verdicts"] = verdicts;
    if (with_timestamp) j["timestamp_unix"] = static_cast<long>(std::time(nullptr));
    return j;
  }
};

namespace detail {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw numerical_error("cannot open output file " + path.string());
  out << text;
}

inline void write_field_csv(const fs::path& path, const SpaceTimeField& f) {
  std::string text = "t,r,u,dr_ru\n";
  for (std::size_t it = 0; it < f.nt(); ++it)
    for (std::size_t ir = 0; ir < f.nr(); ++ir) {
      text += fmt17(f.t_grid[it]);
      text += ',';
      text += fmt17(f.r_grid[ir]);
      text += ',';
      text += fmt17(f.u[it * f.nr() + ir]);
      text += ',';
      text += fmt17(f.dr_ru[it * f.nr() + ir]);
      text += '\n';
    }
  write_text(path, text);
}

inline void write_series_csv(const fs::path& path, const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& columns) {
  std::string text;
  for (std::size_t i = 0; i < header.size(); ++i) {
    text += header[i];
    text += (i + 1 < header.size()) ? ',' : '\n';
  }
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      text += fmt17(columns[c][r]);
      text += (c + 1 < columns.size()) ? ',' : '\n';
    }
  }
  write_text(path, text);
}

inline json exponent_entry(const std::string& name, json args, double value,
                           const std::string& citation) {
  json j;
  j["name"] = name;
  j["args"] = std::move(args);
  if (std::isinf(value))
    j["value"] = "infinity";
  else
    j["value"] = value;
  j["citation"] = citation;
  return j;
}

}  // namespace detail

// JSON table of the named critical exponents evaluated at standard and
// scenario-supplied arguments.
inline json exponents_table(const Scenario& sc) {
  using namespace exponents;
  json rows = json::array();
  for (int d = 1; d <= 6; ++d)
    rows.push_back(detail::exponent_entry(
        "p0", json{{"d", d}}, strauss_p0(d),
        "positive root of (d-1)p^2-(d+1)p-2=0; p0(1)=infinity"));
  for (int n = 1; n <= 4; ++n)
    rows.push_back(detail::exponent_entry("p_inf", json{{"n", n}}, fujita_p_inf(n),
                                          "Fujita-type exponent 1+2/n for effective damping"));
  for (int n = 1; n <= 4; ++n) {
    const auto v = p2(n);
    rows.push_back(detail::exponent_entry(
        "p2", json{{"n", n}}, v.value,
        v.conjectural ? "max{p0(n+2), p_inf(n)}; conjectural for n >= 4"
                      : "critical exponent for mu=2: max{p0(n+2), p_inf(n)}"));
  }
  if (sc.problem.mu > 0.0)
    rows.push_back(detail::exponent_entry(
        "p_mu_tilde", json{{"n", sc.problem.n}, {"mu", sc.problem.mu}},
        p_mu_tilde(sc.problem.n, sc.problem.mu),
        "blow-up threshold max{p_inf(n-1+mu/2), p0(n+mu)} for m=(mu-2)mu"));
  for (double alpha : {0.25, 0.5, 0.75})
    rows.push_back(detail::exponent_entry(
        "space_dependent_p_crit", json{{"n", sc.problem.n}, {"alpha", alpha}},
        space_dependent_p_crit(sc.problem.n, alpha),
        "critical exponent 1+2/(n-alpha) for damping mu<x>^{-alpha}, alpha in (0,1)"));
  json out;
  out["schema_version"] = kSchemaVersion;
  out["table"] = rows;
  return out;
}

inline json classify_json(const Scenario& sc) {
  const auto v = exponents::classify(sc.problem.n, sc.problem.mu, sc.problem.m, sc.problem.p);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = sc.problem.n;
  j["mu"] = sc.problem.mu;
  j["m"] = sc.problem.m;
  j["p"] = sc.problem.p;
  j["regime"] = exponents::to_string(v.regime);
  j["boundary"] = v.boundary;
  j["sources"] = v.sources;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

inline json problem_spec_json(const transforms::ProblemSpec& s) {
  json j;
  j["n"] = s.n;
  j["mu"] = s.mu;
  j["m"] = s.m;
  j["p"] = s.p;
  j["form"] = transforms::to_string(s.form);
  j["weight_exponent"] = s.weight_exponent;
  j["speed_exponent"] = s.speed_exponent;
  j["mass_coefficient"] = s.mass_coefficient;
  j["initial_time"] = s.initial_time;
  j["nonlinearity_constant"] = s.nonlinearity_constant;
  return j;
}

inline json transform_json(const Scenario& sc) {
  using namespace transforms;
  std::pair<ProblemSpec, DataMap> result{sc.problem, DataMap{}};
  std::string applied = sc.transform;
  if (applied == "auto") {
    if (!nearly_equal(sc.problem.m, 0.0))
      applied = "mass-shift";
    else if (nearly_equal(sc.problem.mu, 1.0))
      applied = "exponential";
    else if (sc.problem.mu < 1.0)
      applied = "time-reparam";
    else
      applied = "dissipation-shift";
  }
  if (applied == "dissipation-shift")
    result = dissipation_shift(sc.problem);
  else if (applied == "time-reparam")
    result = sc.problem.mu < 1.0 ? time_reparam_sub1(sc.problem) : time_reparam_super1(sc.problem);
  else if (applied == "exponential")
    result = exponential_reparam(sc.problem);
  else if (applied == "mass-shift")
    result = mass_shift(sc.problem);
  else
    throw validation_error("transform: unknown transform '" + applied + "'");
  json j;
  j["schema_version"] = kSchemaVersion;
  j["transform"] = applied;
  j["input"] = problem_spec_json(sc.problem);
  j["output"] = problem_spec_json(result.first);
  j["data_map"] = {{"a", result.second.a},
                   {"b", result.second.b},
                   {"c", result.second.c},
                   {"d", result.second.d},
                   {"time_reparameterization", result.second.time_reparameterization}};
  return j;
}

namespace detail {

inline void run_linear(const Scenario& sc, const fs::path& dir, RunManifest& man) {
  const RadialProfile g = sc.data.build();
  const double r_max = sc.grid.r_max > 0.0 ? sc.grid.r_max : sc.grid.t_max + 5.0;
  const auto field = radial_linear::fill_linear_field(g, uniform_grid(sc.grid.t_max, sc.grid.dt),
                                                      uniform_grid(r_max, sc.grid.dr));
  const auto norm = radial_linear::xkappa_norm(field, sc.kappa);
  write_field_csv(dir / "field.csv", field);
  man.outputs.push_back("field.csv");
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kappa"] = sc.kappa;
  j["norm_u"] = norm.norm_u;
  j["norm_dru"] = norm.norm_dru;
  j["total"] = norm.total;
  j["argmax_u"] = {{"t", norm.argmax_u_t}, {"r", norm.argmax_u_r}};
  j["argmax_dru"] = {{"t", norm.argmax_dru_t}, {"r", norm.argmax_dru_r}};
  j["epsilon"] = g.epsilon;
  if (g.epsilon > 0.0) j["total_per_epsilon"] = norm.total / g.epsilon;
  write_text(dir / "norm.json", j.dump(2) + "\n");
  man.outputs.push_back("norm.json");
  man.measurements["norm_total"] = norm.total;
  if (g.amplitude != 0.0)
    man.measurements["norm_per_amplitude"] = norm.total / std::abs(g.amplitude);
}

inline void run_picard(const Scenario& sc, const fs::path& dir, RunManifest& man) {
  const RadialProfile g = sc.data.build();
  duhamel::PicardGrid grid;
  grid.dt = sc.grid.dt;
  grid.dr = sc.grid.dr;
  grid.t_max = sc.grid.t_max;
  grid.r_norm = sc.grid.r_max;
  duhamel::PicardOptions opts;
  opts.tol = sc.tol;
  opts.max_iter = sc.max_iter;
  const auto rep = duhamel::picard_solve(g, sc.problem.p, sc.kappa, grid, opts);

  // Decay of u along the ray r = 0.
  std::vector<double> u0(rep.field.nt());
  for (std::size_t it = 0; it < rep.field.nt(); ++it) u0[it] = rep.field.u_at(it, 0);
  const LinearFit decay = fit_loglog_slope(rep.field.t_grid, u0, sc.fit.t_lo, sc.fit.t_hi);

  write_field_csv(dir / "field.csv", rep.field);
  man.outputs.push_back("field.csv");
  json j;
  j["schema_version"] = kSchemaVersion;
  j["p"] = sc.problem.p;
  j["kappa"] = sc.kappa;
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["iterate_norms"] = rep.iterate_norms;
  j["differences"] = rep.differences;
  j["contraction_ratio"] = rep.contraction_ratio;
  j["correction_boundary_max"] = rep.correction_boundary_max;
  j["final_norm_total"] = rep.final_norm.total;
  j["decay_fit"] = {{"slope", decay.slope},
                    {"stderr", decay.slope_stderr},
                    {"t_lo", sc.fit.t_lo},
                    {"t_hi", sc.fit.t_hi}};
  write_text(dir / "report.json", j.dump(2) + "\n");
  man.outputs.push_back("report.json");
  man.measurements["contraction_ratio"] = rep.contraction_ratio;
  man.measurements["iterations"] = rep.iterations;
  man.measurements["decay_slope"] = decay.slope;
  man.measurements["norm_total"] = rep.final_norm.total;
  man.verdicts["converged"] = rep.converged ? "yes" : "no";
}

inline void run_fd(const Scenario& sc, const fs::path& dir, RunManifest& man) {
  const RadialProfile v1 = sc.data.build();
  const RadialProfile v0 = sc.has_v0 ? sc.data_v0.build() : zero_profile();
  blowup::FdGrid grid;
  grid.dr = sc.grid.dr;
  grid.dt = sc.grid.dt;
  grid.r_max = sc.grid.r_max;
  grid.store_dt = sc.grid.store_dt;
  const auto result = blowup::radial_fd_solve(sc.problem, v0, v1, grid, sc.grid.t_max);
  const auto series = blowup::glassey_functionals(result.field, sc.problem.n);

  std::vector<double> bound(series.t.size(), 0.0);
  if (sc.problem.n >= 1 && sc.problem.n <= 3)
    for (std::size_t i = 0; i < series.t.size(); ++i)
      bound[i] = blowup::f1_lower_bound(v0, v1, sc.problem.n, series.t[i]);

  const LinearFit growth = fit_loglog_slope(series.t, series.F, sc.fit.t_lo, sc.fit.t_hi);

  write_field_csv(dir / "field.csv", result.field);
  man.outputs.push_back("field.csv");
  write_series_csv(dir / "series.csv", {"t", "F", "F1", "bound_rhs"},
                   {series.t, series.F, series.F1, bound});
  man.outputs.push_back("series.csv");
  json j;
  j["schema_version"] = kSchemaVersion;
  j["blowup_candidate"] = result.blowup_candidate;
  if (result.blowup_candidate) j["blow_time"] = result.blow_time;
  j["growth_fit"] = {{"slope", growth.slope},
                     {"stderr", growth.slope_stderr},
                     {"t_lo", sc.fit.t_lo},
                     {"t_hi", sc.fit.t_hi}};
  j["steps"] = result.steps;
  write_text(dir / "report.json", j.dump(2) + "\n");
  man.outputs.push_back("report.json");
  man.measurements["growth_exponent"] = growth.slope;
  man.verdicts["blowup_candidate"] = result.blowup_candidate ? "yes" : "no";
  if (result.blowup_candidate) man.measurements["blow_time"] = result.blow_time;
}

inline void run_ode(const Scenario& sc, const fs::path& dir, RunManifest& man) {
  blowup::OdeBlowupInstance inst;
  inst.p = sc.ode.p;
  inst.q = sc.ode.q;
  inst.K0 = sc.ode.K0;
  inst.K1 = sc.ode.K1;
  inst.R = sc.ode.R;
  inst.a = sc.ode.a;
  inst.T1 = sc.ode.T1;
  inst.F0 = sc.ode.F0;
  inst.Fdot0 = sc.ode.Fdot0;
  const auto diag = blowup::ode_blowup_integrate(inst, sc.ode.horizon, sc.ode.escape_threshold);
  write_series_csv(dir / "series.csv", {"t", "F"}, {diag.times, diag.F_series});
  man.outputs.push_back("series.csv");
  json j;
  j["schema_version"] = kSchemaVersion;
  j["verdict"] = blowup::to_string(diag.verdict);
  if (diag.estimated_Tstar) j["estimated_Tstar"] = *diag.estimated_Tstar;
  j["fitted_growth_exponent"] = diag.fitted_growth_exponent;
  j["fit_stderr"] = diag.fit_stderr;
  j["escape_time_coarse"] = diag.escape_time_coarse;
  j["escape_time_fine"] = diag.escape_time_fine;
  j["subcritical"] = inst.subcritical();
  j["critical"] = inst.critical();
  write_text(dir / "report.json", j.dump(2) + "\n");
  man.outputs.push_back("report.json");
  man.verdicts["verdict"] = blowup::to_string(diag.verdict);
  if (diag.estimated_Tstar) man.measurements["Tstar"] = *diag.estimated_Tstar;
  man.measurements["growth_exponent"] = diag.fitted_growth_exponent;
}

inline void run_verify(const Scenario& sc, const fs::path& dir, RunManifest& man) {
  json pairs = json::array();
  double worst_variation = 0.0;
  for (std::size_t i = 0; i < sc.verify.p_values.size(); ++i) {
    const double p = sc.verify.p_values[i];
    const double kappa = sc.verify.kappa_values[i];
    const auto entries = duhamel::verify_I(p, kappa, sc.verify.xi_values);
    json rows = json::array();
    for (const auto& e : entries)
      rows.push_back({{"xi", e.xi}, {"I", e.value}, {"normalized", e.normalized}});
    double vmin = kInf, vmax = 0.0;
    for (const auto& e : entries)
      if (e.xi >= 10.0) {
        vmin = std::min(vmin, e.normalized);
        vmax = std::max(vmax, e.normalized);
      }
    const double variation = (vmin > 0.0 && std::isfinite(vmin)) ? vmax / vmin - 1.0 : 0.0;
    worst_variation = std::max(worst_variation, variation);
    pairs.push_back({{"p", p}, {"kappa", kappa}, {"entries", rows}, {"variation", variation}});
  }

  // Deterministic log-spaced (t, r) sample set for the zone bounds.
  std::vector<std::pair<double, double>> samples;
  const int per_axis = std::max(2, static_cast<int>(std::round(std::sqrt(sc.verify.zone_samples))));
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j) {
      const double t = 0.5 * std::pow(sc.verify.sample_t_max / 0.5,
                                      static_cast<double>(i) / (per_axis - 1));
      const double r = 0.25 * std::pow(sc.verify.sample_t_max / 0.25,
                                       static_cast<double>(j) / (per_axis - 1));
      samples.emplace_back(t, r);
    }
  const double p0 = sc.verify.p_values.front();
  const double k0 = sc.verify.kappa_values.front();
  const auto zones = duhamel::verify_I0_I1(p0, k0, samples);
  std::map<std::string, double> zone_max;
  json zone_rows = json::array();
  for (const auto& z : zones) {
    zone_rows.push_back({{"t", z.t},
                         {"r", z.r},
                         {"zone", duhamel::to_string(z.zone)},
                         {"I0_ratio", z.I0_ratio},
                         {"I1_minus_ratio", z.I1_minus_ratio},
                         {"I1_plus_ratio", z.I1_plus_ratio}});
    auto& m = zone_max[duhamel::to_string(z.zone)];
    m = std::max({m, z.I0_ratio, z.I1_minus_ratio, z.I1_plus_ratio});
  }
  json j;
  j["schema_version"] = kSchemaVersion;
  j["I_pairs"] = pairs;
  j["zone_samples"] = zone_rows;
  j["zone_max_ratio"] = zone_max;
  write_text(dir / "verify.json", j.dump(2) + "\n");
  man.outputs.push_back("verify.json");
  man.measurements["I_worst_variation"] = worst_variation;
  for (const auto& [zone, ratio] : zone_max) man.measurements["zone_max:" + zone] = ratio;
}

}  // namespace detail

struct RunPolicy {
  bool resume = false;  // reuse an existing manifest for the same hash
};

inline RunManifest run(const Scenario& sc, const fs::path& out_root, RunPolicy policy = {}) {
  const auto errors = sc.validate();
  if (!errors.empty()) {
    std::string what = "scenario validation failed:";
    for (const auto& e : errors) what += "\n  - " + e;
    throw validation_error(what);
  }
  RunManifest man;
  man.name = sc.name;
  man.scenario_hash = sc.hash();
  const fs::path dir = out_root / (sc.name + "-" + man.scenario_hash.substr(0, 12));
  man.directory = dir.string();

  if (policy.resume && fs::exists(dir / "manifest.json")) {
    std::ifstream in(dir / "manifest.json");
    json j = json::parse(in);
    man.status = j.value("status", "ok");
    man.outputs = j.value("outputs", std::vector<std::string>{});
    if (j.contains("measurements"))
      for (auto& [k, v] : j["measurements"].items()) man.measurements[k] = v.get<double>();
    if (j.contains("verdicts"))
      for (auto& [k, v] : j["verdicts"].items()) man.verdicts[k] = v.get<std::string>();
    return man;
  }
  fs::create_directories(dir);

  switch (sc.solver) {
    case SolverKind::Linear: detail::run_linear(sc, dir, man); break;
    case SolverKind::Picard: detail::run_picard(sc, dir, man); break;
    case SolverKind::Fd: detail::run_fd(sc, dir, man); break;
    case SolverKind::OdeLemma: detail::run_ode(sc, dir, man); break;
    case SolverKind::Verify: detail::run_verify(sc, dir, man); break;
    case SolverKind::Exponents:
      detail::write_text(dir / "exponents.json", exponents_table(sc).dump(2) + "\n");
      man.outputs.push_back("exponents.json");
      break;
    case SolverKind::Classify: {
      const json j = classify_json(sc);
      detail::write_text(dir / "verdict.json", j.dump(2) + "\n");
      man.outputs.push_back("verdict.json");
      man.verdicts["regime"] = j["regime"].get<std::string>();
      break;
    }
    case SolverKind::Transform:
      detail::write_text(dir / "transform.json", transform_json(sc).dump(2) + "\n");
      man.outputs.push_back("transform.json");
      break;
  }
  detail::write_text(dir / "manifest.json", man.to_json().dump(2) + "\n");
  return man;
}

// Cartesian product of the sweep axes applied to the base scenario.
inline std::vector<Scenario> expand_sweep(const Scenario& base) {
  std::vector<Scenario> out{base};
  for (const auto& [param, values] : base.sweep_axes) {
    std::vector<Scenario> next;
    next.reserve(out.size() * values.size());
    for (const auto& sc : out)
      for (double v : values) {
        Scenario s = sc;
        s.sweep_axes.clear();
        s.set_parameter(param, v);
        char short_v[32];
        std::snprintf(short_v, sizeof short_v, "%.12g", v);
        s.name = sc.name + "-" + param + "=" + short_v;
        next.push_back(std::move(s));
      }
    out = std::move(next);
  }
  return out;
}

struct SweepResult {
  std::vector<Scenario> scenarios;
  std::vector<RunManifest> manifests;
  fs::path summary_path;
};

// Runs every scenario of the expanded sweep; failures are recorded and do
// not stop the sweep. Scenario-level parallelism via `jobs`; the summary
// is written in deterministic scenario order afterwards.
inline SweepResult sweep(const Scenario& base, const fs::path& out_root, unsigned jobs = 1) {
  SweepResult result;
  result.scenarios = expand_sweep(base);
  result.manifests.resize(result.scenarios.size());

  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= result.scenarios.size()) break;
      RunManifest man;
      try {
        man = run(result.scenarios[i], out_root, RunPolicy{true});
      } catch (const validation_error& e) {
        man.status = "validation-error";
        man.error = e.what();
      } catch (const divergence_error& e) {
        man.status = "divergence-error";
        man.error = e.what();
      } catch (const numerical_error& e) {
        man.status = "numerical-error";
        man.error = e.what();
      } catch (const std::exception& e) {
        man.status = "error";
        man.error = e.what();
      }
      if (man.name.empty()) {
        man.name = result.scenarios[i].name;
        man.scenario_hash = result.scenarios[i].hash();
      }
      result.manifests[i] = std::move(man);
    }
  };
  const unsigned nworkers =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(result.scenarios.size())));
  if (nworkers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  fs::create_directories(out_root);
  static const std::vector<std::string> keys = {
      "norm_total",      "norm_per_amplitude", "contraction_ratio", "iterations",
      "decay_slope",     "growth_exponent",    "Tstar",             "blow_time",
      "I_worst_variation"};
  std::string text = "name,hash,status,solver";
  for (const auto& k : keys) text += "," + k;
  text += ",verdict\n";
  for (std::size_t i = 0; i < result.scenarios.size(); ++i) {
    const auto& sc = result.scenarios[i];
    const auto& man = result.manifests[i];
    text += sc.name + "," + man.scenario_hash + "," + man.status + "," + to_string(sc.solver);
    for (const auto& k : keys) {
      text += ',';
      auto it = man.measurements.find(k);
      if (it != man.measurements.end()) text += detail::fmt17(it->second);
    }
    text += ',';
    {
      auto it = man.verdicts.find("verdict");
      if (it == man.verdicts.end()) it = man.verdicts.find("blowup_candidate");
      if (it == man.verdicts.end()) it = man.verdicts.find("converged");
      if (it != man.verdicts.end()) text += it->first + "=" + it->second;
    }
    text += '\n';
  }
  result.summary_path = out_root / "summary.csv";
  detail::write_text(result.summary_path, text);
  return result;
}

}  // namespace wavecrit::harness
