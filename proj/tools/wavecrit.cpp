// wavecrit: laboratory CLI for semilinear waves with scale-invariant
// damping. Subcommands dispatch a TOML scenario to the library solvers
// and verifiers; outputs land in a content-addressed run directory.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wavecrit/harness.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitDivergence = 4;

struct CommonArgs {
  std::string config;
  std::string out;
  unsigned jobs = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wavecrit::validation_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string default_out_root(const std::string& cli_value) {
  if (!cli_value.empty()) return cli_value;
  if (const char* env = std::getenv("WAVECRIT_OUT")) return env;
  return "runs";
}

wavecrit::harness::Scenario load_scenario(const CommonArgs& args,
                                          wavecrit::harness::SolverKind solver) {
  wavecrit::harness::Scenario sc;
  if (!args.config.empty()) sc = wavecrit::harness::scenario_from_string(read_file(args.config));
  sc.solver = solver;
  return sc;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* opt = cmd->add_option("--config", args.config, "TOML scenario file");
  if (config_required) opt->required();
  cmd->add_option("--out", args.out, "output root directory (default $WAVECRIT_OUT or ./runs)");
  cmd->add_option("--jobs", args.jobs, "parallel scenarios in a sweep");
}

int dispatch(const CommonArgs& args, wavecrit::harness::SolverKind solver) {
  using namespace wavecrit::harness;
  const Scenario sc = load_scenario(args, solver);
  // Pure emitters print to stdout as well as the run directory.
  if (solver == SolverKind::Exponents)
    std::cout << exponents_table(sc).dump(2) << "\n";
  else if (solver == SolverKind::Classify)
    std::cout << classify_json(sc).dump(2) << "\n";
  else if (solver == SolverKind::Transform)
    std::cout << transform_json(sc).dump(2) << "\n";
  const RunManifest man = run(sc, default_out_root(args.out));
  std::cerr << "run " << man.name << " -> " << man.directory << "\n";
  return 0;
}

int dispatch_sweep(const CommonArgs& args) {
  using namespace wavecrit::harness;
  Scenario base = scenario_from_string(read_file(args.config));
  const SweepResult result = sweep(base, default_out_root(args.out), args.jobs);
  std::size_t failed = 0;
  for (const auto& man : result.manifests)
    if (man.status != "ok") ++failed;
  std::cout << "sweep: " << result.manifests.size() << " scenarios, " << failed
            << " failed; summary at " << result.summary_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for semilinear waves with scale-invariant damping"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    wavecrit::harness::SolverKind kind;
    bool config_required;
  };
  const Sub subs[] = {
      {"exponents", "emit the critical-exponent table as JSON", wavecrit::harness::SolverKind::Exponents, false},
      {"classify", "classify (n, mu, m, p) into blow-up / global existence / open", wavecrit::harness::SolverKind::Classify, true},
      {"transform", "apply a change of variables to the problem descriptor", wavecrit::harness::SolverKind::Transform, true},
      {"solve-linear", "closed-form radial linear solver with X_kappa norms", wavecrit::harness::SolverKind::Linear, true},
      {"solve-picard", "Picard/Duhamel fixed-point solver", wavecrit::harness::SolverKind::Picard, true},
      {"solve-fd", "finite-difference radial solver with Glassey functionals", wavecrit::harness::SolverKind::Fd, true},
      {"blowup-ode", "ODE blow-up lemma engine", wavecrit::harness::SolverKind::OdeLemma, true},
      {"verify-estimates", "numerical verifiers for the integral estimates", wavecrit::harness::SolverKind::Verify, true},
  };

  std::vector<std::pair<CommonArgs, wavecrit::harness::SolverKind>> handlers(
      std::size(subs), {CommonArgs{}, wavecrit::harness::SolverKind::Linear});
  for (std::size_t i = 0; i < std::size(subs); ++i) {
    auto* cmd = app.add_subcommand(subs[i].name, subs[i].help);
    handlers[i].second = subs[i].kind;
    add_common(cmd, handlers[i].first, subs[i].config_required);
    cmd->callback([&, i]() {
      const int rc = dispatch(handlers[i].first, handlers[i].second);
      if (rc != 0) throw CLI::RuntimeError(rc);
    });
  }

  CommonArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "run the cartesian sweep described by [sweep]");
  add_common(sweep_cmd, sweep_args, true);
  sweep_cmd->callback([&]() {
    const int rc = dispatch_sweep(sweep_args);
    if (rc != 0) throw CLI::RuntimeError(rc);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const wavecrit::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const wavecrit::divergence_error& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const wavecrit::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
