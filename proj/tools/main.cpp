#include "mjls/config.hpp"
#include "mjls/errors.hpp"
#include "mjls/runner.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{
      "Exact moment analysis of Markov jump linear iterations:\n"
      "stability verdicts, steady-state mean-square error, trajectory\n"
      "envelopes, Monte Carlo cross-checks, and step-size sweeps."};
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::string config_path;
  mjls::CliOverrides ov;
  bool dump = false;

  app.add_option("--config", config_path, "problem config file (JSON)")
      ->required();
  app.add_option("--out", ov.out_dir, "output directory for CSV files");
  auto* seed_opt =
      app.add_option("--seed", ov.seed, "Monte Carlo base seed (u64)");
  app.add_option("--horizon", ov.horizon, "number of steps to analyze")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--alpha", ov.alphas, "step size(s), overriding the config")
      ->delimiter(',');
  app.add_option("--mc-trajectories", ov.mc_trajectories,
                 "Monte Carlo trajectory count")
      ->check(CLI::PositiveNumber);
  app.add_flag("--dump-config", dump,
               "print the canonical resolved config and exit");

  CLI::App* cmd_analyze = app.add_subcommand(
      "analyze", "exact stability, steady state, trajectory, and bounds");
  CLI::App* cmd_simulate = app.add_subcommand(
      "simulate", "analyze plus a Monte Carlo cross-check");
  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "stability and limits across step sizes");
  CLI::App* cmd_critical = app.add_subcommand(
      "critical-alpha", "step size at the mean-square stability boundary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  ov.seed_set = seed_opt->count() > 0;

  try {
    mjls::ProblemConfig cfg = mjls::load_config(config_path);
    mjls::apply_overrides(cfg, ov);

    if (dump) {
      std::cout << mjls::dump_config(cfg) << "\n";
      return 0;
    }

    if (cmd_analyze->parsed()) {
      mjls::run_analyze(cfg);
    } else if (cmd_simulate->parsed()) {
      mjls::run_simulate(cfg);
    } else if (cmd_sweep->parsed()) {
      mjls::run_sweep(cfg);
    } else if (cmd_critical->parsed()) {
      mjls::run_critical_alpha(cfg);
    } else {
      std::cerr << "error: no subcommand given (try --help)\n";
      return 1;
    }
  } catch (const mjls::InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const mjls::AnalysisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mjls::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
