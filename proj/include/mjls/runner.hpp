#pragma once

#include "mjls/analysis.hpp"
#include "mjls/config.hpp"
#include "mjls/mc.hpp"
#include "mjls/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mjls {

// Command-line overrides applied on top of a loaded config.
struct CliOverrides {
  std::string out_dir;
  std::vector<double> alphas;
  int horizon = -1;
  long long mc_trajectories = -1;
  bool seed_set = false;
  std::uint64_t seed = 0;
};

void apply_overrides(ProblemConfig& cfg, const CliOverrides& ov);

// Everything a run produced; CSV files land in cfg.out_dir.
struct RunReport {
  StabilityReport stability;
  SteadyState steady;
  BoundsReport bounds;
  std::vector<double> mse;  // exact E‖ξᵏ‖², k = 0..horizon
  MCEstimate mc;
  std::vector<SweepRow> sweep;
  double critical_alpha = 0.0;
  std::vector<std::string> warnings;
  std::vector<std::string> outputs;  // files written
};

// Subcommands.  Each prints a human summary to stdout, writes CSV files, and
// throws: InvalidInputError for bad inputs, AnalysisError when a required
// stability/ergodicity condition fails, NumericalError on internal failures.
RunReport run_analyze(const ProblemConfig& cfg);   // trajectory.csv
RunReport run_simulate(const ProblemConfig& cfg);  // trajectory.csv (+ MC columns)
RunReport run_sweep(const ProblemConfig& cfg);     // sweep.csv
RunReport run_critical_alpha(const ProblemConfig& cfg);

}  // namespace mjls
