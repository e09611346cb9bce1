#include "mjls/runner.hpp"

#include "mjls/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace mjls {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

double single_alpha(const ProblemConfig& cfg) {
  if (cfg.alphas.size() != 1) {
    throw InvalidInputError(
        "this subcommand needs a single alpha; got a list of " +
        std::to_string(cfg.alphas.size()) + " (use the sweep subcommand)");
  }
  return cfg.alphas[0];
}

std::string output_path(const ProblemConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cout << "warning: " << w << "\n";
}

void print_stability(const StabilityReport& rep) {
  std::cout << "sigma(H11) = " << fmt(rep.sigma_H11.spectral_radius)
            << "   sigma(H22) = " << fmt(rep.sigma_H22.spectral_radius)
            << "   sigma(H) = " << fmt(rep.sigma_H.spectral_radius) << "\n";
  if (!rep.sigma_H.dominant_semisimple || !rep.sigma_H22.dominant_semisimple) {
    std::cout << "note: dominant eigenvalue not semisimple; reported rates "
                 "carry +"
              << kRateEpsilon << "\n";
  }
  std::cout << "verdict: "
            << (rep.stable ? "mean-square stable"
                           : (rep.marginal ? "marginal / unstable"
                                           : "unstable"))
            << "\n";
  if (std::isfinite(rep.perturbation_sigma_H22)) {
    std::cout << "first-order predictions: sigma(H) ~ "
              << fmt(rep.perturbation_sigma_H) << ", sigma(H22) ~ "
              << fmt(rep.perturbation_sigma_H22) << "  (Re lambda_maxRe = "
              << fmt(rep.lambda_maxRe_Abar.real()) << ")\n";
  } else {
    std::cout << "first-order predictions unavailable (chain not ergodic)\n";
  }
}

struct TrajectoryRows {
  std::vector<double> mse;
  const BoundsReport* bounds = nullptr;
  const MCEstimate* mc = nullptr;  // optional columns
  const std::vector<int>* record_steps = nullptr;
};

void write_trajectory_csv(const std::string& path, const TrajectoryRows& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write output file: " + path);
  out << "k,mse_exact,mse_lower,mse_upper";
  if (rows.mc != nullptr) out << ",mse_mc,mse_mc_se";
  out << "\n";
  std::size_t mc_idx = 0;
  for (std::size_t k = 0; k < rows.mse.size(); ++k) {
    out << k << "," << fmt17(rows.mse[k]) << ","
        << fmt17(rows.bounds->envelope[k].first) << ","
        << fmt17(rows.bounds->envelope[k].second);
    if (rows.mc != nullptr) {
      if (mc_idx < rows.record_steps->size() &&
          (*rows.record_steps)[mc_idx] == static_cast<int>(k)) {
        const MCStepEstimate& step = rows.mc->steps[mc_idx];
        out << "," << fmt17(step.mean_square) << ","
            << fmt17(step.mean_square_se);
        ++mc_idx;
      } else {
        out << ",,";
      }
    }
    out << "\n";
  }
}

RunReport analyze_common(const ProblemConfig& cfg, bool with_mc) {
  const double alpha = single_alpha(cfg);
  RunReport rep;
  Vector xi0;
  const JumpLinearSystem sys =
      make_system(cfg, alpha, &xi0, nullptr, &rep.warnings);

  rep.stability = stability_report(sys, SamplingMode::kMarkov);
  std::cout << "alpha = " << fmt(alpha) << ", modes = " << sys.num_modes()
            << ", dimension = " << sys.d << "\n";
  print_stability(rep.stability);

  TrajectoryAnalysis ta = markov_trajectory_with_limits(
      sys, initial_moments(sys, xi0), cfg.horizon, &rep.warnings);
  rep.steady = ta.steady;
  rep.bounds = ta.bounds;
  rep.mse.reserve(ta.trajectory.size());
  for (const MomentState& m : ta.trajectory) {
    rep.mse.push_back(mean_square_norm(m));
  }

  std::cout << "delta_inf = " << fmt(rep.steady.delta_inf)
            << "   envelope rate = " << fmt(rep.bounds.rate)
            << "   C0 = " << fmt(rep.bounds.C0) << "\n";
  if (rep.bounds.rate_ties_mixing) {
    std::cout << "note: spectral and mixing rates coincide; decay may carry "
                 "an extra factor of k\n";
  }

  std::vector<int> record_steps = cfg.mc.record_steps;
  if (with_mc) {
    if (record_steps.empty()) {
      record_steps.resize(cfg.horizon + 1);
      for (int k = 0; k <= cfg.horizon; ++k) record_steps[k] = k;
    }
    MCConfig mcc;
    mcc.trajectories = cfg.mc.trajectories;
    mcc.horizon = cfg.horizon;
    mcc.base_seed = cfg.mc.seed;
    mcc.record_steps = record_steps;
    rep.mc = simulate_moments(sys, xi0, mcc);

    // Agreement summary: fraction of recorded mean-square values within
    // three standard errors of the exact trajectory.
    int within = 0;
    int total = 0;
    for (std::size_t r = 0; r < record_steps.size(); ++r) {
      const MCStepEstimate& step = rep.mc.steps[r];
      if (!rep.mc.has_se) continue;
      const double se = std::max(step.mean_square_se, 1e-300);
      ++total;
      if (std::abs(step.mean_square - rep.mse[record_steps[r]]) <= 3.0 * se) {
        ++within;
      }
    }
    if (total > 0) {
      std::cout << "monte carlo (" << rep.mc.trajectories << " trajectories): "
                << within << "/" << total
                << " recorded mean-square values within 3 SE of exact\n";
    }
  }

  TrajectoryRows rows;
  rows.mse = rep.mse;
  rows.bounds = &rep.bounds;
  if (with_mc) {
    rows.mc = &rep.mc;
    rows.record_steps = &record_steps;
  }
  const std::string path = output_path(cfg, "trajectory.csv");
  write_trajectory_csv(path, rows);
  rep.outputs.push_back(path);
  std::cout << "wrote " << path << "\n";
  print_warnings(rep.warnings);
  return rep;
}

}  // namespace

void apply_overrides(ProblemConfig& cfg, const CliOverrides& ov) {
  if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
  if (!ov.alphas.empty()) cfg.alphas = ov.alphas;
  if (ov.horizon >= 0) cfg.horizon = ov.horizon;
  if (ov.mc_trajectories >= 1) cfg.mc.trajectories = ov.mc_trajectories;
  if (ov.seed_set) cfg.mc.seed = ov.seed;
}

RunReport run_analyze(const ProblemConfig& cfg) {
  return analyze_common(cfg, /*with_mc=*/false);
}

RunReport run_simulate(const ProblemConfig& cfg) {
  return analyze_common(cfg, /*with_mc=*/true);
}

RunReport run_sweep(const ProblemConfig& cfg) {
  RunReport rep;
  const JumpLinearSystem sys =
      make_system(cfg, cfg.alphas[0], nullptr, nullptr, &rep.warnings);
  rep.sweep = alpha_sweep(sys, cfg.alphas, SamplingMode::kMarkov);

  const std::string path = output_path(cfg, "sweep.csv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write output file: " + path);
  out << "alpha,sigma_H11,sigma_H22,sigma_pred_H22,delta_inf\n";
  for (const SweepRow& row : rep.sweep) {
    out << fmt17(row.alpha) << "," << fmt17(row.sigma_H11) << ","
        << fmt17(row.sigma_H22) << "," << fmt17(row.sigma_pred_H22) << ","
        << fmt17(row.delta_inf) << "\n";
  }
  rep.outputs.push_back(path);

  std::cout << "alpha        sigma(H22)    delta_inf\n";
  for (const SweepRow& row : rep.sweep) {
    std::cout << fmt(row.alpha) << "  " << fmt(row.sigma_H22) << "  "
              << (row.stable ? fmt(row.delta_inf) : "unstable") << "\n";
  }
  std::cout << "wrote " << path << "\n";
  print_warnings(rep.warnings);
  return rep;
}

RunReport run_critical_alpha(const ProblemConfig& cfg) {
  RunReport rep;
  Vector xi0;
  const JumpLinearSystem sys =
      make_system(cfg, cfg.alphas[0], &xi0, nullptr, &rep.warnings);
  rep.critical_alpha = critical_alpha(sys, SamplingMode::kMarkov);
  std::cout << "critical alpha = " << fmt17(rep.critical_alpha) << "\n";

  // Quick empirical cross-check on either side of the boundary.
  MCConfig probe;
  probe.trajectories = std::min<long long>(cfg.mc.trajectories, 2000);
  probe.horizon = std::max(10, std::min(cfg.horizon, 60));
  probe.base_seed = cfg.mc.seed;
  for (int k = probe.horizon / 2; k <= probe.horizon; ++k) {
    probe.record_steps.push_back(k);
  }
  for (double factor : {0.9, 1.1}) {
    const JumpLinearSystem trial(sys.chain, sys.A, sys.b,
                                 factor * rep.critical_alpha);
    const DivergenceReport dr = divergence_probe(trial, xi0, probe);
    std::cout << "probe at " << fmt(factor) << " * critical: "
              << (dr.verdict == GrowthVerdict::kGrowing
                      ? "growing"
                      : dr.verdict == GrowthVerdict::kSettling
                            ? "settling"
                            : "inconclusive");
    if (dr.overflow) {
      std::cout << " (overflow at step " << dr.overflow_step << ")";
    } else {
      std::cout << " (log-slope " << fmt(dr.slope) << ")";
    }
    std::cout << "\n";
  }
  print_warnings(rep.warnings);
  return rep;
}

}  // namespace mjls
