#pragma once

#include "mjls/jump.hpp"
#include "mjls/types.hpp"

#include <cstdint>
#include <vector>

namespace mjls {

struct MCConfig {
  long long trajectories = 1;
  int horizon = 0;
  std::uint64_t base_seed = 0;
  std::vector<int> record_steps;  // sorted, unique, within [0, horizon]
};

// Empirical moments at one recorded step, averaged over trajectories.  Every
// statistic has a matching standard error (sample standard deviation / √T);
// the *_se fields are empty (or NaN for scalars) when T = 1.
struct MCStepEstimate {
  int k = 0;
  std::vector<Vector> q;  // per-mode indicator means E[ξ·1{z=i}]
  std::vector<Vector> q_se;
  std::vector<Matrix> Q;  // per-mode indicator second moments
  std::vector<Matrix> Q_se;
  Vector mean;
  Vector mean_se;
  Matrix second_moment;
  Matrix second_moment_se;
  double mean_square = 0.0;
  double mean_square_se = 0.0;
  Vector mode_freq;  // empirical mode distribution
  Vector mode_freq_se;
};

struct MCEstimate {
  long long trajectories = 0;
  bool has_se = false;
  std::vector<MCStepEstimate> steps;  // aligned with cfg.record_steps
};

enum class GrowthVerdict { kGrowing, kSettling, kInconclusive };

struct DivergenceReport {
  GrowthVerdict verdict = GrowthVerdict::kInconclusive;
  double slope = 0.0;  // fitted d(log E‖ξᵏ‖²)/dk over the recorded steps
  bool overflow = false;
  int overflow_step = -1;
};

// Seeded simulation of the jump recursion.  Deterministic for fixed inputs:
// trajectory t draws from its own stream derived from (base_seed, t), and
// reductions run in trajectory-index order, so results are bit-identical
// regardless of scheduling.  ξ⁰ is deterministic; z⁰ ~ p0.
MCEstimate simulate_moments(const JumpLinearSystem& sys, const Vector& xi0,
                            const MCConfig& cfg);

// Empirical stability check: ordinary-least-squares slope of log E‖ξᵏ‖² vs k
// over the recorded steps.  Growing above 0.01, settling below 0.001,
// inconclusive between.  Numeric overflow is reported as growing with the
// step where it occurred.
DivergenceReport divergence_probe(const JumpLinearSystem& sys,
                                  const Vector& xi0, const MCConfig& cfg);

}  // namespace mjls
