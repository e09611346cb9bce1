#pragma once

#include "mjls/analysis.hpp"
#include "mjls/jump.hpp"
#include "mjls/td.hpp"
#include "mjls/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mjls {

struct MCSettings {
  long long trajectories = 100000;
  std::uint64_t seed = 0;
  std::vector<int> record_steps;  // empty = every step
};

// A problem description loaded from a JSON config file.  Two kinds:
//   "raw": mode matrices {A_i}, offsets {b_i}, transition matrix P, optional
//          initial mode distribution p0 (uniform when omitted) and initial
//          iterate xi0 (zero when omitted);
//   "mdp": policy evaluation data (P_s, r, gamma, Phi) turned into the TD(0)
//          jump system, with optional initial parameter vector theta0 (zero
//          when omitted; the iterate starts at xi0 = theta0 - theta*).
struct ProblemConfig {
  std::string kind;

  // kind == "raw"
  Index n = 0;
  Index d = 0;
  std::vector<Matrix> A;
  std::vector<Vector> b;
  Matrix P;
  Vector p0;
  Vector xi0;

  // kind == "mdp"
  Index n_s = 0;
  Matrix P_s;
  Vector r;
  double gamma = 0.0;
  Matrix Phi;
  Vector theta0;

  // common
  std::vector<double> alphas;  // one entry for analyze, several for sweep
  int horizon = 200;
  SamplingMode sampling = SamplingMode::kMarkov;
  MCSettings mc;
  std::string out_dir = ".";
};

// Parse and validate; throws InvalidInputError carrying every validation
// failure found (one per line), not just the first.
ProblemConfig load_config(const std::string& path);
ProblemConfig parse_config(const std::string& text,
                           const std::string& source_name);

// Canonical JSON with all defaults resolved; parse_config(dump_config(c))
// reproduces c exactly.
std::string dump_config(const ProblemConfig& cfg);

// Instantiate the jump system at the given step size.  For "mdp" configs
// theta_star (when non-null) receives the TD fixed point.  xi0_out receives
// the initial iterate in error coordinates.  For sampling == kIID the chain
// is replaced by its one-step-mixing equivalent (every row and the initial
// distribution set to the stationary distribution), so sampled modes are
// independent draws as the IID analysis assumes.
JumpLinearSystem make_system(const ProblemConfig& cfg, double alpha,
                             Vector* xi0_out = nullptr,
                             Vector* theta_star_out = nullptr,
                             std::vector<std::string>* warnings = nullptr);

}  // namespace mjls
