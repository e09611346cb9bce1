#pragma once

#include "mjls/jump.hpp"
#include "mjls/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace mjls {

// Policy evaluation on a finite MDP with linear features: states s follow the
// policy-induced transition matrix P_s, rewards are r(s), and values are
// approximated as φ(s)ᵀθ with φ(s)ᵀ = row s of Phi.
struct PolicyEvalProblem {
  Matrix P_s;
  Vector r;
  double gamma = 0.0;
  Matrix Phi;

  PolicyEvalProblem(Matrix P_s_in, Vector r_in, double gamma_in, Matrix Phi_in);

  Index num_states() const { return P_s.rows(); }
  Index feature_dim() const { return Phi.cols(); }
};

// TD(0) recast as a jump linear system in the error coordinate ξ = θ - θ*.
// Modes are state pairs z = (s', s) with s the current and s' the next MDP
// state; pair_index[mode] = (s', s).
struct TDJumpModel {
  JumpLinearSystem sys;
  Vector theta_star;
  std::vector<std::pair<Index, Index>> pair_index;
};

// TD(0) fixed point: solves ΦᵀD(Φ - γP_sΦ)θ* = ΦᵀD r with D = diag of the
// stationary state distribution.
Vector td_fixed_point(const PolicyEvalProblem& problem);

// Build the TD(0) jump system: mode (s', s) carries
// A = φ(s)(γφ(s') - φ(s))ᵀ and b = φ(s)(r(s) - (φ(s) - γφ(s'))ᵀθ*), and the
// pair chain moves (s', s) → (s'', s') with probability P_s(s', s'').
// Pairs with zero stationary mass (P_s(s, s') = 0) are pruned unless
// keep_unreachable is set.  The pair chain starts from s⁰ drawn from
// initial_state_distribution (stationary when empty) followed by one MDP step.
TDJumpModel build_td0(const PolicyEvalProblem& problem, double alpha,
                      bool keep_unreachable = false,
                      const Vector& initial_state_distribution = Vector());

// Wrap user-supplied mode matrices.  Never rejects systems that are merely
// inconvenient: uncentered offsets (Σp_i∞b_i ≠ 0) or a non-Hurwitz mean map Ā
// produce warnings, not errors.
JumpLinearSystem build_generic(std::vector<Matrix> A, std::vector<Vector> b,
                               MarkovChain chain, double alpha,
                               std::vector<std::string>* warnings = nullptr);

// Shift coordinates by ξ̃ = -Ā⁻¹(Σp_i∞b_i) so the returned system has
// Σp_i∞b̃_i = 0 with b̃_i = A_iξ̃ + b_i.  Paths of the original system equal
// paths of the shifted system plus ξ̃ (same modes, ξ̃⁰ = ξ⁰ - ξ̃).
std::pair<JumpLinearSystem, Vector> center_offsets(const JumpLinearSystem& sys);

}  // namespace mjls
