#pragma once

#include "mjls/chain.hpp"
#include "mjls/random.hpp"
#include "mjls/types.hpp"

#include <utility>
#include <vector>

namespace mjls {

// Stochastic-approximation iteration ξᵏ⁺¹ = (I + αA(zᵏ))ξᵏ + αb(zᵏ) whose
// coefficients are selected by a finite Markov chain zᵏ.  The per-mode maps
// H_i = I + αA_i and G_i = αb_i are always recomputed from (A_i, b_i, α).
struct JumpLinearSystem {
  MarkovChain chain;
  Index d = 0;  // iterate dimension
  std::vector<Matrix> A;
  std::vector<Vector> b;
  double alpha = 0.0;

  JumpLinearSystem(MarkovChain chain_in, std::vector<Matrix> A_in,
                   std::vector<Vector> b_in, double alpha_in);

  Index num_modes() const { return chain.num_states(); }
  Matrix H(Index i) const { return Matrix::Identity(d, d) + alpha * A[i]; }
  Vector G(Index i) const { return alpha * b[i]; }
};

// Indicator moments at one step: q_i = E[ξ·1{z=i}], Q_i = E[ξξᵀ·1{z=i}],
// plus the mode distribution p and the step index.
struct MomentState {
  std::vector<Vector> q;
  std::vector<Matrix> Q;
  Vector p;
  int k = 0;
};

// Deterministic LTI system driving the stacked moments (q₁;…;q_n) and
// (vec(Q₁);…;vec(Q_n)).  The full map is block lower triangular:
// [q'; vecQ'] = [[H11, 0], [H21, H22]]·[q; vecQ] + [u_q(p); u_Q(p)].
class AugmentedLTI {
 public:
  AugmentedLTI(Matrix H11, Matrix H21, Matrix H22, Matrix Pt, Vector b_stack,
               Vector bb_stack, double alpha, Index n, Index d);

  const Matrix& H11() const { return H11_; }
  const Matrix& H21() const { return H21_; }
  const Matrix& H22() const { return H22_; }
  Index num_modes() const { return n_; }
  Index dim() const { return d_; }
  Index N() const { return n_ * d_ * d_; }

  // Block assembly with an exactly-zero top-right block.
  Matrix full() const;

  // Inputs for the current mode distribution p:
  // u_q = α·((Pᵀ·diag(p)) ⊗ I_d)·(stacked b),
  // u_Q = α²·((Pᵀ·diag(p)) ⊗ I_{d²})·(stacked b_i ⊗ b_i).
  Vector input_q(const Vector& p) const;
  Vector input_Q(const Vector& p) const;

 private:
  Matrix H11_, H21_, H22_;
  Matrix Pt_;
  Vector b_stack_, bb_stack_;
  double alpha_;
  Index n_, d_;
};

// One random realization: returns ((I+αA_z)ξ + αb_z, z′) with z′ drawn from
// row z of the transition matrix.
std::pair<Vector, Index> sample_step(const JumpLinearSystem& sys,
                                     const Vector& xi, Index z, Rng& rng);

// Exact one-step update of all indicator moments:
// q_j' = Σᵢ p_ij((I+αA_i)q_i + α·p_i·b_i),
// Q_j' = Σᵢ p_ij((I+αA_i)Q_i(I+αA_i)ᵀ + 2α·sym((I+αA_i)q_i b_iᵀ) + α²·p_i·b_i b_iᵀ),
// p' = Pᵀp.  Each Q_j' is re-symmetrized to absorb rounding.
MomentState moment_recursion_step(const JumpLinearSystem& sys,
                                  const MomentState& m);

// Moments at step 0 for a deterministic ξ⁰ independent of z⁰ ~ p⁰:
// q_i⁰ = p_i⁰·ξ⁰, Q_i⁰ = p_i⁰·ξ⁰ξ⁰ᵀ.
MomentState initial_moments(const JumpLinearSystem& sys, const Vector& xi0);

// Assemble the augmented LTI blocks:
// H11 block (j,i) = p_ij·(I+αA_i),
// H21 block (j,i) = α·p_ij·(b_i⊗(I+αA_i) + (I+αA_i)⊗b_i),
// H22 block (j,i) = p_ij·((I+αA_i)⊗(I+αA_i)).
// Rejects n·d² above max_dim (dense (n·d²)² storage).
AugmentedLTI build_augmented_lti(const JumpLinearSystem& sys,
                                 Index max_dim = 4096);

// Forward run of the augmented LTI for k steps, returning moments for steps
// m0.k .. m0.k + k.
std::vector<MomentState> augmented_trajectory(const AugmentedLTI& aug,
                                              const MomentState& m0,
                                              const MarkovChain& chain, int k);

// E‖ξ‖² = trace(Σᵢ Q_i).
Scalar mean_square_norm(const MomentState& m);

// Mode-averaged maps Ā = Σᵢ p_i A_i and b̄ = Σᵢ p_i b_i.
Matrix average_A(const JumpLinearSystem& sys, const Vector& p);
Vector average_b(const JumpLinearSystem& sys, const Vector& p);

// Stacked views used by the augmented system: (q₁;…;q_n) and
// (vec(Q₁);…;vec(Q_n)), with column-major vec and modes in index order.
Vector stack_first_moment(const MomentState& m);
Vector stack_second_moment(const MomentState& m);
MomentState unstack_moments(const Vector& q_stack, const Vector& Q_stack,
                            const Vector& p, int k, Index n, Index d);

}  // namespace mjls
