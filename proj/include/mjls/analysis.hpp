#pragma once

#include "mjls/chain.hpp"
#include "mjls/jump.hpp"
#include "mjls/lti.hpp"
#include "mjls/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace mjls {

// How modes are drawn: kIID treats each step's mode as an independent draw
// from the chain's stationary distribution; kMarkov uses the chain itself.
enum class SamplingMode { kIID, kMarkov };

// LTI model for the unconditional moments μᵏ = Eξᵏ and ℚᵏ = Eξᵏξᵏᵀ under
// independent mode draws from p:
//   μᵏ⁺¹ = H11·μᵏ,  vec(ℚᵏ⁺¹) = H21·μᵏ + H22·vec(ℚᵏ) + input_Q
// with H11 = I+αĀ, H21 = α²Σp_i(A_i⊗b_i + b_i⊗A_i),
// H22 = I + α(I⊗Ā + Ā⊗I) + α²Σp_i(A_i⊗A_i), input_Q = α²Σp_i(b_i⊗b_i).
struct IIDMomentModel {
  Index d = 0;
  double alpha = 0.0;
  Matrix H11;
  Matrix H21;
  Matrix H22;
  Vector input_Q;
  // Ingredients kept for the steady-state formula.
  Matrix Abar;    // Σp_iA_i
  Matrix sum_AA;  // Σp_i(A_i⊗A_i)
  Vector sum_bb;  // Σp_i(b_i⊗b_i)

  Matrix full() const;  // [[H11, 0], [H21, H22]]
};

// Spectral verdict for the moment dynamics.  The system is mean-square
// stable iff σ(H22) < 1; |σ(H22)−1| ≤ 1e-10 is reported as marginal (and
// counted unstable).  The perturbation fields are first-order predictions in
// α; they are NaN when the chain is not ergodic (no stationary distribution
// to average over).
struct StabilityReport {
  RateReport sigma_H11;
  RateReport sigma_H22;
  RateReport sigma_H;
  bool stable = false;
  bool marginal = false;
  Complex lambda_maxRe_Abar{0.0, 0.0};
  double perturbation_sigma_H = 0.0;    // 1 + Re(λ_maxRe(Ā))·α
  double perturbation_sigma_H22 = 0.0;  // 1 + 2·Re(λ_maxRe(Ā))·α
};

// Limits of the moment recursions.  Stacked layout: q_inf holds n blocks of
// length d (for IID results n = 1 and q_inf = μ∞ = 0); Q_inf holds n blocks
// of length d², each a column-major vec of the per-mode limit.
struct SteadyState {
  Index n = 0;
  Index d = 0;
  Vector q_inf;
  Vector Q_inf;
  double delta_inf = 0.0;

  Matrix total_Q() const;  // Σᵢ Q_i∞ (d×d)
};

// Two-sided envelope δ∞ ± C0·rateᵏ around the exact mean-square error, with
// rate = max{reported rate of 𝓗, mixing rate ρ̃} and C0 fitted as the
// supremum of |MSEᵏ−δ∞|/rateᵏ over the computed horizon.  When the two
// competing rates coincide the true decay can carry an extra factor of k;
// rate_ties_mixing records that boundary case without changing the fit.
struct BoundsReport {
  double delta_inf = 0.0;
  double rate = 0.0;
  double C0 = 0.0;
  std::vector<std::pair<double, double>> envelope;  // (lower, upper) per step
  bool rate_ties_mixing = false;
};

struct TrajectoryAnalysis {
  std::vector<MomentState> trajectory;
  SteadyState steady;
  BoundsReport bounds;
};

struct SweepRow {
  double alpha = 0.0;
  double sigma_H11 = 0.0;
  double sigma_H22 = 0.0;
  double sigma_pred_H22 = 0.0;
  double delta_inf = 0.0;  // NaN when not stable
  bool stable = false;
};

// Eigenvalue with the largest real part; ties broken by larger modulus, then
// nonnegative imaginary part.
Complex max_real_eigenvalue(const Matrix& M);

// Moment LTI model for independent mode draws from p.  Requires Σp_ib_i = 0
// (run center_offsets first otherwise): with a nonzero mean offset the
// μ-recursion would need an input term this model does not carry.
IIDMomentModel build_iid_model(const JumpLinearSystem& sys, const Vector& p);

// (μᵏ, ℚᵏ) by the matrix-power closed form around the steady state; requires
// σ(H22) < 1.  μᵏ = H11ᵏμ⁰ exactly.
std::pair<Vector, Matrix> iid_closed_form(const IIDMomentModel& model,
                                          const Vector& mu0, const Matrix& Q0,
                                          int k);

// ℚ∞ via vec(ℚ∞) = −α(I⊗Ā+Ā⊗I+αΣp_iA_i⊗A_i)⁻¹Σp_i(b_i⊗b_i), cross-checked
// against the fixed-point form α²(I−H22)⁻¹Σp_i(b_i⊗b_i) to 1e-10;
// δ∞ = trace(ℚ∞).  Requires σ(H22) < 1.
SteadyState iid_steady_state(const IIDMomentModel& model);

// Fixed point of the augmented Markov moment dynamics driven by p∞:
// q∞ = (I−H11)⁻¹u_q(p∞), vec(Q∞) = (I−H22)⁻¹(H21·q∞ + u_Q(p∞)),
// δ∞ = Σᵢtrace(Q_i∞).  Requires σ(H22) < 1 and an ergodic chain; appends a
// warning when Σp_i∞b_i ≠ 0 (δ∞ then measures spread around a shifted
// center, not around the fixed point).
SteadyState build_markov_steady_state(const JumpLinearSystem& sys,
                                      std::vector<std::string>* warnings = nullptr);

// Exact moment trajectory plus steady state and fitted envelope.
TrajectoryAnalysis markov_trajectory_with_limits(
    const JumpLinearSystem& sys, const MomentState& m0, int k,
    std::vector<std::string>* warnings = nullptr);

// Spectral radii of the moment-dynamics blocks and the stability verdict.
StabilityReport stability_report(const JumpLinearSystem& sys,
                                 SamplingMode mode);

// First-order predictions (1+Re(λ_maxRe(Ā))α, 1+2Re(λ_maxRe(Ā))α) for
// (σ(H11), σ(H22)), with Ā = Σp_i∞A_i.  Errors on non-ergodic chains.  For
// kIID, hypothesis_supported (when non-null) reports whether the dominant
// eigenvalue of I⊗Ā+Ā⊗I is semisimple — the condition under which the
// first-order expansion is justified; the estimate is returned either way.
std::pair<double, double> perturbation_estimate(
    const JumpLinearSystem& sys, SamplingMode mode,
    bool* hypothesis_supported = nullptr);

// First-order coefficients of the eigenvalues splitting from a simple
// eigenvalue λ of A under the perturbation A⊗I_m + αB: the eigenvalues of
// (yᵀ⊗I_m)·B·(x⊗I_m), where yᵀA = λyᵀ, Ax = λx, yᵀx = 1.
ComplexVector general_eigen_perturbation(const Matrix& A, Complex lambda,
                                         const ComplexVector& y,
                                         const ComplexVector& x,
                                         const Matrix& B, Index m);

// Step size at the stability boundary: bisection on α ↦ σ(H22(α)) − 1,
// returning α* with |σ(H22(α*)) − 1| ≤ 1e-8.  sys.alpha is ignored.
double critical_alpha(const JumpLinearSystem& sys, SamplingMode mode);

// Stability and steady-state summary per step size, rows in input order.
// Unstable rows carry NaN in delta_inf instead of aborting the sweep.
std::vector<SweepRow> alpha_sweep(const JumpLinearSystem& sys,
                                  const std::vector<double>& alphas,
                                  SamplingMode mode);

}  // namespace mjls
