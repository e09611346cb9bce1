#pragma once

#include "mjls/types.hpp"

#include <vector>

namespace mjls {

/// Discrete-time system x^{k+1} = H x^k + G u^k. The input dimension may be
/// zero (autonomous system).
struct LTISystem {
  Matrix H;
  Matrix G;

  LTISystem(Matrix state_map, Matrix input_map);

  Index state_dim() const { return H.rows(); }
  Index input_dim() const { return G.cols(); }
};

/// Spectral radius together with the convergence rate it certifies. When the
/// dominant eigenvalues are semisimple the matrix power decays at exactly
/// sigma^k and the reported rate is sigma itself; otherwise a slack epsilon
/// is added to absorb the polynomial factor from nontrivial Jordan blocks.
struct RateReport {
  double spectral_radius = 0.0;
  double epsilon = 0.0;
  bool dominant_semisimple = true;
  double reported_rate = 0.0;
};

/// Quadratic decay certificate: V ≻ 0 with Hᵀ V H − ρ² V ≺ 0, and κ such
/// that x'ᵀ V x' ≤ ρ² xᵀ V x + κ‖u‖² along every transition x' = Hx + Gu.
struct LyapunovCertificate {
  Matrix V;
  double rho = 0.0;
  double kappa = 0.0;
};

/// States x^0..x^k under the given input sequence (needs at least k entries).
std::vector<Vector> lti_trajectory(const LTISystem& sys, const Vector& x0,
                                   const std::vector<Vector>& inputs, int k);

/// States x^0..x^k under the constant input u.
std::vector<Vector> lti_trajectory(const LTISystem& sys, const Vector& x0,
                                   const Vector& u, int k);

/// Limit (I − H)⁻¹ G u_inf for a stable system with converging input.
Vector lti_steady_state(const LTISystem& sys, const Vector& u_inf);

/// x^k = x_inf + H^k (x0 − x_inf) for constant input; requires sigma(H) < 1.
Vector lti_constant_input_closed_form(const LTISystem& sys, const Vector& x0,
                                      const Vector& u, int k);

/// Dense-eigensolver spectral radius with the semisimplicity test on the
/// dominant eigenvalue cluster.
RateReport spectral_radius(const Matrix& M);

/// Certificate for decay rate rho; requires sigma(H) < rho.
LyapunovCertificate lyapunov_certificate(const LTISystem& sys, double rho);

/// Default slack for non-semisimple dominant eigenvalues.
inline constexpr double kRateEpsilon = 1e-6;

}  // namespace mjls
