#include "mjls/td.hpp"

#include "mjls/errors.hpp"
#include "mjls/linalg.hpp"
#include "mjls/lti.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <string>
#include <utility>

namespace mjls {

PolicyEvalProblem::PolicyEvalProblem(Matrix P_s_in, Vector r_in,
                                     double gamma_in, Matrix Phi_in)
    : P_s(std::move(P_s_in)),
      r(std::move(r_in)),
      gamma(gamma_in),
      Phi(std::move(Phi_in)) {
  [[maybe_unused]] const MarkovChain stochastic_check(P_s);
  const Index n_s = P_s.rows();
  if (r.size() != n_s) {
    throw InvalidInputError("PolicyEvalProblem: r has length " +
                            std::to_string(r.size()) + ", expected " +
                            std::to_string(n_s));
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw InvalidInputError("PolicyEvalProblem: gamma = " +
                            std::to_string(gamma) + " outside [0, 1)");
  }
  if (Phi.rows() != n_s || Phi.cols() < 1) {
    throw InvalidInputError("PolicyEvalProblem: Phi is " +
                            std::to_string(Phi.rows()) + "x" +
                            std::to_string(Phi.cols()) + ", expected " +
                            std::to_string(n_s) + " rows");
  }
  Eigen::JacobiSVD<Matrix> svd(Phi);
  if (svd.singularValues().minCoeff() <= 1e-10 * Phi.norm()) {
    throw InvalidInputError(
        "PolicyEvalProblem: feature matrix is rank-deficient");
  }
}

Vector td_fixed_point(const PolicyEvalProblem& problem) {
  const ChainAnalysis mdp = stationary_distribution(MarkovChain(problem.P_s));
  const Matrix D = mdp.p_inf.asDiagonal();
  const Matrix M =
      problem.Phi.transpose() * D *
      (problem.Phi - problem.gamma * problem.P_s * problem.Phi);
  return solve(M, Vector(problem.Phi.transpose() * D * problem.r),
               "projected Bellman system");
}

TDJumpModel build_td0(const PolicyEvalProblem& problem, double alpha,
                      bool keep_unreachable,
                      const Vector& initial_state_distribution) {
  const Index n_s = problem.num_states();
  const Index d = problem.feature_dim();
  const ChainAnalysis mdp = stationary_distribution(MarkovChain(problem.P_s));
  const Vector theta_star = td_fixed_point(problem);

  Vector d0 = initial_state_distribution;
  if (d0.size() == 0) d0 = mdp.p_inf;
  if (d0.size() != n_s) {
    throw InvalidInputError("build_td0: initial state distribution has length " +
                            std::to_string(d0.size()) + ", expected " +
                            std::to_string(n_s));
  }

  // Enumerate modes z = (s', s), grouped by current state s.
  std::vector<std::pair<Index, Index>> pairs;
  for (Index s = 0; s < n_s; ++s) {
    for (Index sp = 0; sp < n_s; ++sp) {
      if (keep_unreachable || problem.P_s(s, sp) > 0.0) {
        pairs.push_back({sp, s});
      }
    }
  }
  const Index n = static_cast<Index>(pairs.size());
  std::vector<Index> mode_of(n_s * n_s, -1);
  for (Index i = 0; i < n; ++i) {
    mode_of[pairs[i].second * n_s + pairs[i].first] = i;
  }

  // Pair-chain transition (s', s) → (s'', s') and the initial pair law
  // (s⁰ ~ d0, then one MDP step).
  Matrix P = Matrix::Zero(n, n);
  Vector p0 = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const Index sp = pairs[i].first;
    const Index s = pairs[i].second;
    for (Index spp = 0; spp < n_s; ++spp) {
      if (problem.P_s(sp, spp) > 0.0 || keep_unreachable) {
        const Index j = mode_of[sp * n_s + spp];
        if (j >= 0) P(i, j) = problem.P_s(sp, spp);
      }
    }
    p0[i] = d0[s] * problem.P_s(s, sp);
  }
  const double mass = p0.sum();
  if (mass <= 0.0) {
    throw InvalidInputError("build_td0: initial pair distribution has no mass");
  }
  p0 /= mass;

  std::vector<Matrix> A;
  std::vector<Vector> b;
  A.reserve(n);
  b.reserve(n);
  for (Index i = 0; i < n; ++i) {
    const Index sp = pairs[i].first;
    const Index s = pairs[i].second;
    const Vector phi_s = problem.Phi.row(s).transpose();
    const Vector phi_sp = problem.Phi.row(sp).transpose();
    A.push_back(phi_s * (problem.gamma * phi_sp - phi_s).transpose());
    b.push_back(phi_s *
                (problem.r[s] - (phi_s - problem.gamma * phi_sp).dot(theta_star)));
  }

  TDJumpModel model{
      JumpLinearSystem(MarkovChain(std::move(P), std::move(p0)), std::move(A),
                       std::move(b), alpha),
      theta_star, std::move(pairs)};

  // The fixed-point definition of θ* makes the stationary mean offset vanish;
  // anything else indicates an internal inconsistency.
  const ChainAnalysis pair_chain = stationary_distribution(model.sys.chain);
  const Vector bbar = average_b(model.sys, pair_chain.p_inf);
  double scale = 1.0;
  for (const Vector& bi : model.sys.b) {
    scale = std::max(scale, bi.lpNorm<Eigen::Infinity>());
  }
  if (bbar.lpNorm<Eigen::Infinity>() > 1e-10 * scale) {
    throw NumericalError("build_td0: stationary mean offset is " +
                         std::to_string(bbar.lpNorm<Eigen::Infinity>()) +
                         ", expected 0");
  }
  return model;
}

JumpLinearSystem build_generic(std::vector<Matrix> A, std::vector<Vector> b,
                               MarkovChain chain, double alpha,
                               std::vector<std::string>* warnings) {
  JumpLinearSystem sys(std::move(chain), std::move(A), std::move(b), alpha);
  if (warnings == nullptr) return sys;

  const ChainAnalysis ca = analyze_chain(sys.chain);
  if (!ca.ergodic) {
    warnings->push_back(
        "chain is not ergodic; stationary centering and mean-map checks "
        "skipped");
    return sys;
  }
  const Vector bbar = average_b(sys, ca.p_inf);
  double scale = 1.0;
  for (const Vector& bi : sys.b) {
    scale = std::max(scale, bi.lpNorm<Eigen::Infinity>());
  }
  if (bbar.lpNorm<Eigen::Infinity>() > 1e-10 * scale) {
    warnings->push_back(
        "stationary mean offset is nonzero (max entry " +
        std::to_string(bbar.lpNorm<Eigen::Infinity>()) +
        "); the iterate mean will not converge to zero — consider "
        "center_offsets");
  }
  const Matrix Abar = average_A(sys, ca.p_inf);
  Eigen::EigenSolver<Matrix> es(Abar, /*computeEigenvectors=*/false);
  if (es.info() == Eigen::Success &&
      es.eigenvalues().real().maxCoeff() >= 0.0) {
    warnings->push_back(
        "mean map is not Hurwitz (eigenvalue real part " +
        std::to_string(es.eigenvalues().real().maxCoeff()) +
        " >= 0); no step size stabilizes the mean dynamics");
  }
  return sys;
}

std::pair<JumpLinearSystem, Vector> center_offsets(
    const JumpLinearSystem& sys) {
  const ChainAnalysis ca = stationary_distribution(sys.chain);
  const Matrix Abar = average_A(sys, ca.p_inf);
  const Vector bbar = average_b(sys, ca.p_inf);
  const Vector shift = solve(Abar, Vector(-bbar), "mean map");
  std::vector<Vector> b_shifted;
  b_shifted.reserve(sys.num_modes());
  for (Index i = 0; i < sys.num_modes(); ++i) {
    b_shifted.push_back(sys.A[i] * shift + sys.b[i]);
  }
  return {JumpLinearSystem(sys.chain, sys.A, std::move(b_shifted), sys.alpha),
          shift};
}

}  // namespace mjls
