#include "mjls/analysis.hpp"

#include "mjls/errors.hpp"
#include "mjls/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace mjls {

namespace {

constexpr double kMarginalTol = 1e-10;
constexpr double kCenteredTol = 1e-10;

void validate_distribution(const Vector& p, Index n) {
  if (p.size() != n) {
    throw InvalidInputError("mode distribution has length " +
                            std::to_string(p.size()) + ", expected " +
                            std::to_string(n));
  }
  for (Index i = 0; i < n; ++i) {
    if (!(p[i] >= 0.0)) {
      throw InvalidInputError("mode distribution has a negative entry");
    }
  }
  if (std::abs(p.sum() - 1.0) > 1e-12) {
    throw InvalidInputError("mode distribution sums to " +
                            std::to_string(p.sum()) + ", expected 1");
  }
}

double offset_scale(const JumpLinearSystem& sys) {
  double scale = 1.0;
  for (const Vector& bi : sys.b) {
    scale = std::max(scale, bi.lpNorm<Eigen::Infinity>());
  }
  return scale;
}

// IID moment blocks; no centering requirement (the σ's are well defined for
// any offsets, only the μ-recursion input would be missing).
IIDMomentModel iid_blocks(const JumpLinearSystem& sys, const Vector& p) {
  validate_distribution(p, sys.num_modes());
  const Index d = sys.d;
  IIDMomentModel m;
  m.d = d;
  m.alpha = sys.alpha;
  m.Abar = average_A(sys, p);
  m.sum_AA = Matrix::Zero(d * d, d * d);
  m.sum_bb = Vector::Zero(d * d);
  m.H21 = Matrix::Zero(d * d, d);
  for (Index i = 0; i < sys.num_modes(); ++i) {
    if (p[i] == 0.0) continue;
    m.sum_AA += p[i] * kron(sys.A[i], sys.A[i]);
    m.sum_bb += p[i] * kron(sys.b[i], Matrix(sys.b[i]));
    m.H21 += p[i] * (kron(sys.A[i], Matrix(sys.b[i])) +
                     kron(sys.b[i], sys.A[i]));
  }
  const Matrix I_d = Matrix::Identity(d, d);
  const Matrix I_dd = Matrix::Identity(d * d, d * d);
  m.H11 = I_d + sys.alpha * m.Abar;
  m.H21 *= sys.alpha * sys.alpha;
  m.H22 = I_dd + sys.alpha * (kron(I_d, m.Abar) + kron(m.Abar, I_d)) +
          sys.alpha * sys.alpha * m.sum_AA;
  m.input_Q = sys.alpha * sys.alpha * m.sum_bb;
  return m;
}

void require_schur_stable(const RateReport& rr, const char* op) {
  if (rr.spectral_radius >= 1.0 - kMarginalTol) {
    throw AnalysisError(std::string(op) + ": sigma(H22) = " +
                        std::to_string(rr.spectral_radius) +
                        " is not strictly inside the unit circle; no steady "
                        "state exists");
  }
}

double checked_nonnegative(double delta, const char* op) {
  if (delta < -1e-10) {
    throw NumericalError(std::string(op) + ": limiting mean-square error " +
                         std::to_string(delta) + " is negative");
  }
  return std::max(delta, 0.0);
}

// True when every eigenvalue attaining the maximal real part is semisimple.
bool max_real_part_semisimple(const Matrix& M) {
  Eigen::EigenSolver<Matrix> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigensolver did not converge");
  }
  const ComplexVector eig = es.eigenvalues();
  const double max_re = eig.real().maxCoeff();
  const double tol = 1e-8 * std::max(1.0, M.norm());
  std::vector<Complex> cluster;
  for (Index i = 0; i < eig.size(); ++i) {
    if (eig[i].real() >= max_re - tol) {
      bool seen = false;
      for (const Complex& lam : cluster) {
        if (std::abs(eig[i] - lam) <= tol) {
          seen = true;
          break;
        }
      }
      if (!seen) cluster.push_back(eig[i]);
    }
  }
  const ComplexMatrix Mc = M.cast<Complex>();
  const ComplexMatrix Ic = ComplexMatrix::Identity(M.rows(), M.cols());
  for (const Complex& lam : cluster) {
    int algebraic = 0;
    for (Index i = 0; i < eig.size(); ++i) {
      if (std::abs(eig[i] - lam) <= tol) ++algebraic;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(Mc - lam * Ic);
    const Vector sv = svd.singularValues();
    int nullity = 0;
    for (Index i = 0; i < sv.size(); ++i) {
      if (sv[i] <= tol) ++nullity;
    }
    if (nullity != algebraic) return false;
  }
  return true;
}

double sigma_H22_at(const JumpLinearSystem& sys, SamplingMode mode,
                    const Vector& p_inf, double alpha) {
  const JumpLinearSystem trial(sys.chain, sys.A, sys.b, alpha);
  if (mode == SamplingMode::kIID) {
    return spectral_radius(iid_blocks(trial, p_inf).H22).spectral_radius;
  }
  return spectral_radius(build_augmented_lti(trial).H22()).spectral_radius;
}

}  // namespace

Matrix IIDMomentModel::full() const {
  const Index dd = d * d;
  Matrix H = Matrix::Zero(d + dd, d + dd);
  H.topLeftCorner(d, d) = H11;
  H.bottomLeftCorner(dd, d) = H21;
  H.bottomRightCorner(dd, dd) = H22;
  return H;
}

Matrix SteadyState::total_Q() const {
  Matrix total = Matrix::Zero(d, d);
  for (Index i = 0; i < n; ++i) {
    total += unvec(Q_inf.segment(i * d * d, d * d), d, d);
  }
  return total;
}

Complex max_real_eigenvalue(const Matrix& M) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw InvalidInputError("max_real_eigenvalue: matrix must be square and "
                            "nonempty");
  }
  Eigen::EigenSolver<Matrix> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("max_real_eigenvalue: eigensolver did not converge");
  }
  // Ties on the real part go to the larger modulus, then to the conjugate
  // with nonnegative imaginary part.
  const ComplexVector eig = es.eigenvalues();
  Complex best = eig[0];
  for (Index i = 1; i < eig.size(); ++i) {
    const Complex& c = eig[i];
    if (c.real() > best.real() ||
        (c.real() == best.real() && std::abs(c) > std::abs(best)) ||
        (c.real() == best.real() && std::abs(c) == std::abs(best) &&
         c.imag() > best.imag())) {
      best = c;
    }
  }
  return best;
}

IIDMomentModel build_iid_model(const JumpLinearSystem& sys, const Vector& p) {
  IIDMomentModel m = iid_blocks(sys, p);
  Vector bbar = Vector::Zero(sys.d);
  for (Index i = 0; i < sys.num_modes(); ++i) bbar += p[i] * sys.b[i];
  if (bbar.lpNorm<Eigen::Infinity>() > kCenteredTol * offset_scale(sys)) {
    throw InvalidInputError(
        "build_iid_model: mean offset Σp_i·b_i is nonzero (max entry " +
        std::to_string(bbar.lpNorm<Eigen::Infinity>()) +
        "); apply center_offsets first");
  }
  return m;
}

std::pair<Vector, Matrix> iid_closed_form(const IIDMomentModel& model,
                                          const Vector& mu0, const Matrix& Q0,
                                          int k) {
  const Index d = model.d;
  if (mu0.size() != d || Q0.rows() != d || Q0.cols() != d) {
    throw InvalidInputError("iid_closed_form: moment dimensions mismatch");
  }
  if (k < 0) throw InvalidInputError("iid_closed_form: negative step count");
  const SteadyState ss = iid_steady_state(model);

  Vector x0(d + d * d);
  x0.head(d) = mu0;
  x0.tail(d * d) = vec(Q0) - ss.Q_inf;
  Vector xk = matrix_power(model.full(), k) * x0;
  xk.tail(d * d) += ss.Q_inf;

  const Vector mu_k = matrix_power(model.H11, k) * mu0;
  return {mu_k, sym(unvec(xk.tail(d * d), d, d))};
}

SteadyState iid_steady_state(const IIDMomentModel& model) {
  const Index d = model.d;
  const RateReport rr = spectral_radius(model.H22);
  require_schur_stable(rr, "iid_steady_state");

  const Matrix I_d = Matrix::Identity(d, d);
  const Matrix lyap =
      kron(I_d, model.Abar) + kron(model.Abar, I_d) + model.alpha * model.sum_AA;
  const Vector vecQ =
      -model.alpha * solve(lyap, model.sum_bb, "steady-state operator");
  const Vector vecQ_fp =
      solve(Matrix(Matrix::Identity(d * d, d * d) - model.H22), model.input_Q,
            "I - H22");
  if (rel_diff(vecQ, vecQ_fp) > 1e-10) {
    throw NumericalError(
        "iid_steady_state: closed-form and fixed-point limits disagree by " +
        std::to_string(rel_diff(vecQ, vecQ_fp)));
  }

  SteadyState ss;
  ss.n = 1;
  ss.d = d;
  ss.q_inf = Vector::Zero(d);
  ss.Q_inf = vecQ;
  ss.delta_inf =
      checked_nonnegative(unvec(vecQ, d, d).trace(), "iid_steady_state");
  return ss;
}

SteadyState build_markov_steady_state(const JumpLinearSystem& sys,
                                      std::vector<std::string>* warnings) {
  const ChainAnalysis ca = stationary_distribution(sys.chain);
  const AugmentedLTI aug = build_augmented_lti(sys);
  const RateReport rr = spectral_radius(aug.H22());
  require_schur_stable(rr, "build_markov_steady_state");

  const Vector bbar = average_b(sys, ca.p_inf);
  if (warnings != nullptr &&
      bbar.lpNorm<Eigen::Infinity>() > kCenteredTol * offset_scale(sys)) {
    warnings->push_back(
        "stationary mean offset is nonzero (max entry " +
        std::to_string(bbar.lpNorm<Eigen::Infinity>()) +
        "); the limiting mean-square value measures spread around a shifted "
        "center — consider center_offsets");
  }

  const Index nd = sys.num_modes() * sys.d;
  const Index N = aug.N();
  const Vector q_inf =
      solve(Matrix(Matrix::Identity(nd, nd) - aug.H11()), aug.input_q(ca.p_inf),
            "I - H11");
  const Vector Q_inf =
      solve(Matrix(Matrix::Identity(N, N) - aug.H22()),
            Vector(aug.H21() * q_inf + aug.input_Q(ca.p_inf)), "I - H22");

  SteadyState ss;
  ss.n = sys.num_modes();
  ss.d = sys.d;
  ss.q_inf = q_inf;
  ss.Q_inf = Q_inf;
  ss.delta_inf =
      checked_nonnegative(ss.total_Q().trace(), "build_markov_steady_state");
  return ss;
}

TrajectoryAnalysis markov_trajectory_with_limits(
    const JumpLinearSystem& sys, const MomentState& m0, int k,
    std::vector<std::string>* warnings) {
  if (k < 0) {
    throw InvalidInputError(
        "markov_trajectory_with_limits: negative step count");
  }
  const ChainAnalysis ca = stationary_distribution(sys.chain);
  const AugmentedLTI aug = build_augmented_lti(sys);

  TrajectoryAnalysis out;
  out.steady = build_markov_steady_state(sys, warnings);
  out.trajectory = augmented_trajectory(aug, m0, sys.chain, k);

  const RateReport rr_H = spectral_radius(aug.full());
  out.bounds.delta_inf = out.steady.delta_inf;
  out.bounds.rate = std::max(rr_H.reported_rate, ca.mixing_rate);
  out.bounds.rate_ties_mixing =
      std::abs(rr_H.reported_rate - ca.mixing_rate) <=
      1e-9 * std::max(1.0, out.bounds.rate);

  // Fit C0 = sup |MSEᵏ−δ∞| / rateᵏ; deviations below the absolute floor are
  // treated as zero so a stationary start fits C0 = 0.
  const double atol = 1e-12 * std::max(1.0, std::abs(out.bounds.delta_inf));
  double C0 = 0.0;
  double rate_pow = 1.0;
  for (const MomentState& m : out.trajectory) {
    const double diff =
        std::abs(mean_square_norm(m) - out.bounds.delta_inf);
    if (diff > atol && rate_pow > 1e-300) {
      C0 = std::max(C0, diff / rate_pow);
    }
    rate_pow *= out.bounds.rate;
  }
  out.bounds.C0 = C0;
  out.bounds.envelope.reserve(out.trajectory.size());
  rate_pow = 1.0;
  for (std::size_t t = 0; t < out.trajectory.size(); ++t) {
    out.bounds.envelope.push_back({out.bounds.delta_inf - C0 * rate_pow,
                                   out.bounds.delta_inf + C0 * rate_pow});
    rate_pow *= out.bounds.rate;
  }
  return out;
}

StabilityReport stability_report(const JumpLinearSystem& sys,
                                 SamplingMode mode) {
  StabilityReport rep;
  if (mode == SamplingMode::kIID) {
    const ChainAnalysis ca = stationary_distribution(sys.chain);
    const IIDMomentModel m = iid_blocks(sys, ca.p_inf);
    rep.sigma_H11 = spectral_radius(m.H11);
    rep.sigma_H22 = spectral_radius(m.H22);
    rep.sigma_H = spectral_radius(m.full());
  } else {
    const AugmentedLTI aug = build_augmented_lti(sys);
    rep.sigma_H11 = spectral_radius(aug.H11());
    rep.sigma_H22 = spectral_radius(aug.H22());
    rep.sigma_H = spectral_radius(aug.full());
  }
  rep.marginal =
      std::abs(rep.sigma_H22.spectral_radius - 1.0) <= kMarginalTol;
  rep.stable = rep.sigma_H22.spectral_radius < 1.0 && !rep.marginal;

  const ChainAnalysis ca = analyze_chain(sys.chain);
  if (ca.ergodic) {
    const Complex lam = max_real_eigenvalue(average_A(sys, ca.p_inf));
    rep.lambda_maxRe_Abar = lam;
    rep.perturbation_sigma_H = 1.0 + lam.real() * sys.alpha;
    rep.perturbation_sigma_H22 = 1.0 + 2.0 * lam.real() * sys.alpha;
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.lambda_maxRe_Abar = Complex(nan, nan);
    rep.perturbation_sigma_H = nan;
    rep.perturbation_sigma_H22 = nan;
  }
  return rep;
}

std::pair<double, double> perturbation_estimate(const JumpLinearSystem& sys,
                                                SamplingMode mode,
                                                bool* hypothesis_supported) {
  const ChainAnalysis ca = stationary_distribution(sys.chain);
  const Matrix Abar = average_A(sys, ca.p_inf);
  const Complex lam = max_real_eigenvalue(Abar);
  if (hypothesis_supported != nullptr) {
    if (mode == SamplingMode::kIID) {
      const Matrix I_d = Matrix::Identity(sys.d, sys.d);
      *hypothesis_supported =
          max_real_part_semisimple(kron(I_d, Abar) + kron(Abar, I_d));
    } else {
      // Ergodicity makes the dominant eigenvalue of Pᵀ⊗I semisimple.
      *hypothesis_supported = true;
    }
  }
  return {1.0 + lam.real() * sys.alpha, 1.0 + 2.0 * lam.real() * sys.alpha};
}

ComplexVector general_eigen_perturbation(const Matrix& A, Complex lambda,
                                         const ComplexVector& y,
                                         const ComplexVector& x,
                                         const Matrix& B, Index m) {
  const Index N = A.rows();
  if (A.rows() != A.cols() || N == 0) {
    throw InvalidInputError("general_eigen_perturbation: A must be square");
  }
  if (m < 1 || B.rows() != N * m || B.cols() != N * m) {
    throw InvalidInputError(
        "general_eigen_perturbation: B must have the dimensions of A⊗I_m");
  }
  if (y.size() != N || x.size() != N) {
    throw InvalidInputError(
        "general_eigen_perturbation: eigenvector length mismatch");
  }
  const double tol = 1e-8 * std::max(1.0, A.norm() + std::abs(lambda));
  const Complex yx = y.cwiseProduct(x).sum();  // plain yᵀx, no conjugation
  if (std::abs(yx - Complex(1.0, 0.0)) > 1e-8) {
    throw InvalidInputError(
        "general_eigen_perturbation: yᵀx must be normalized to 1");
  }
  const ComplexMatrix Ac = A.cast<Complex>();
  if ((Ac * x - lambda * x).norm() > tol * x.norm() ||
      (y.transpose() * Ac - lambda * y.transpose()).norm() > tol * y.norm()) {
    throw InvalidInputError(
        "general_eigen_perturbation: (lambda, x, y) is not an eigentriple of "
        "A within tolerance");
  }
  Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericalError(
        "general_eigen_perturbation: eigensolver did not converge");
  }
  int matches = 0;
  for (Index i = 0; i < N; ++i) {
    if (std::abs(es.eigenvalues()[i] - lambda) <= tol) ++matches;
  }
  if (matches != 1) {
    throw AnalysisError("general_eigen_perturbation: lambda is not a simple "
                        "eigenvalue of A (multiplicity " +
                        std::to_string(matches) + ")");
  }

  // (yᵀ⊗I_m)·B·(x⊗I_m) = Σ_{i,j} y_i·x_j·B_block(i,j).
  ComplexMatrix C = ComplexMatrix::Zero(m, m);
  for (Index i = 0; i < N; ++i) {
    for (Index j = 0; j < N; ++j) {
      C += y[i] * x[j] * B.block(i * m, j * m, m, m).cast<Complex>();
    }
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> ces(C, false);
  if (ces.info() != Eigen::Success) {
    throw NumericalError(
        "general_eigen_perturbation: eigensolver did not converge");
  }
  return ces.eigenvalues();
}

double critical_alpha(const JumpLinearSystem& sys, SamplingMode mode) {
  const ChainAnalysis ca = stationary_distribution(sys.chain);
  const auto f = [&](double alpha) {
    return sigma_H22_at(sys, mode, ca.p_inf, alpha) - 1.0;
  };

  double lo = 1e-4;
  while (lo >= 1e-12 && f(lo) >= 0.0) lo *= 0.5;
  if (f(lo) >= 0.0) {
    throw AnalysisError(
        "critical_alpha: no stable step size found down to 1e-12; the mean "
        "map may not be Hurwitz — widen the bracket");
  }
  double hi = lo;
  while (hi <= 1e8 && f(hi) <= 0.0) hi *= 2.0;
  if (f(hi) <= 0.0) {
    throw AnalysisError(
        "critical_alpha: sigma(H22) stays below 1 for step sizes up to 1e8 — "
        "widen the bracket");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) <= 1e-8) return mid;
    if (fm < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw NumericalError(
      "critical_alpha: bisection failed to reach |sigma - 1| <= 1e-8");
}

std::vector<SweepRow> alpha_sweep(const JumpLinearSystem& sys,
                                  const std::vector<double>& alphas,
                                  SamplingMode mode) {
  const ChainAnalysis ca = stationary_distribution(sys.chain);
  const Complex lam = max_real_eigenvalue(average_A(sys, ca.p_inf));
  std::vector<SweepRow> rows;
  rows.reserve(alphas.size());
  for (double alpha : alphas) {
    const JumpLinearSystem trial(sys.chain, sys.A, sys.b, alpha);
    SweepRow row;
    row.alpha = alpha;
    row.sigma_pred_H22 = 1.0 + 2.0 * lam.real() * alpha;
    if (mode == SamplingMode::kIID) {
      const IIDMomentModel m = iid_blocks(trial, ca.p_inf);
      row.sigma_H11 = spectral_radius(m.H11).spectral_radius;
      row.sigma_H22 = spectral_radius(m.H22).spectral_radius;
    } else {
      const AugmentedLTI aug = build_augmented_lti(trial);
      row.sigma_H11 = spectral_radius(aug.H11()).spectral_radius;
      row.sigma_H22 = spectral_radius(aug.H22()).spectral_radius;
    }
    row.stable = row.sigma_H22 < 1.0 - kMarginalTol;
    if (!row.stable) {
      row.delta_inf = std::numeric_limits<double>::quiet_NaN();
    } else if (mode == SamplingMode::kIID) {
      row.delta_inf =
          iid_steady_state(build_iid_model(trial, ca.p_inf)).delta_inf;
    } else {
      row.delta_inf = build_markov_steady_state(trial).delta_inf;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mjls
