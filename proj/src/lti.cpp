#include "mjls/lti.hpp"

#include "mjls/errors.hpp"
#include "mjls/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace mjls {

LTISystem::LTISystem(Matrix state_map, Matrix input_map)
    : H(std::move(state_map)), G(std::move(input_map)) {
  if (H.rows() != H.cols()) {
    throw InvalidInputError("LTISystem: H must be square, got " +
                            std::to_string(H.rows()) + "x" +
                            std::to_string(H.cols()));
  }
  if (G.size() == 0 && G.rows() == 0) {
    // Autonomous system: normalize the empty input map to m x 0.
    G.resize(H.rows(), 0);
  }
  if (G.rows() != H.rows()) {
    throw InvalidInputError("LTISystem: G has " + std::to_string(G.rows()) +
                            " rows, expected " + std::to_string(H.rows()));
  }
}

namespace {

void check_state(const LTISystem& sys, const Vector& x0) {
  if (x0.size() != sys.state_dim()) {
    throw InvalidInputError("lti: state has length " +
                            std::to_string(x0.size()) + ", expected " +
                            std::to_string(sys.state_dim()));
  }
}

void check_input(const LTISystem& sys, const Vector& u) {
  if (u.size() != sys.input_dim()) {
    throw InvalidInputError("lti: input has length " + std::to_string(u.size()) +
                            ", expected " + std::to_string(sys.input_dim()));
  }
}

void require_stable(const LTISystem& sys, const char* op) {
  const RateReport rr = spectral_radius(sys.H);
  if (rr.spectral_radius >= 1.0) {
    throw AnalysisError(std::string(op) + ": sigma(H) = " +
                        std::to_string(rr.spectral_radius) +
                        " >= 1, no steady state guaranteed");
  }
}

}  // namespace

std::vector<Vector> lti_trajectory(const LTISystem& sys, const Vector& x0,
                                   const std::vector<Vector>& inputs, int k) {
  check_state(sys, x0);
  if (k < 0) throw InvalidInputError("lti_trajectory: negative step count");
  if (static_cast<int>(inputs.size()) < k) {
    throw InvalidInputError("lti_trajectory: " + std::to_string(inputs.size()) +
                            " inputs for " + std::to_string(k) + " steps");
  }
  std::vector<Vector> traj;
  traj.reserve(k + 1);
  traj.push_back(x0);
  for (int t = 0; t < k; ++t) {
    check_input(sys, inputs[t]);
    traj.push_back(sys.H * traj.back() + sys.G * inputs[t]);
  }
  return traj;
}

std::vector<Vector> lti_trajectory(const LTISystem& sys, const Vector& x0,
                                   const Vector& u, int k) {
  if (k < 0) throw InvalidInputError("lti_trajectory: negative step count");
  return lti_trajectory(sys, x0, std::vector<Vector>(k, u), k);
}

Vector lti_steady_state(const LTISystem& sys, const Vector& u_inf) {
  check_input(sys, u_inf);
  require_stable(sys, "lti_steady_state");
  const Matrix I = Matrix::Identity(sys.state_dim(), sys.state_dim());
  return solve(I - sys.H, Vector(sys.G * u_inf), "I - H");
}

Vector lti_constant_input_closed_form(const LTISystem& sys, const Vector& x0,
                                      const Vector& u, int k) {
  check_state(sys, x0);
  check_input(sys, u);
  if (k < 0) throw InvalidInputError("closed form: negative step count");
  const Vector x_inf = lti_steady_state(sys, u);
  return x_inf + matrix_power(sys.H, k) * (x0 - x_inf);
}

RateReport spectral_radius(const Matrix& M) {
  if (M.rows() != M.cols()) {
    throw InvalidInputError("spectral_radius: matrix must be square");
  }
  RateReport rr;
  if (M.rows() == 0) {
    rr.reported_rate = 0.0;
    return rr;
  }
  Eigen::EigenSolver<Matrix> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("spectral_radius: eigensolver did not converge");
  }
  const ComplexVector eig = es.eigenvalues();
  Vector moduli = eig.cwiseAbs();
  rr.spectral_radius = moduli.maxCoeff();

  // Semisimplicity of the dominant cluster: for each distinct dominant
  // eigenvalue, the geometric multiplicity (from a rank test on M - lambda I)
  // must match the algebraic multiplicity.
  const double tol = 1e-8 * std::max(1.0, M.norm());
  std::vector<Complex> dominant;
  for (Index i = 0; i < eig.size(); ++i) {
    if (moduli[i] >= rr.spectral_radius - tol) {
      bool seen = false;
      for (const Complex& lam : dominant) {
        if (std::abs(eig[i] - lam) <= tol) {
          seen = true;
          break;
        }
      }
      if (!seen) dominant.push_back(eig[i]);
    }
  }
  rr.dominant_semisimple = true;
  const ComplexMatrix Mc = M.cast<Complex>();
  const ComplexMatrix Ic = ComplexMatrix::Identity(M.rows(), M.cols());
  for (const Complex& lam : dominant) {
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
    if (nullity != algebraic) {
      rr.dominant_semisimple = false;
      break;
    }
  }
  rr.epsilon = rr.dominant_semisimple ? 0.0 : kRateEpsilon;
  rr.reported_rate = rr.spectral_radius + rr.epsilon;
  return rr;
}

LyapunovCertificate lyapunov_certificate(const LTISystem& sys, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw InvalidInputError("lyapunov_certificate: rho must lie in (0, 1)");
  }
  const RateReport rr = spectral_radius(sys.H);
  if (rr.spectral_radius >= rho) {
    throw AnalysisError("lyapunov_certificate: sigma(H) = " +
                        std::to_string(rr.spectral_radius) + " >= rho = " +
                        std::to_string(rho) + ", no certificate exists");
  }
  const Index m = sys.state_dim();
  const Matrix A = sys.H / rho;
  // Aᵀ V A − V = −I in vectorized form.
  const Matrix lhs =
      Matrix::Identity(m * m, m * m) - kron(A.transpose(), A.transpose());
  const Vector v = solve(lhs, vec(Matrix::Identity(m, m)), "Lyapunov operator");
  LyapunovCertificate cert;
  cert.V = sym(unvec(v, m, m));
  cert.rho = rho;
  // Smallest kappa closing the Schur complement of the one-step inequality:
  // with HᵀVH − ρ²V = −ρ²I, it is λmax(GᵀVG + ρ⁻² GᵀVH HᵀVG).
  if (sys.input_dim() == 0) {
    cert.kappa = 1.0;
  } else {
    const Matrix GtV = sys.G.transpose() * cert.V;
    const Matrix S = GtV * sys.G + (GtV * sys.H) * (GtV * sys.H).transpose() /
                                       (rho * rho);
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(S));
    const double lam = es.eigenvalues().maxCoeff();
    cert.kappa = lam <= 0.0 ? 1.0 : lam * (1.0 + 1e-9);
  }
  return cert;
}

}  // namespace mjls
