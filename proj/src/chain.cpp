#include "mjls/chain.hpp"

#include "mjls/errors.hpp"
#include "mjls/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <utility>

namespace mjls {

namespace {

constexpr double kStochasticTol = 1e-12;
constexpr double kErgodicTol = 1e-8;

void validate_distribution(const Vector& p, const char* what, Index n) {
  if (p.size() != n) {
    throw InvalidInputError(std::string(what) + " has length " +
                            std::to_string(p.size()) + ", expected " +
                            std::to_string(n));
  }
  for (Index i = 0; i < n; ++i) {
    if (!(p[i] >= 0.0)) {
      throw InvalidInputError(std::string(what) + " has negative entry at " +
                              std::to_string(i));
    }
  }
  if (std::abs(p.sum() - 1.0) > kStochasticTol) {
    throw InvalidInputError(std::string(what) + " sums to " +
                            std::to_string(p.sum()) + ", expected 1");
  }
}

}  // namespace

MarkovChain::MarkovChain(Matrix transition, Vector initial)
    : P(std::move(transition)), p0(std::move(initial)) {
  if (P.rows() != P.cols() || P.rows() == 0) {
    throw InvalidInputError("MarkovChain: P must be square and nonempty");
  }
  if (p0.size() == 0) {
    p0 = Vector::Constant(P.rows(), 1.0 / static_cast<double>(P.rows()));
  }
  for (Index i = 0; i < P.rows(); ++i) {
    for (Index j = 0; j < P.cols(); ++j) {
      if (!(P(i, j) >= 0.0) || P(i, j) > 1.0) {
        throw InvalidInputError("MarkovChain: P(" + std::to_string(i) + "," +
                                std::to_string(j) + ") = " +
                                std::to_string(P(i, j)) +
                                " outside [0, 1]");
      }
    }
    if (std::abs(P.row(i).sum() - 1.0) > kStochasticTol) {
      throw InvalidInputError("MarkovChain: row " + std::to_string(i) +
                              " of P sums to " + std::to_string(P.row(i).sum()) +
                              ", expected 1");
    }
  }
  validate_distribution(p0, "MarkovChain: p0", P.rows());
}

MarkovChain::MarkovChain(Matrix transition)
    : MarkovChain(std::move(transition), Vector()) {}

Vector evolve_distribution(const MarkovChain& chain, int k) {
  if (k < 0) throw InvalidInputError("evolve_distribution: negative step count");
  Vector p = chain.p0;
  for (int t = 0; t < k; ++t) p = chain.P.transpose() * p;
  return p;
}

ChainAnalysis analyze_chain(const MarkovChain& chain) {
  const Index n = chain.num_states();
  ChainAnalysis out;

  Eigen::EigenSolver<Matrix> es(chain.P, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("analyze_chain: eigensolver did not converge");
  }
  const Vector moduli = es.eigenvalues().cwiseAbs();

  // Ergodic iff eigenvalue 1 is the unique eigenvalue of modulus one; a
  // stochastic matrix always has the Perron root 1, so count near-unit moduli.
  int on_circle = 0;
  for (Index i = 0; i < n; ++i) {
    if (moduli[i] >= 1.0 - kErgodicTol) ++on_circle;
  }
  out.ergodic = (on_circle == 1);

  // Second-largest modulus: drop the single eigenvalue closest to 1.
  Index perron = 0;
  double best = std::abs(moduli[0] - 1.0);
  for (Index i = 1; i < n; ++i) {
    const double gap = std::abs(moduli[i] - 1.0);
    if (gap < best) {
      best = gap;
      perron = i;
    }
  }
  double slem = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (i != perron) slem = std::max(slem, moduli[i]);
  }
  out.mixing_rate = std::min(slem, 1.0);

  if (!out.ergodic) return out;

  // Left eigenvector for eigenvalue 1: solve (Pᵀ - I)p = 0 with the last
  // equation replaced by the normalization Σp = 1.
  Matrix M = chain.P.transpose() - Matrix::Identity(n, n);
  M.row(n - 1) = Vector::Ones(n).transpose();
  Vector rhs = Vector::Zero(n);
  rhs[n - 1] = 1.0;
  Vector p = solve(M, rhs, "stationary-distribution system");
  for (Index i = 0; i < n; ++i) {
    if (p[i] < -1e-10) {
      throw NumericalError("analyze_chain: stationary entry " +
                           std::to_string(i) + " = " + std::to_string(p[i]) +
                           " is negative");
    }
    p[i] = std::max(p[i], 0.0);
  }
  out.p_inf = p / p.sum();
  return out;
}

ChainAnalysis stationary_distribution(const MarkovChain& chain) {
  ChainAnalysis out = analyze_chain(chain);
  if (!out.ergodic) {
    throw AnalysisError(
        "stationary_distribution: chain is not ergodic (eigenvalue 1 of P is "
        "not the unique eigenvalue of modulus one)");
  }
  return out;
}

}  // namespace mjls
