#include "mjls/jump.hpp"

#include "mjls/errors.hpp"
#include "mjls/linalg.hpp"

#include <string>
#include <utility>

namespace mjls {

JumpLinearSystem::JumpLinearSystem(MarkovChain chain_in,
                                   std::vector<Matrix> A_in,
                                   std::vector<Vector> b_in, double alpha_in)
    : chain(std::move(chain_in)),
      A(std::move(A_in)),
      b(std::move(b_in)),
      alpha(alpha_in) {
  const Index n = chain.num_states();
  if (static_cast<Index>(A.size()) != n || static_cast<Index>(b.size()) != n) {
    throw InvalidInputError("JumpLinearSystem: chain has " + std::to_string(n) +
                            " modes but got " + std::to_string(A.size()) +
                            " A matrices and " + std::to_string(b.size()) +
                            " b vectors");
  }
  if (!(alpha >= 0.0)) {
    throw InvalidInputError("JumpLinearSystem: alpha = " +
                            std::to_string(alpha) + " must be nonnegative");
  }
  d = A[0].rows();
  if (d < 1) throw InvalidInputError("JumpLinearSystem: state dimension must be positive");
  for (Index i = 0; i < n; ++i) {
    if (A[i].rows() != d || A[i].cols() != d) {
      throw InvalidInputError("JumpLinearSystem: A[" + std::to_string(i) +
                              "] is " + std::to_string(A[i].rows()) + "x" +
                              std::to_string(A[i].cols()) + ", expected " +
                              std::to_string(d) + "x" + std::to_string(d));
    }
    if (b[i].size() != d) {
      throw InvalidInputError("JumpLinearSystem: b[" + std::to_string(i) +
                              "] has length " + std::to_string(b[i].size()) +
                              ", expected " + std::to_string(d));
    }
  }
}

namespace {

void check_moments(const JumpLinearSystem& sys, const MomentState& m) {
  const Index n = sys.num_modes();
  if (static_cast<Index>(m.q.size()) != n ||
      static_cast<Index>(m.Q.size()) != n || m.p.size() != n) {
    throw InvalidInputError("MomentState: mode count mismatch with system");
  }
  for (Index i = 0; i < n; ++i) {
    if (m.q[i].size() != sys.d || m.Q[i].rows() != sys.d ||
        m.Q[i].cols() != sys.d) {
      throw InvalidInputError("MomentState: dimension mismatch at mode " +
                              std::to_string(i));
    }
  }
}

}  // namespace

std::pair<Vector, Index> sample_step(const JumpLinearSystem& sys,
                                     const Vector& xi, Index z, Rng& rng) {
  if (z < 0 || z >= sys.num_modes()) {
    throw InvalidInputError("sample_step: mode index " + std::to_string(z) +
                            " outside [0, " + std::to_string(sys.num_modes()) +
                            ")");
  }
  if (xi.size() != sys.d) {
    throw InvalidInputError("sample_step: state has length " +
                            std::to_string(xi.size()) + ", expected " +
                            std::to_string(sys.d));
  }
  Vector next = sys.H(z) * xi + sys.G(z);
  const Index z_next = rng.categorical(sys.chain.P.row(z).transpose());
  return {std::move(next), z_next};
}

MomentState moment_recursion_step(const JumpLinearSystem& sys,
                                  const MomentState& m) {
  check_moments(sys, m);
  const Index n = sys.num_modes();
  const Matrix& P = sys.chain.P;
  const double a = sys.alpha;

  MomentState out;
  out.q.assign(n, Vector::Zero(sys.d));
  out.Q.assign(n, Matrix::Zero(sys.d, sys.d));
  for (Index i = 0; i < n; ++i) {
    const Matrix Hi = sys.H(i);
    const Vector Hq = Hi * m.q[i];
    const Matrix HQH = Hi * m.Q[i] * Hi.transpose();
    const Matrix cross = 2.0 * a * sym(Hq * sys.b[i].transpose());
    const Matrix drive = (a * a * m.p[i]) * (sys.b[i] * sys.b[i].transpose());
    for (Index j = 0; j < n; ++j) {
      if (P(i, j) == 0.0) continue;
      out.q[j] += P(i, j) * (Hq + (a * m.p[i]) * sys.b[i]);
      out.Q[j] += P(i, j) * (HQH + cross + drive);
    }
  }
  for (Index j = 0; j < n; ++j) out.Q[j] = sym(out.Q[j]);
  out.p = P.transpose() * m.p;
  out.k = m.k + 1;
  return out;
}

MomentState initial_moments(const JumpLinearSystem& sys, const Vector& xi0) {
  if (xi0.size() != sys.d) {
    throw InvalidInputError("initial_moments: xi0 has length " +
                            std::to_string(xi0.size()) + ", expected " +
                            std::to_string(sys.d));
  }
  const Index n = sys.num_modes();
  MomentState m;
  m.q.reserve(n);
  m.Q.reserve(n);
  const Matrix outer = xi0 * xi0.transpose();
  for (Index i = 0; i < n; ++i) {
    m.q.push_back(sys.chain.p0[i] * xi0);
    m.Q.push_back(sys.chain.p0[i] * outer);
  }
  m.p = sys.chain.p0;
  m.k = 0;
  return m;
}

AugmentedLTI::AugmentedLTI(Matrix H11, Matrix H21, Matrix H22, Matrix Pt,
                           Vector b_stack, Vector bb_stack, double alpha,
                           Index n, Index d)
    : H11_(std::move(H11)),
      H21_(std::move(H21)),
      H22_(std::move(H22)),
      Pt_(std::move(Pt)),
      b_stack_(std::move(b_stack)),
      bb_stack_(std::move(bb_stack)),
      alpha_(alpha),
      n_(n),
      d_(d) {}

Matrix AugmentedLTI::full() const {
  const Index nq = n_ * d_;
  const Index nQ = N();
  Matrix H = Matrix::Zero(nq + nQ, nq + nQ);
  H.topLeftCorner(nq, nq) = H11_;
  H.bottomLeftCorner(nQ, nq) = H21_;
  H.bottomRightCorner(nQ, nQ) = H22_;
  return H;
}

Vector AugmentedLTI::input_q(const Vector& p) const {
  if (p.size() != n_) {
    throw InvalidInputError("AugmentedLTI: distribution has length " +
                            std::to_string(p.size()) + ", expected " +
                            std::to_string(n_));
  }
  // Block j of α((Pᵀdiag(p))⊗I_d)·b_stack is α·Σᵢ p_ij·p_i·b_i.
  Vector u = Vector::Zero(n_ * d_);
  for (Index j = 0; j < n_; ++j) {
    for (Index i = 0; i < n_; ++i) {
      const double w = alpha_ * Pt_(j, i) * p[i];
      if (w != 0.0) u.segment(j * d_, d_) += w * b_stack_.segment(i * d_, d_);
    }
  }
  return u;
}

Vector AugmentedLTI::input_Q(const Vector& p) const {
  if (p.size() != n_) {
    throw InvalidInputError("AugmentedLTI: distribution has length " +
                            std::to_string(p.size()) + ", expected " +
                            std::to_string(n_));
  }
  const Index dd = d_ * d_;
  Vector u = Vector::Zero(n_ * dd);
  for (Index j = 0; j < n_; ++j) {
    for (Index i = 0; i < n_; ++i) {
      const double w = alpha_ * alpha_ * Pt_(j, i) * p[i];
      if (w != 0.0) u.segment(j * dd, dd) += w * bb_stack_.segment(i * dd, dd);
    }
  }
  return u;
}

AugmentedLTI build_augmented_lti(const JumpLinearSystem& sys, Index max_dim) {
  const Index n = sys.num_modes();
  const Index d = sys.d;
  const Index N = n * d * d;
  if (N > max_dim) {
    throw InvalidInputError("build_augmented_lti: n*d^2 = " +
                            std::to_string(N) + " exceeds the size cap " +
                            std::to_string(max_dim));
  }
  const Matrix& P = sys.chain.P;
  Matrix H11 = Matrix::Zero(n * d, n * d);
  Matrix H21 = Matrix::Zero(N, n * d);
  Matrix H22 = Matrix::Zero(N, N);
  Vector b_stack(n * d);
  Vector bb_stack(N);
  for (Index i = 0; i < n; ++i) {
    const Matrix Hi = sys.H(i);
    const Matrix HH = kron(Hi, Hi);
    const Matrix S = kron(sys.b[i], Hi) + kron(Hi, Matrix(sys.b[i]));
    b_stack.segment(i * d, d) = sys.b[i];
    bb_stack.segment(i * d * d, d * d) = kron(sys.b[i], Matrix(sys.b[i]));
    for (Index j = 0; j < n; ++j) {
      if (P(i, j) == 0.0) continue;
      H11.block(j * d, i * d, d, d) = P(i, j) * Hi;
      H21.block(j * d * d, i * d, d * d, d) = sys.alpha * P(i, j) * S;
      H22.block(j * d * d, i * d * d, d * d, d * d) = P(i, j) * HH;
    }
  }
  return AugmentedLTI(std::move(H11), std::move(H21), std::move(H22),
                      P.transpose(), std::move(b_stack), std::move(bb_stack),
                      sys.alpha, n, d);
}

std::vector<MomentState> augmented_trajectory(const AugmentedLTI& aug,
                                              const MomentState& m0,
                                              const MarkovChain& chain,
                                              int k) {
  if (k < 0) {
    throw InvalidInputError("augmented_trajectory: negative step count");
  }
  const Index n = aug.num_modes();
  const Index d = aug.dim();
  if (chain.num_states() != n) {
    throw InvalidInputError("augmented_trajectory: chain mode count mismatch");
  }
  Vector q = stack_first_moment(m0);
  Vector Q = stack_second_moment(m0);
  if (q.size() != n * d || Q.size() != aug.N()) {
    throw InvalidInputError("augmented_trajectory: moment dimensions mismatch");
  }
  Vector p = m0.p;
  std::vector<MomentState> traj;
  traj.reserve(k + 1);
  traj.push_back(m0);
  for (int t = 0; t < k; ++t) {
    const Vector q_next = aug.H11() * q + aug.input_q(p);
    const Vector Q_next = aug.H21() * q + aug.H22() * Q + aug.input_Q(p);
    q = q_next;
    Q = Q_next;
    p = chain.P.transpose() * p;
    traj.push_back(unstack_moments(q, Q, p, m0.k + t + 1, n, d));
  }
  return traj;
}

Scalar mean_square_norm(const MomentState& m) {
  Scalar total = 0.0;
  for (const Matrix& Qi : m.Q) total += Qi.trace();
  return total;
}

Matrix average_A(const JumpLinearSystem& sys, const Vector& p) {
  if (p.size() != sys.num_modes()) {
    throw InvalidInputError("average_A: distribution length mismatch");
  }
  Matrix out = Matrix::Zero(sys.d, sys.d);
  for (Index i = 0; i < sys.num_modes(); ++i) out += p[i] * sys.A[i];
  return out;
}

Vector average_b(const JumpLinearSystem& sys, const Vector& p) {
  if (p.size() != sys.num_modes()) {
    throw InvalidInputError("average_b: distribution length mismatch");
  }
  Vector out = Vector::Zero(sys.d);
  for (Index i = 0; i < sys.num_modes(); ++i) out += p[i] * sys.b[i];
  return out;
}

Vector stack_first_moment(const MomentState& m) {
  const Index n = static_cast<Index>(m.q.size());
  const Index d = n > 0 ? m.q[0].size() : 0;
  Vector out(n * d);
  for (Index i = 0; i < n; ++i) out.segment(i * d, d) = m.q[i];
  return out;
}

Vector stack_second_moment(const MomentState& m) {
  const Index n = static_cast<Index>(m.Q.size());
  const Index dd = n > 0 ? m.Q[0].size() : 0;
  Vector out(n * dd);
  for (Index i = 0; i < n; ++i) out.segment(i * dd, dd) = vec(m.Q[i]);
  return out;
}

MomentState unstack_moments(const Vector& q_stack, const Vector& Q_stack,
                            const Vector& p, int k, Index n, Index d) {
  if (q_stack.size() != n * d || Q_stack.size() != n * d * d ||
      p.size() != n) {
    throw InvalidInputError("unstack_moments: dimension mismatch");
  }
  MomentState m;
  m.q.reserve(n);
  m.Q.reserve(n);
  for (Index i = 0; i < n; ++i) {
    m.q.push_back(q_stack.segment(i * d, d));
    m.Q.push_back(sym(unvec(Q_stack.segment(i * d * d, d * d), d, d)));
  }
  m.p = p;
  m.k = k;
  return m;
}

}  // namespace mjls
