#include "mjls/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mjls {

Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return out;
}

Vector vec(const Matrix& M) {
  return Eigen::Map<const Vector>(M.data(), M.size());
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) {
    throw InvalidInputError("unvec: vector length " + std::to_string(v.size()) +
                            " does not match " + std::to_string(rows) + "x" +
                            std::to_string(cols));
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix sym(const Matrix& M) { return 0.5 * (M + M.transpose()); }

Matrix matrix_power(const Matrix& M, long k) {
  if (M.rows() != M.cols()) {
    throw InvalidInputError("matrix_power: matrix must be square");
  }
  if (k < 0) {
    throw InvalidInputError("matrix_power: negative exponent");
  }
  Matrix result = Matrix::Identity(M.rows(), M.cols());
  Matrix base = M;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

Matrix solve(const Matrix& A, const Matrix& rhs, const char* what) {
  Eigen::FullPivLU<Matrix> lu(A);
  if (!lu.isInvertible()) {
    throw AnalysisError(std::string(what) + " is singular");
  }
  return lu.solve(rhs);
}

Vector solve(const Matrix& A, const Vector& rhs, const char* what) {
  return Vector(solve(A, Matrix(rhs), what));
}

Scalar rel_diff(const Matrix& a, const Matrix& b, Scalar atol) {
  if (a.size() == 0 && b.size() == 0) return 0.0;
  const Scalar diff = (a - b).cwiseAbs().maxCoeff();
  const Scalar scale =
      std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  if (scale <= atol) return diff;
  return diff / scale;
}

Scalar rel_diff(Scalar a, Scalar b, Scalar atol) {
  const Scalar diff = std::abs(a - b);
  const Scalar scale = std::max(std::abs(a), std::abs(b));
  if (scale <= atol) return diff;
  return diff / scale;
}

}  // namespace mjls
