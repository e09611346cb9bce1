#pragma once

#include "mjls/errors.hpp"
#include "mjls/types.hpp"

namespace mjls {

/// Kronecker product A ⊗ B.
Matrix kron(const Matrix& A, const Matrix& B);

/// Column-major vectorization, vec(M).
Vector vec(const Matrix& M);

/// Inverse of vec for a rows×cols matrix.
Matrix unvec(const Vector& v, Index rows, Index cols);

/// Symmetric part (M + Mᵀ)/2.
Matrix sym(const Matrix& M);

/// M^k by binary exponentiation, k ≥ 0.
Matrix matrix_power(const Matrix& M, long k);

/// Solves A x = b, throwing AnalysisError when A is rank deficient.
/// `what` names the matrix in the error message.
Vector solve(const Matrix& A, const Vector& rhs, const char* what);
Matrix solve(const Matrix& A, const Matrix& rhs, const char* what);

/// Relative difference ‖a − b‖∞ / max(‖a‖∞, ‖b‖∞), with an absolute
/// reading below `atol`.
Scalar rel_diff(const Matrix& a, const Matrix& b, Scalar atol = 1e-12);
Scalar rel_diff(Scalar a, Scalar b, Scalar atol = 1e-12);

}  // namespace mjls
