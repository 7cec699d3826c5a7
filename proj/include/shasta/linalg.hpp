#pragma once

#include "shasta/types.hpp"

namespace shasta {

/// Solves a x = b for a symmetric positive definite `a`. Uses a Cholesky
/// factorization and falls back to full-pivoting LU when Cholesky breaks down.
Vector solve_spd(const Matrix& a, const Vector& b);

/// Inverse of a symmetric positive definite matrix, symmetrized.
Matrix inverse_spd(const Matrix& a);

/// log det of a symmetric positive definite matrix (same fallback as solve_spd).
double logdet_spd(const Matrix& a);

/// Thin orthonormal basis of span(a) from a Householder QR, with columns
/// sign-fixed so that the triangular factor has a non-negative diagonal.
Matrix orthonormal_basis(const Matrix& a);

/// The k left singular vectors of a d x k matrix, ordered by singular value.
Matrix left_singular_vectors(const Matrix& a);

/// max |a'a - I| entry.
double orthonormality_defect(const Matrix& a);

}  // namespace shasta
