#include "shasta/linalg.hpp"

#include <cmath>

namespace shasta {

namespace {

bool cholesky_ok(const Eigen::LLT<Matrix>& llt) {
  if (llt.info() != Eigen::Success) return false;
  const auto diag = llt.matrixLLT().diagonal();
  return (diag.array() > 0.0).all() && diag.allFinite();
}

}  // namespace

Vector solve_spd(const Matrix& a, const Vector& b) {
  Eigen::LLT<Matrix> llt(a);
  if (cholesky_ok(llt)) return llt.solve(b);
  return a.fullPivLu().solve(b);
}

Matrix inverse_spd(const Matrix& a) {
  const Index k = a.rows();
  Eigen::LLT<Matrix> llt(a);
  Matrix inv = cholesky_ok(llt) ? Matrix(llt.solve(Matrix::Identity(k, k)))
                                : Matrix(a.fullPivLu().inverse());
  return 0.5 * (inv + inv.transpose());
}

double logdet_spd(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (cholesky_ok(llt)) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }
  const auto lu = a.fullPivLu();
  double acc = 0.0;
  const Matrix& lu_mat = lu.matrixLU();
  for (Index i = 0; i < lu_mat.rows(); ++i) acc += std::log(std::abs(lu_mat(i, i)));
  return acc;
}

Matrix orthonormal_basis(const Matrix& a) {
  const Index d = a.rows();
  const Index k = a.cols();
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(d, k);
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < k; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Matrix left_singular_vectors(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  return svd.matrixU();
}

double orthonormality_defect(const Matrix& a) {
  const Index k = a.cols();
  return (a.transpose() * a - Matrix::Identity(k, k)).cwiseAbs().maxCoeff();
}

}  // namespace shasta
