#include "shasta/baselines.hpp"

#include "shasta/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace shasta {

namespace {

Matrix restrict_rows(const Matrix& a, const ObservedSample& s) {
  Matrix out(s.observed(), a.cols());
  for (Index i = 0; i < s.observed(); ++i) out.row(i) = a.row(s.omega[static_cast<std::size_t>(i)]);
  return out;
}

constexpr double kOrthoGuard = 1e-8;

}  // namespace

PetrelsState petrels_init(const FactorMatrix& f0, double lambda, double delta) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("petrels: lambda must lie in (0, 1]");
  if (!(delta > 0.0)) throw std::invalid_argument("petrels: delta must be positive");
  const Index d = f0.rows();
  const Index k = f0.cols();
  PetrelsState st;
  st.f = f0;
  st.lambda = lambda;
  st.r_bar.resize(k, k * d);
  for (Index j = 0; j < d; ++j) st.r_block(j) = delta * Matrix::Identity(k, k);
  st.s_bar = delta * f0.transpose();
  return st;
}

Vector petrels_coefficients(const FactorMatrix& f, const ObservedSample& s) {
  if (s.observed() == 0) return Vector::Zero(f.cols());
  const Matrix fo = restrict_rows(f, s);
  return fo.completeOrthogonalDecomposition().solve(s.values);
}

void petrels_ingest(PetrelsState& st, const ObservedSample& s) {
  if (s.observed() == 0) throw std::invalid_argument("petrels: sample has no observed entries");
  const Index k = st.f.cols();
  const Vector z = petrels_coefficients(st.f, s);
  const Matrix zz = z * z.transpose();

  st.r_bar *= st.lambda;
  st.s_bar *= st.lambda;
  Matrix r(k, k);
  for (std::size_t i = 0; i < s.omega.size(); ++i) {
    const Index j = s.omega[i];
    st.r_block(j) += zz;
    st.s_bar.col(j) += s.values[static_cast<Index>(i)] * z;
    r = st.r_block(j);
    st.f.row(j) = solve_spd(r, st.s_bar.col(j)).transpose();
  }
}

Matrix PetrelsEstimator::current_subspace() const { return left_singular_vectors(state_.f); }

GrouseState grouse_init(const FactorMatrix& f0, double eta) {
  if (!(eta >= 0.0)) throw std::invalid_argument("grouse: step size must be non-negative");
  return {orthonormal_basis(f0), eta};
}

void grouse_ingest(GrouseState& st, const ObservedSample& s) {
  if (s.observed() == 0) throw std::invalid_argument("grouse: sample has no observed entries");
  const Matrix uo = restrict_rows(st.u, s);
  const Vector w = uo.completeOrthogonalDecomposition().solve(s.values);
  const Vector p = st.u * w;

  Vector r = Vector::Zero(st.u.rows());
  const Vector ro = s.values - uo * w;
  for (std::size_t i = 0; i < s.omega.size(); ++i) r[s.omega[i]] = ro[static_cast<Index>(i)];

  const double r_norm = r.norm();
  const double p_norm = p.norm();
  const double w_norm = w.norm();
  if (r_norm <= 0.0 || p_norm <= 0.0 || w_norm <= 0.0 || st.eta == 0.0) return;

  const double angle = st.eta * r_norm * p_norm;
  const Vector dir = (std::cos(angle) - 1.0) / p_norm * p + std::sin(angle) / r_norm * r;
  st.u.noalias() += dir * (w / w_norm).transpose();

  if (orthonormality_defect(st.u) > kOrthoGuard) st.u = orthonormal_basis(st.u);
}

}  // namespace shasta
