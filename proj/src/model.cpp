#include "shasta/model.hpp"

#include "shasta/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace shasta {

double SampleEStep::rho() const {
  // tr(G M) for symmetric M.
  return residual_sq + variance * gram.cwiseProduct(m).sum();
}

double SampleEStep::log_likelihood() const {
  // det(F F' + v I_n) = v^(n-k) det(F'F + v I_k)
  const auto n = static_cast<double>(observed);
  const auto k = static_cast<double>(gram.rows());
  const double logdet_sigma = (n - k) * std::log(variance) + logdet_a;
  return -logdet_sigma - y_dot_residual / variance;
}

SampleEStep e_step(const FactorMatrix& f, double v_g, const ObservedSample& s) {
  const Index k = f.cols();
  const Index n = s.observed();
  SampleEStep out;
  out.variance = floored(v_g);
  out.observed = n;

  Matrix fo(n, k);
  for (Index i = 0; i < n; ++i) fo.row(i) = f.row(s.omega[static_cast<std::size_t>(i)]);

  out.gram = Matrix::Zero(k, k);
  out.gram.selfadjointView<Eigen::Lower>().rankUpdate(fo.transpose());
  out.gram.triangularView<Eigen::StrictlyUpper>() = out.gram.transpose();

  Matrix a = out.gram;
  a.diagonal().array() += out.variance;
  const Vector fty = fo.transpose() * s.values;

  Eigen::LLT<Matrix> llt(a);
  const auto diag = llt.matrixLLT().diagonal();
  if (llt.info() == Eigen::Success && (diag.array() > 0.0).all() && diag.allFinite()) {
    out.m = llt.solve(Matrix::Identity(k, k));
    out.logdet_a = 2.0 * diag.array().log().sum();
  } else {
    out.m = a.fullPivLu().inverse();
    out.logdet_a = logdet_spd(a);
  }
  out.m = 0.5 * (out.m + out.m.transpose()).eval();
  out.zbar = out.m * fty;

  const Vector residual = s.values - fo * out.zbar;
  out.residual_sq = residual.squaredNorm();
  out.y_dot_residual = s.values.dot(residual);
  return out;
}

namespace {

double group_variance(const NoiseVariances& v, const ObservedSample& s) {
  if (s.group < 0 || s.group >= v.size()) {
    throw std::invalid_argument("sample group outside variance vector");
  }
  if (!(v[s.group] > 0.0)) throw std::invalid_argument("noise variance must be positive");
  return v[s.group];
}

}  // namespace

PosteriorStats posterior_stats(const FactorMatrix& f, const NoiseVariances& v,
                               const ObservedSample& s) {
  auto es = e_step(f, group_variance(v, s), s);
  return {std::move(es.m), std::move(es.zbar)};
}

double sample_log_likelihood(const FactorMatrix& f, const NoiseVariances& v,
                             const ObservedSample& s) {
  return e_step(f, group_variance(v, s), s).log_likelihood();
}

double dataset_log_likelihood(const FactorMatrix& f, const NoiseVariances& v,
                              std::span<const ObservedSample> data) {
  double acc = 0.0;
  for (const auto& s : data) acc += sample_log_likelihood(f, v, s);
  return 0.5 * acc;
}

double minorizer_value(const FactorMatrix& f, const NoiseVariances& v,
                       const FactorMatrix& anchor_f, const NoiseVariances& anchor_v,
                       const ObservedSample& s) {
  const double vg = floored(group_variance(v, s));
  const double anchor_vg = group_variance(anchor_v, s);
  const auto anchor = e_step(anchor_f, anchor_vg, s);

  const Index k = f.cols();
  const Index n = s.observed();
  Matrix fo(n, k);
  for (Index i = 0; i < n; ++i) fo.row(i) = f.row(s.omega[static_cast<std::size_t>(i)]);

  const Vector fz = fo * anchor.zbar;
  const Matrix gram = fo.transpose() * fo;
  const double quad = fz.squaredNorm() + anchor.variance * gram.cwiseProduct(anchor.m).sum();
  return -0.5 * static_cast<double>(n) * std::log(vg) - s.values.squaredNorm() / (2.0 * vg) +
         s.values.dot(fz) / vg - quad / (2.0 * vg);
}

}  // namespace shasta
