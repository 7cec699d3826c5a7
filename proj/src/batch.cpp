#include "shasta/batch.hpp"

#include "shasta/linalg.hpp"
#include "shasta/model.hpp"

#include <cmath>
#include <stdexcept>

namespace shasta {

void BatchProblem::validate() const {
  if (data.empty()) throw std::invalid_argument("batch problem has no samples");
  if (d < 1 || k < 1 || k > d) throw std::invalid_argument("batch problem needs 1 <= k <= d");
  if (groups < 1) throw std::invalid_argument("batch problem needs at least one group");
  for (const auto& s : data) s.validate(d, groups);
}

namespace {

// v-step accumulators and the log-likelihood at the same anchor share one
// E-step pass.
struct AnchorPass {
  Vector theta;
  Vector rho;
  double loglik = 0.0;
};

AnchorPass anchor_pass(const FactorMatrix& f, const NoiseVariances& v, const BatchProblem& p) {
  AnchorPass out{Vector::Zero(p.groups), Vector::Zero(p.groups), 0.0};
  double ll = 0.0;
  for (const auto& s : p.data) {
    const auto es = e_step(f, v[s.group], s);
    out.theta[s.group] += static_cast<double>(s.observed());
    out.rho[s.group] += es.rho();
    ll += es.log_likelihood();
  }
  out.loglik = 0.5 * ll;
  return out;
}

NoiseVariances variances_from(const AnchorPass& pass, const NoiseVariances& v_prev) {
  NoiseVariances v = v_prev;
  for (Index l = 0; l < v.size(); ++l) {
    if (pass.theta[l] > 0.0) v[l] = pass.rho[l] / pass.theta[l];
  }
  apply_variance_floor(v);
  return v;
}

FactorMatrix solve_rows(const RowSystems& sys, const FactorMatrix& f_prev) {
  FactorMatrix f = f_prev;
  const Index k = f.cols();
  for (Index j = 0; j < f.rows(); ++j) {
    if (!sys.observed[static_cast<std::size_t>(j)]) continue;
    Matrix r = sys.r[static_cast<std::size_t>(j)];
    const double ridge = 1e-10 * r.trace() / static_cast<double>(k);
    r.diagonal().array() += ridge;
    f.row(j) = solve_spd(r, sys.s.col(j)).transpose();
  }
  return f;
}

}  // namespace

NoiseVariances batch_v_step(const FactorMatrix& f, const NoiseVariances& v_prev,
                            const BatchProblem& p) {
  return variances_from(anchor_pass(f, v_prev, p), v_prev);
}

RowSystems batch_row_systems(const FactorMatrix& f_prev, const NoiseVariances& v,
                             const BatchProblem& p) {
  const Index d = f_prev.rows();
  const Index k = f_prev.cols();
  RowSystems sys;
  sys.r.assign(static_cast<std::size_t>(d), Matrix::Zero(k, k));
  sys.s = Matrix::Zero(k, d);
  sys.observed.assign(static_cast<std::size_t>(d), false);

  Matrix contrib(k, k);
  for (const auto& s : p.data) {
    const auto es = e_step(f_prev, v[s.group], s);
    const double inv_v = 1.0 / es.variance;
    // (1/v)(zbar zbar' + v M)
    contrib.noalias() = inv_v * es.zbar * es.zbar.transpose();
    contrib += es.m;
    for (std::size_t i = 0; i < s.omega.size(); ++i) {
      const Index j = s.omega[i];
      sys.r[static_cast<std::size_t>(j)] += contrib;
      sys.s.col(j) += (inv_v * s.values[static_cast<Index>(i)]) * es.zbar;
      sys.observed[static_cast<std::size_t>(j)] = true;
    }
  }
  return sys;
}

FactorMatrix batch_f_step(const FactorMatrix& f_prev, const NoiseVariances& v,
                          const BatchProblem& p) {
  return solve_rows(batch_row_systems(f_prev, v, p), f_prev);
}

std::vector<BatchIterate> batch_solve(const BatchProblem& p, const FactorMatrix& init_f,
                                      const NoiseVariances& init_v, const BatchOptions& opts) {
  if (opts.max_iters < 1) throw std::invalid_argument("batch_solve needs at least one iteration");
  p.validate();
  if (init_f.rows() != p.d || init_f.cols() != p.k || init_v.size() != p.groups) {
    throw std::invalid_argument("batch_solve initialization has the wrong shape");
  }

  std::vector<BatchIterate> out;
  FactorMatrix f = init_f;
  NoiseVariances v = init_v;
  apply_variance_floor(v);

  // Each pass evaluates L(F_t, v_t) and the v-step statistics for iteration t+1.
  AnchorPass pass = anchor_pass(f, v, p);
  out.push_back({f, v, 0, pass.loglik});
  if (opts.on_iterate) opts.on_iterate(out.back());

  for (int it = 1; it <= opts.max_iters; ++it) {
    v = variances_from(pass, v);
    f = batch_f_step(f, v, p);
    const double prev = pass.loglik;
    pass = anchor_pass(f, v, p);
    out.push_back({f, v, it, pass.loglik});
    if (opts.on_iterate) opts.on_iterate(out.back());
    if (opts.rel_tol && std::abs(pass.loglik - prev) <= *opts.rel_tol * std::abs(prev)) break;
  }
  return out;
}

std::vector<BatchIterate> batch_solve(const BatchProblem& p, const FactorMatrix& init_f,
                                      const NoiseVariances& init_v, int iters) {
  BatchOptions opts;
  opts.max_iters = iters;
  return batch_solve(p, init_f, init_v, opts);
}

PpcaFit ppca_closed_form(const Matrix& data, Index k) {
  const Index n = data.rows();
  const Index d = data.cols();
  if (k < 1 || k >= d) throw std::invalid_argument("ppca_closed_form needs 1 <= k < d");
  if (n <= k) throw std::invalid_argument("ppca_closed_form needs more samples than k");
  if (!data.allFinite()) throw std::invalid_argument("ppca_closed_form needs complete data");

  const Matrix second_moment = (data.transpose() * data) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(second_moment);
  // Eigenvalues ascend; the leading k sit at the end.
  const Vector& evals = eig.eigenvalues();
  const double sigma2 = evals.head(d - k).mean();

  PpcaFit fit;
  fit.sigma2 = sigma2;
  fit.f = Matrix(d, k);
  for (Index c = 0; c < k; ++c) {
    const Index idx = d - 1 - c;
    const double scale = std::sqrt(std::max(evals[idx] - sigma2, 0.0));
    Vector u = eig.eigenvectors().col(idx);
    Index pivot;
    u.cwiseAbs().maxCoeff(&pivot);
    if (u[pivot] < 0.0) u = -u;
    fit.f.col(c) = scale * u;
  }
  return fit;
}

}  // namespace shasta
