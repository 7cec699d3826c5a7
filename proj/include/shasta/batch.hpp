#pragma once

// Batch alternating minorize-maximize solver over a materialized dataset with
// missing entries, plus the closed-form homoscedastic PPCA baseline.

#include "shasta/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace shasta {

struct BatchProblem {
  std::vector<ObservedSample> data;
  int groups = 1;
  Index d = 0;
  Index k = 0;

  /// Throws std::invalid_argument on an empty dataset or invalid sample.
  void validate() const;
};

struct BatchIterate {
  FactorMatrix f;
  NoiseVariances v;
  int iteration = 0;
  double loglik = 0.0;
};

/// Closed-form v update: per group rho~ / theta at anchor (f, v_prev).
/// Groups with no observed entries keep v_prev.
NoiseVariances batch_v_step(const FactorMatrix& f, const NoiseVariances& v_prev,
                            const BatchProblem& p);

/// Closed-form F update: row j = R~_j^{-1} s~_j at anchor (f_prev, v).
/// Rows no sample observes keep f_prev's row.
FactorMatrix batch_f_step(const FactorMatrix& f_prev, const NoiseVariances& v,
                          const BatchProblem& p);

/// Per-row normal equations accumulated by batch_f_step; exposed for tests.
struct RowSystems {
  std::vector<Matrix> r;      // R~_j, k x k
  Matrix s;                   // column j = s~_j
  std::vector<bool> observed; // whether any sample observes coordinate j
};
RowSystems batch_row_systems(const FactorMatrix& f_prev, const NoiseVariances& v,
                             const BatchProblem& p);

struct BatchOptions {
  int max_iters = 100;
  /// Stop once |L_t - L_{t-1}| <= rel_tol |L_{t-1}|; unset runs max_iters.
  std::optional<double> rel_tol;
  /// Called after each emitted iterate (iteration 0 is the initialization).
  std::function<void(const BatchIterate&)> on_iterate;
};

/// Runs v-step then F-step per iteration. The returned sequence starts with
/// the initial point (iteration 0) followed by one entry per iteration.
std::vector<BatchIterate> batch_solve(const BatchProblem& p, const FactorMatrix& init_f,
                                      const NoiseVariances& init_v, const BatchOptions& opts);

/// Fixed iteration count, no early stop.
std::vector<BatchIterate> batch_solve(const BatchProblem& p, const FactorMatrix& init_f,
                                      const NoiseVariances& init_v, int iters);

struct PpcaFit {
  FactorMatrix f;
  double sigma2 = 0.0;
};

/// Maximum-likelihood PPCA for zero-mean, fully observed data (rows are
/// samples): F = U_k (Lambda_k - sigma2 I)^{1/2} from the second-moment matrix,
/// sigma2 the mean of the trailing d - k eigenvalues.
PpcaFit ppca_closed_form(const Matrix& data, Index k);

}  // namespace shasta
