#pragma once

// Homoscedastic streaming baselines: PETRELS (recursive least squares per
// row with a forgetting factor) and GROUSE (incremental gradient descent on
// the Grassmannian).

#include "shasta/estimator.hpp"
#include "shasta/types.hpp"

namespace shasta {

struct PetrelsState {
  FactorMatrix f;  // d x k
  Matrix r_bar;    // k x (k d); block j is R_bar_j
  Matrix s_bar;    // k x d; column j is s_bar_j
  double lambda = 1.0;

  auto r_block(Index j) { return r_bar.middleCols(j * f.cols(), f.cols()); }
  auto r_block(Index j) const { return r_bar.middleCols(j * f.cols(), f.cols()); }
};

/// R_bar_j = delta I and s_bar_j = delta f0_j, so that R_bar_j^{-1} s_bar_j = f0_j
/// and the direct solve matches the classical PETRELS rank-one recursion.
PetrelsState petrels_init(const FactorMatrix& f0, double lambda, double delta);

/// z = F_o^+ y_o (minimum-norm least squares); for j in omega
/// R_bar_j = lambda R_bar_j + z z', s_bar_j = lambda s_bar_j + y_j z and
/// f_j = R_bar_j^{-1} s_bar_j; other rows decay by lambda.
void petrels_ingest(PetrelsState& state, const ObservedSample& s);

/// Least-squares coefficient z = F_o^+ y_o.
Vector petrels_coefficients(const FactorMatrix& f, const ObservedSample& s);

struct GrouseState {
  Matrix u;  // d x k, orthonormal columns
  double eta = 0.01;
};

/// Orthonormalizes f0 to obtain the starting basis.
GrouseState grouse_init(const FactorMatrix& f0, double eta);

/// Masked GROUSE geodesic step: w = U_o^+ y_o, p = U w, r = y_o - U_o w
/// (zero off omega), sigma = |r||p|, then
/// U += ((cos(sigma eta) - 1) p/|p| + sin(sigma eta) r/|r|) w'/|w|.
/// Re-orthonormalizes when |U'U - I| exceeds 1e-8.
void grouse_ingest(GrouseState& state, const ObservedSample& s);

class PetrelsEstimator final : public StreamingEstimator {
 public:
  PetrelsEstimator(const FactorMatrix& f0, double lambda, double delta)
      : state_(petrels_init(f0, lambda, delta)) {}

  void ingest(const ObservedSample& s) override { petrels_ingest(state_, s); }
  Matrix current_subspace() const override;
  std::optional<FactorMatrix> current_factors() const override { return state_.f; }
  std::string name() const override { return "petrels"; }

  const PetrelsState& state() const { return state_; }

 private:
  PetrelsState state_;
};

class GrouseEstimator final : public StreamingEstimator {
 public:
  GrouseEstimator(const FactorMatrix& f0, double eta) : state_(grouse_init(f0, eta)) {}

  void ingest(const ObservedSample& s) override { grouse_ingest(state_, s); }
  Matrix current_subspace() const override { return state_.u; }
  std::string name() const override { return "grouse"; }

  const GrouseState& state() const { return state_; }

 private:
  GrouseState state_;
};

}  // namespace shasta
