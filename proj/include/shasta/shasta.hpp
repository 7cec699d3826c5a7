#pragma once

// Streaming heteroscedastic PCA via stochastic minorize-maximize.
//
// Each arriving sample first refreshes the per-group variance surrogate
// (theta_bar, rho_bar) and moves v toward its maximizer, then refreshes the
// per-row factor surrogate (R_bar_j, s_bar_j) using the new v and moves F
// toward the row-wise maximizers R_bar_j^{-1} s_bar_j. State size is
// O(d (k^2 + k) + L) regardless of how many samples have been seen.

#include "shasta/estimator.hpp"
#include "shasta/types.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace shasta {

/// Rule t -> w_t in (0, 1] for t = 1, 2, ...
class WeightSchedule {
 public:
  using Fn = std::function<double(std::uint64_t)>;

  /// w_t = 1 / t
  static WeightSchedule inverse_t();
  /// w_t = w
  static WeightSchedule constant(double w);
  /// w_t = min(1, scale / sqrt(t))
  static WeightSchedule inverse_sqrt(double scale);
  static WeightSchedule custom(Fn fn, std::string description);

  double operator()(std::uint64_t t) const { return fn_(t); }
  const std::string& description() const { return description_; }

 private:
  WeightSchedule(Fn fn, std::string description)
      : fn_(std::move(fn)), description_(std::move(description)) {}

  Fn fn_;
  std::string description_;
};

enum class VarianceMode {
  /// One variance per group with its own averaged surrogate.
  kGrouped,
  /// A single variance re-estimated from each sample alone (w = c_v = 1,
  /// L = 1). Suited to data where every sample has its own noise level.
  kMemorylessSingle,
};

struct ShastaConfig {
  Index k = 1;
  int groups = 1;
  WeightSchedule weights = WeightSchedule::inverse_t();
  double c_f = 0.1;
  double c_v = 0.1;
  double delta = 0.1;
  VarianceMode variance_mode = VarianceMode::kGrouped;

  /// Number of variances the state tracks (1 in memoryless-single mode).
  int variance_slots() const { return variance_mode == VarianceMode::kGrouped ? groups : 1; }

  void validate() const;
};

struct ShastaState {
  FactorMatrix f;      // d x k
  NoiseVariances v;    // L
  Matrix r_bar;        // k x (k d); block j is R_bar_j
  Matrix s_bar;        // k x d; column j is s_bar_j
  FactorMatrix f_hat;  // d x k; row j caches R_bar_j^{-1} s_bar_j
  Vector theta_bar;    // L
  Vector rho_bar;      // L
  std::uint64_t t = 0;

  Index d() const { return f.rows(); }
  Index k() const { return f.cols(); }
  int groups() const { return static_cast<int>(v.size()); }

  auto r_block(Index j) { return r_bar.middleCols(j * k(), k()); }
  auto r_block(Index j) const { return r_bar.middleCols(j * k(), k()); }

  friend bool operator==(const ShastaState& a, const ShastaState& b);
};

/// R_bar_j = delta I, s_bar_j = 0, theta_bar = rho_bar = 0, (F, v) = (f0, v0).
ShastaState init_state(const ShastaConfig& cfg, const FactorMatrix& f0, const NoiseVariances& v0);

/// Variance half-step with weight w and averaging factor c_v, anchored at the
/// state's current (F, v).
void v_step(ShastaState& state, const ObservedSample& s, double w, double c_v);

/// Factor half-step with weight w and averaging factor c_f, anchored at the
/// state's current F and the (already updated) v.
void f_step(ShastaState& state, const ObservedSample& s, double w, double c_f);

/// Advances t, draws w_t from the schedule and applies v_step then f_step.
void ingest(ShastaState& state, const ObservedSample& s, const ShastaConfig& cfg);

/// StreamingEstimator adapter owning a config and a state.
class ShastaEstimator final : public StreamingEstimator {
 public:
  ShastaEstimator(ShastaConfig cfg, const FactorMatrix& f0, const NoiseVariances& v0);
  ShastaEstimator(ShastaConfig cfg, ShastaState state);

  void ingest(const ObservedSample& s) override;
  Matrix current_subspace() const override;
  std::optional<FactorMatrix> current_factors() const override { return state_.f; }
  std::optional<NoiseVariances> current_variances() const override { return state_.v; }
  std::string name() const override { return "shasta"; }

  const ShastaState& state() const { return state_; }
  const ShastaConfig& config() const { return cfg_; }

 private:
  ShastaConfig cfg_;
  ShastaState state_;
};

}  // namespace shasta
