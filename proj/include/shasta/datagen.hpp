#pragma once

// Synthetic data from the planted heteroscedastic factor model and scripted
// scenarios (subspace jumps, variance drift, uniform missing entries).

#include "shasta/rng.hpp"
#include "shasta/types.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace shasta {

/// Exact number of samples per group; the stream is a random permutation.
struct GroupCounts {
  std::vector<std::size_t> counts;
};

/// Each sample's group drawn independently with these probabilities.
struct GroupProbabilities {
  std::vector<double> probs;
};

using GroupLaw = std::variant<GroupCounts, GroupProbabilities>;

struct PlantedModel {
  Matrix u;                // d x k orthonormal
  Vector lambda;           // squared singular values, descending
  NoiseVariances v_star;   // per-group noise variances
  GroupLaw group_law;

  Index d() const { return u.rows(); }
  Index k() const { return u.cols(); }
  int groups() const { return static_cast<int>(v_star.size()); }
  /// F* = U diag(sqrt(lambda)).
  FactorMatrix f_star() const;
};

/// Haar-distributed d x k orthonormal matrix (QR of a Gaussian matrix with the
/// triangular factor's diagonal forced positive).
Matrix draw_stiefel(Rng& rng, Index d, Index k);

PlantedModel draw_model(std::uint64_t seed, Index d, Index k, const Vector& lambda,
                        const NoiseVariances& v_star, GroupLaw law);
PlantedModel draw_model(Rng& rng, Index d, Index k, const Vector& lambda,
                        const NoiseVariances& v_star, GroupLaw law);

/// Fully observed y = F* z + e with z ~ N(0, I_k), e ~ N(0, v*_g I_d).
ObservedSample draw_sample(const PlantedModel& model, Rng& rng, int group);

/// Group label from a probability law.
int draw_group(const GroupProbabilities& law, Rng& rng);

/// Keeps each coordinate independently with probability p.
ObservedSample mask_uniform(const ObservedSample& s, double p, Rng& rng);

struct Epoch {
  std::size_t samples = 1;
  double p_observe = 1.0;
  /// Redraw U at the start of this epoch (lambda is kept).
  bool redraw_subspace = false;
  /// Multiply v*_l by variance_factors[l] at the start of this epoch; empty
  /// means unchanged.
  std::vector<double> variance_factors;
};

struct ScenarioScript {
  Index d = 0;
  Index k = 0;
  Vector lambda;
  NoiseVariances v_star;
  GroupLaw group_law = GroupProbabilities{{1.0}};
  std::vector<Epoch> epochs;

  std::size_t total_samples() const;
  int groups() const { return static_cast<int>(v_star.size()); }
  void validate() const;
};

/// Ground truth active when a sample was drawn.
struct GroundTruth {
  Matrix u;
  FactorMatrix f_star;
  NoiseVariances v_star;
};

struct StreamItem {
  ObservedSample sample;
  std::shared_ptr<const GroundTruth> truth;
  std::size_t index = 0;  // 0-based position in the stream
  std::size_t epoch = 0;
};

/// Lazily generates a script's samples. All randomness derives from `seed`
/// through independent sub-streams for the model, group labels, sample
/// values and masks, so changing the observation probability does not change
/// the underlying fully observed data.
class ScenarioStream {
 public:
  ScenarioStream(ScenarioScript script, std::uint64_t seed);

  std::optional<StreamItem> next();
  std::size_t size() const { return total_; }
  const ScenarioScript& script() const { return script_; }

 private:
  void start_epoch();

  ScenarioScript script_;
  Rng model_rng_;
  Rng label_rng_;
  Rng sample_rng_;
  Rng mask_rng_;
  PlantedModel model_;
  std::shared_ptr<const GroundTruth> truth_;
  std::vector<int> labels_;  // used with GroupCounts
  std::size_t total_ = 0;
  std::size_t index_ = 0;
  std::size_t epoch_ = 0;
  std::size_t epoch_pos_ = 0;
};

/// Materializes the whole stream.
std::vector<StreamItem> run_script(const ScenarioScript& script, std::uint64_t seed);

}  // namespace shasta
