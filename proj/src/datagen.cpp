#include "shasta/datagen.hpp"

#include "shasta/linalg.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace shasta {

namespace {

enum Stream : std::uint64_t { kModel = 1, kLabels = 2, kSamples = 3, kMask = 4 };

void check_law(const GroupLaw& law, int groups) {
  if (const auto* c = std::get_if<GroupCounts>(&law)) {
    if (static_cast<int>(c->counts.size()) != groups) {
      throw std::invalid_argument("group counts must have one entry per group");
    }
  } else {
    const auto& p = std::get<GroupProbabilities>(law).probs;
    if (static_cast<int>(p.size()) != groups) {
      throw std::invalid_argument("group probabilities must have one entry per group");
    }
    double sum = 0.0;
    for (double x : p) {
      if (!(x >= 0.0)) throw std::invalid_argument("group probabilities must be non-negative");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("group probabilities must sum to 1");
  }
}

}  // namespace

FactorMatrix PlantedModel::f_star() const { return u * lambda.cwiseSqrt().asDiagonal(); }

Matrix draw_stiefel(Rng& rng, Index d, Index k) {
  Matrix g(d, k);
  for (Index c = 0; c < k; ++c) {
    for (Index r = 0; r < d; ++r) g(r, c) = rng.normal();
  }
  return orthonormal_basis(g);
}

PlantedModel draw_model(Rng& rng, Index d, Index k, const Vector& lambda,
                        const NoiseVariances& v_star, GroupLaw law) {
  if (k < 1 || k > d) throw std::invalid_argument("draw_model needs 1 <= k <= d");
  if (lambda.size() != k) throw std::invalid_argument("draw_model needs k squared singular values");
  for (Index i = 0; i < k; ++i) {
    if (!(lambda[i] > 0.0)) throw std::invalid_argument("squared singular values must be positive");
    if (i > 0 && lambda[i] > lambda[i - 1]) {
      throw std::invalid_argument("squared singular values must be sorted descending");
    }
  }
  if (v_star.size() < 1 || !(v_star.array() > 0.0).all()) {
    throw std::invalid_argument("planted noise variances must be positive");
  }
  check_law(law, static_cast<int>(v_star.size()));
  return {draw_stiefel(rng, d, k), lambda, v_star, std::move(law)};
}

PlantedModel draw_model(std::uint64_t seed, Index d, Index k, const Vector& lambda,
                        const NoiseVariances& v_star, GroupLaw law) {
  Rng rng = Rng(seed).split(kModel);
  return draw_model(rng, d, k, lambda, v_star, std::move(law));
}

ObservedSample draw_sample(const PlantedModel& model, Rng& rng, int group) {
  const Index d = model.d();
  const Index k = model.k();
  Vector z(k);
  for (Index i = 0; i < k; ++i) z[i] = rng.normal();
  const double sd = std::sqrt(model.v_star[group]);
  Vector y = model.u * (model.lambda.cwiseSqrt().asDiagonal() * z);
  for (Index j = 0; j < d; ++j) y[j] += sd * rng.normal();
  return ObservedSample::full(y, group);
}

int draw_group(const GroupProbabilities& law, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t g = 0; g < law.probs.size(); ++g) {
    acc += law.probs[g];
    if (u < acc) return static_cast<int>(g);
  }
  // Rounding can leave u just above the cumulative sum.
  for (std::size_t g = law.probs.size(); g-- > 0;) {
    if (law.probs[g] > 0.0) return static_cast<int>(g);
  }
  return 0;
}

ObservedSample mask_uniform(const ObservedSample& s, double p, Rng& rng) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("observation probability must lie in (0, 1]");
  if (p == 1.0) return s;
  ObservedSample out;
  out.group = s.group;
  std::vector<double> kept;
  kept.reserve(s.omega.size());
  out.omega.reserve(s.omega.size());
  for (std::size_t i = 0; i < s.omega.size(); ++i) {
    if (rng.uniform() < p) {
      out.omega.push_back(s.omega[i]);
      kept.push_back(s.values[static_cast<Index>(i)]);
    }
  }
  out.values = Eigen::Map<const Vector>(kept.data(), static_cast<Index>(kept.size()));
  return out;
}

std::size_t ScenarioScript::total_samples() const {
  std::size_t n = 0;
  for (const auto& e : epochs) n += e.samples;
  return n;
}

void ScenarioScript::validate() const {
  if (d < 1 || k < 1 || k > d) throw std::invalid_argument("scenario needs 1 <= k <= d");
  if (lambda.size() != k) throw std::invalid_argument("scenario lambda must have k entries");
  if (v_star.size() < 1) throw std::invalid_argument("scenario needs at least one group");
  check_law(group_law, groups());
  if (epochs.empty()) throw std::invalid_argument("scenario needs at least one epoch");
  for (const auto& e : epochs) {
    if (e.samples < 1) throw std::invalid_argument("epoch sample count must be >= 1");
    if (!(e.p_observe > 0.0 && e.p_observe <= 1.0)) {
      throw std::invalid_argument("epoch observation probability must lie in (0, 1]");
    }
    if (!e.variance_factors.empty() && static_cast<int>(e.variance_factors.size()) != groups()) {
      throw std::invalid_argument("epoch variance factors must have one entry per group");
    }
    for (double f : e.variance_factors) {
      if (!(f > 0.0)) throw std::invalid_argument("epoch variance factors must be positive");
    }
  }
  if (const auto* c = std::get_if<GroupCounts>(&group_law)) {
    const std::size_t n = std::accumulate(c->counts.begin(), c->counts.end(), std::size_t{0});
    if (n != total_samples()) {
      throw std::invalid_argument("group counts must add up to the scenario's sample count");
    }
  }
}

ScenarioStream::ScenarioStream(ScenarioScript script, std::uint64_t seed)
    : script_(std::move(script)),
      model_rng_(Rng(seed).split(kModel)),
      label_rng_(Rng(seed).split(kLabels)),
      sample_rng_(Rng(seed).split(kSamples)),
      mask_rng_(Rng(seed).split(kMask)) {
  script_.validate();
  total_ = script_.total_samples();
  model_ = draw_model(model_rng_, script_.d, script_.k, script_.lambda, script_.v_star,
                      script_.group_law);
  if (const auto* c = std::get_if<GroupCounts>(&script_.group_law)) {
    labels_.reserve(total_);
    for (std::size_t g = 0; g < c->counts.size(); ++g) {
      labels_.insert(labels_.end(), c->counts[g], static_cast<int>(g));
    }
    // Fisher-Yates with the label stream.
    for (std::size_t i = labels_.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(label_rng_.uniform_index(i));
      std::swap(labels_[i - 1], labels_[j]);
    }
  }
  start_epoch();
}

void ScenarioStream::start_epoch() {
  const Epoch& e = script_.epochs[epoch_];
  if (e.redraw_subspace) model_.u = draw_stiefel(model_rng_, script_.d, script_.k);
  for (std::size_t g = 0; g < e.variance_factors.size(); ++g) {
    model_.v_star[static_cast<Index>(g)] *= e.variance_factors[g];
  }
  truth_ = std::make_shared<const GroundTruth>(GroundTruth{model_.u, model_.f_star(), model_.v_star});
}

std::optional<StreamItem> ScenarioStream::next() {
  if (index_ >= total_) return std::nullopt;
  if (epoch_pos_ == script_.epochs[epoch_].samples) {
    ++epoch_;
    epoch_pos_ = 0;
    start_epoch();
  }
  const int group = labels_.empty()
                        ? draw_group(std::get<GroupProbabilities>(script_.group_law), label_rng_)
                        : labels_[index_];
  ObservedSample s = draw_sample(model_, sample_rng_, group);
  s = mask_uniform(s, script_.epochs[epoch_].p_observe, mask_rng_);
  StreamItem item{std::move(s), truth_, index_, epoch_};
  ++index_;
  ++epoch_pos_;
  return item;
}

std::vector<StreamItem> run_script(const ScenarioScript& script, std::uint64_t seed) {
  ScenarioStream stream(script, seed);
  std::vector<StreamItem> out;
  out.reserve(stream.size());
  while (auto item = stream.next()) out.push_back(std::move(*item));
  return out;
}

}  // namespace shasta
