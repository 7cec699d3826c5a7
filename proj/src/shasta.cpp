#include "shasta/shasta.hpp"

#include "shasta/linalg.hpp"
#include "shasta/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shasta {

WeightSchedule WeightSchedule::inverse_t() {
  return {[](std::uint64_t t) { return 1.0 / static_cast<double>(std::max<std::uint64_t>(t, 1)); },
          "1/t"};
}

WeightSchedule WeightSchedule::constant(double w) {
  if (!(w > 0.0 && w <= 1.0)) throw std::invalid_argument("constant weight must lie in (0, 1]");
  return {[w](std::uint64_t) { return w; }, "constant(" + std::to_string(w) + ")"};
}

WeightSchedule WeightSchedule::inverse_sqrt(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("inverse_sqrt scale must be positive");
  return {[scale](std::uint64_t t) {
            return std::min(1.0, scale / std::sqrt(static_cast<double>(std::max<std::uint64_t>(t, 1))));
          },
          std::to_string(scale) + "/sqrt(t)"};
}

WeightSchedule WeightSchedule::custom(Fn fn, std::string description) {
  return {std::move(fn), std::move(description)};
}

void ShastaConfig::validate() const {
  if (k < 1) throw std::invalid_argument("shasta: rank must be >= 1");
  if (groups < 1) throw std::invalid_argument("shasta: need at least one group");
  if (!(c_f > 0.0 && c_f <= 1.0)) throw std::invalid_argument("shasta: c_f must lie in (0, 1]");
  if (!(c_v > 0.0 && c_v <= 1.0)) throw std::invalid_argument("shasta: c_v must lie in (0, 1]");
  if (!(delta > 0.0)) throw std::invalid_argument("shasta: delta must be positive");
}

bool operator==(const ShastaState& a, const ShastaState& b) {
  return a.t == b.t && a.f == b.f && a.v == b.v && a.r_bar == b.r_bar && a.s_bar == b.s_bar &&
         a.f_hat == b.f_hat && a.theta_bar == b.theta_bar && a.rho_bar == b.rho_bar;
}

ShastaState init_state(const ShastaConfig& cfg, const FactorMatrix& f0, const NoiseVariances& v0) {
  cfg.validate();
  if (f0.cols() != cfg.k || f0.rows() < cfg.k) {
    throw std::invalid_argument("shasta: initial factors must be d x k with k <= d");
  }
  if (v0.size() != cfg.variance_slots()) {
    throw std::invalid_argument("shasta: initial variances have the wrong length");
  }
  const Index d = f0.rows();
  const Index k = cfg.k;
  ShastaState st;
  st.f = f0;
  st.v = v0;
  apply_variance_floor(st.v);
  st.r_bar.resize(k, k * d);
  for (Index j = 0; j < d; ++j) st.r_block(j) = cfg.delta * Matrix::Identity(k, k);
  st.s_bar = Matrix::Zero(k, d);
  st.f_hat = FactorMatrix::Zero(d, k);
  st.theta_bar = Vector::Zero(v0.size());
  st.rho_bar = Vector::Zero(v0.size());
  st.t = 0;
  return st;
}

namespace {

void check_weight(double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("shasta: weight must lie in [0, 1]");
}

void v_step_slot(ShastaState& st, const ObservedSample& s, int slot, double w, double c_v) {
  const auto es = e_step(st.f, st.v[slot], s);
  const double rho_t = es.rho();

  st.theta_bar *= (1.0 - w);
  st.rho_bar *= (1.0 - w);
  st.theta_bar[slot] += w * static_cast<double>(s.observed());
  st.rho_bar[slot] += w * rho_t;

  for (Index l = 0; l < st.v.size(); ++l) {
    // A group with no surrogate mass keeps its previous value.
    if (st.theta_bar[l] > 0.0) {
      st.v[l] = floored((1.0 - c_v) * st.v[l] + c_v * st.rho_bar[l] / st.theta_bar[l]);
    }
  }
}

void f_step_slot(ShastaState& st, const ObservedSample& s, int slot, double w, double c_f) {
  const Index k = st.k();
  const auto es = e_step(st.f, st.v[slot], s);
  const double inv_v = 1.0 / es.variance;

  Matrix contrib = inv_v * es.zbar * es.zbar.transpose();
  contrib += es.m;
  contrib *= w;
  const Vector zw = (w * inv_v) * es.zbar;

  st.r_bar *= (1.0 - w);
  st.s_bar *= (1.0 - w);
  for (std::size_t i = 0; i < s.omega.size(); ++i) {
    const Index j = s.omega[i];
    st.r_block(j) += contrib;
    st.s_bar.col(j) += s.values[static_cast<Index>(i)] * zw;
  }

  // Unobserved rows only decayed, so their cached maximizer is unchanged.
  Matrix r(k, k);
  for (const Index j : s.omega) {
    r = st.r_block(j);
    st.f_hat.row(j) = solve_spd(r, st.s_bar.col(j)).transpose();
  }
  st.f = (1.0 - c_f) * st.f + c_f * st.f_hat;
}

}  // namespace

void v_step(ShastaState& state, const ObservedSample& s, double w, double c_v) {
  check_weight(w);
  v_step_slot(state, s, s.group, w, c_v);
}

void f_step(ShastaState& state, const ObservedSample& s, double w, double c_f) {
  check_weight(w);
  f_step_slot(state, s, s.group, w, c_f);
}

void ingest(ShastaState& state, const ObservedSample& s, const ShastaConfig& cfg) {
  s.validate(state.d(), cfg.groups);
  state.t += 1;
  const double w = cfg.weights(state.t);
  check_weight(w);
  if (cfg.variance_mode == VarianceMode::kMemorylessSingle) {
    v_step_slot(state, s, 0, 1.0, 1.0);
    f_step_slot(state, s, 0, w, cfg.c_f);
  } else {
    v_step_slot(state, s, s.group, w, cfg.c_v);
    f_step_slot(state, s, s.group, w, cfg.c_f);
  }
}

ShastaEstimator::ShastaEstimator(ShastaConfig cfg, const FactorMatrix& f0, const NoiseVariances& v0)
    : cfg_(std::move(cfg)), state_(init_state(cfg_, f0, v0)) {}

ShastaEstimator::ShastaEstimator(ShastaConfig cfg, ShastaState state)
    : cfg_(std::move(cfg)), state_(std::move(state)) {
  cfg_.validate();
  if (state_.k() != cfg_.k || state_.groups() != cfg_.variance_slots()) {
    throw std::invalid_argument("shasta: restored state does not match config");
  }
}

void ShastaEstimator::ingest(const ObservedSample& s) { shasta::ingest(state_, s, cfg_); }

Matrix ShastaEstimator::current_subspace() const { return left_singular_vectors(state_.f); }

}  // namespace shasta
