#include "shasta/baselines.hpp"
#include "shasta/datagen.hpp"
#include "shasta/linalg.hpp"
#include "shasta/metrics.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace shasta;
using namespace shasta::testing;

TEST(Petrels, CoefficientsAreLeastSquares) {
  Rng rng(41);
  const Matrix f = gaussian(rng, 12, 3);
  const auto s = random_sample(rng, 12, 1, 0.7);
  const Matrix fo = observed_rows(f, s);
  const Vector z = petrels_coefficients(f, s);
  const Vector oracle = fo.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(s.values);
  EXPECT_LT(max_abs(z - oracle), 1e-10);
}

TEST(Petrels, CoefficientsUnderdeterminedAreMinimumNorm) {
  Rng rng(42);
  const Matrix f = gaussian(rng, 10, 4);
  ObservedSample s;
  s.omega = {1, 6};
  s.values = Vector{{0.5, -1.0}};
  const Vector z = petrels_coefficients(f, s);
  const Matrix fo = observed_rows(f, s);
  EXPECT_LT(max_abs(fo * z - s.values), 1e-10);
  // Minimum-norm solution lies in the row space of F_o.
  const Vector oracle = fo.transpose() * (fo * fo.transpose()).inverse() * s.values;
  EXPECT_LT(max_abs(z - oracle), 1e-10);
}

TEST(Petrels, MatchesDiscountedLeastSquaresOracle) {
  Rng rng(43);
  const Index d = 9, k = 2;
  const double lambda = 0.95, delta = 0.3;
  const Matrix f0 = gaussian(rng, d, k);
  auto st = petrels_init(f0, lambda, delta);

  std::vector<Vector> zs;
  std::vector<ObservedSample> samples;
  for (int t = 0; t < 40; ++t) {
    const auto s = random_sample(rng, d, 1, 0.6);
    if (s.observed() == 0) continue;
    zs.push_back(observed_rows(st.f, s).jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(s.values));
    samples.push_back(s);
    petrels_ingest(st, s);
  }
  const auto n = samples.size();
  // Row j minimizes lambda^T delta |f - f0_j|^2 + sum_t lambda^(T-t) (y_tj - z_t' f)^2.
  for (Index j = 0; j < d; ++j) {
    std::vector<Vector> rows;
    std::vector<double> rhs, wts;
    Matrix a = std::sqrt(std::pow(lambda, n) * delta) * Matrix::Identity(k, k);
    Vector b = std::sqrt(std::pow(lambda, n) * delta) * f0.row(j).transpose();
    for (std::size_t t = 0; t < n; ++t) {
      const auto& s = samples[t];
      const auto it = std::find(s.omega.begin(), s.omega.end(), j);
      if (it == s.omega.end()) continue;
      const double sw = std::sqrt(std::pow(lambda, static_cast<double>(n - 1 - t)));
      a.conservativeResize(a.rows() + 1, k);
      b.conservativeResize(b.rows() + 1);
      a.row(a.rows() - 1) = sw * zs[t].transpose();
      b[b.rows() - 1] = sw * s.values[it - s.omega.begin()];
    }
    const Vector oracle = a.colPivHouseholderQr().solve(b);
    EXPECT_LT(max_abs(st.f.row(j).transpose() - oracle), 1e-8) << "row " << j;
  }
}

TEST(Petrels, RejectsEmptySample) {
  Rng rng(44);
  auto st = petrels_init(gaussian(rng, 5, 2), 1.0, 0.1);
  ObservedSample empty;
  empty.values.resize(0);
  EXPECT_THROW(petrels_ingest(st, empty), std::invalid_argument);
}

TEST(Grouse, StepStaysOnGrassmannian) {
  Rng rng(45);
  auto st = grouse_init(gaussian(rng, 20, 3), 0.05);
  EXPECT_LT(orthonormality_defect(st.u), 1e-12);
  for (int i = 0; i < 200; ++i) {
    grouse_ingest(st, random_sample(rng, 20, 1, 0.5));
    EXPECT_LT(orthonormality_defect(st.u), 1e-8);
  }
}

TEST(Grouse, SingleStepMatchesGeodesicFormula) {
  Rng rng(46);
  auto st = grouse_init(gaussian(rng, 8, 2), 0.3);
  const Matrix u0 = st.u;
  const auto s = random_sample(rng, 8, 1, 1.0);
  grouse_ingest(st, s);
  // Full observation: rotate within span(p, r) by angle sigma*eta.
  const Vector w = u0.transpose() * s.values;
  const Vector p = u0 * w;
  const Vector r = s.values - p;
  const double sigma = r.norm() * p.norm();
  const double th = sigma * 0.3;
  const Matrix expected = u0 + ((std::cos(th) - 1.0) * p / p.norm() + std::sin(th) * r / r.norm()) *
                                   w.transpose() / w.norm();
  EXPECT_LT(max_abs(st.u - expected), 1e-10);
}

TEST(Grouse, TracksNoiselessSubspace) {
  const auto model = draw_model(47, 30, 2, Vector{{2.0, 1.0}}, Vector{{1e-8}}, GroupProbabilities{{1.0}});
  Rng rng(48);
  auto st = grouse_init(gaussian(rng, 30, 2), 0.1);
  for (int i = 0; i < 3000; ++i) grouse_ingest(st, mask_uniform(draw_sample(model, rng, 0), 0.7, rng));
  EXPECT_LT(subspace_error(st.u, model.u), 1e-4);
}

TEST(Baselines, PetrelsTracksPlantedSubspace) {
  const auto model = draw_model(49, 30, 2, Vector{{2.0, 1.0}}, Vector{{0.01}}, GroupProbabilities{{1.0}});
  Rng rng(50);
  PetrelsEstimator est(gaussian(rng, 30, 2), 1.0, 0.1);
  for (int i = 0; i < 2000; ++i) est.ingest(mask_uniform(draw_sample(model, rng, 0), 0.5, rng));
  EXPECT_LT(subspace_error(est.current_subspace(), model.u), 0.02);
}
