#include "shasta/model.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace shasta;
using namespace shasta::testing;

TEST(Model, LogLikelihoodMatchesDenseCovariance) {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 3 + static_cast<Index>(rng.uniform_index(25));
    const Index k = 1 + static_cast<Index>(rng.uniform_index(3));
    const Matrix f = gaussian(rng, d, k);
    const Vector v = positive(rng, 2, 0.05, 2.0);
    const auto s = random_sample(rng, d, 2, 0.7);
    const double dense = dense_log_likelihood(f, v[s.group], s);
    EXPECT_NEAR(sample_log_likelihood(f, v, s), dense, 1e-8 * (1.0 + std::abs(dense)));
  }
}

TEST(Model, PosteriorMatchesGaussianConditioning) {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 4 + static_cast<Index>(rng.uniform_index(20));
    const Index k = 1 + static_cast<Index>(rng.uniform_index(3));
    const Matrix f = gaussian(rng, d, k);
    const Vector v = positive(rng, 3, 0.1, 1.0);
    const auto s = random_sample(rng, d, 3, 0.6);
    const auto post = posterior_stats(f, v, s);
    const auto oracle = dense_posterior(f, v[s.group], s);
    EXPECT_LT(max_abs(post.zbar - oracle.mean), 1e-10);
    EXPECT_LT(max_abs(v[s.group] * post.m - oracle.cov), 1e-10);
  }
}

TEST(Model, EmptySampleCarriesNoInformation) {
  Rng rng(13);
  const Matrix f = gaussian(rng, 6, 2);
  const Vector v = Vector::Constant(1, 0.3);
  ObservedSample s;
  s.values.resize(0);
  EXPECT_DOUBLE_EQ(sample_log_likelihood(f, v, s), 0.0);
  const auto post = posterior_stats(f, v, s);
  EXPECT_LT(max_abs(post.zbar), 1e-15);
  EXPECT_LT(max_abs(post.m - Matrix::Identity(2, 2) / 0.3), 1e-12);
  EXPECT_DOUBLE_EQ(e_step(f, 0.3, s).rho(), 0.0);
}

TEST(Model, RhoMatchesDefinition) {
  Rng rng(14);
  const Matrix f = gaussian(rng, 12, 3);
  const auto s = random_sample(rng, 12, 1, 0.8);
  const double v = 0.4;
  const auto e = e_step(f, v, s);
  const Matrix fo = observed_rows(f, s);
  const auto oracle = dense_posterior(f, v, s);
  // E||y - F z||^2 under the posterior = ||y - F zbar||^2 + tr(F Cov F').
  const double expected = (s.values - fo * oracle.mean).squaredNorm() + (fo * oracle.cov * fo.transpose()).trace();
  EXPECT_NEAR(e.rho(), expected, 1e-10);
}

TEST(Model, DatasetLikelihoodIsHalfSum) {
  Rng rng(15);
  const Matrix f = gaussian(rng, 10, 2);
  const Vector v = positive(rng, 2, 0.1, 1.0);
  std::vector<ObservedSample> data;
  double sum = 0.0;
  for (int i = 0; i < 20; ++i) {
    data.push_back(random_sample(rng, 10, 2, 0.5));
    sum += dense_log_likelihood(f, v[data.back().group], data.back());
  }
  EXPECT_NEAR(dataset_log_likelihood(f, v, data), 0.5 * sum, 1e-8 * std::abs(sum));
}

TEST(Model, MinorizerTouchesAtAnchorAndStaysBelow) {
  Rng rng(16);
  for (int inst = 0; inst < 5; ++inst) {
    const Index d = 8, k = 2;
    const Matrix f0 = gaussian(rng, d, k);
    const Vector v0 = positive(rng, 2, 0.1, 1.0);
    const auto s = model_sample(rng, f0, v0, 0.7);
    const double c = sample_log_likelihood(f0, v0, s) - 2.0 * minorizer_value(f0, v0, f0, v0, s);
    for (int p = 0; p < 50; ++p) {
      const Matrix f = f0 + gaussian(rng, d, k, 0.5);
      const Vector v = positive(rng, 2, 0.01, 3.0);
      EXPECT_LE(2.0 * minorizer_value(f, v, f0, v0, s) + c, sample_log_likelihood(f, v, s) + 1e-8);
    }
  }
}

TEST(Model, VarianceFloorApplies) {
  Rng rng(17);
  const Matrix f = gaussian(rng, 5, 1);
  const auto s = random_sample(rng, 5, 1, 1.0);
  const Vector tiny = Vector::Constant(1, 1e-30);
  EXPECT_TRUE(std::isfinite(sample_log_likelihood(f, tiny, s)));
  EXPECT_DOUBLE_EQ(e_step(f, 1e-30, s).variance, kVarianceFloor);
  EXPECT_THROW(sample_log_likelihood(f, Vector::Constant(1, 0.0), s), std::invalid_argument);
}
