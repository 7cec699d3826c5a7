#pragma once

// Shared fixtures for the unit tests: small random instances and dense
// reference computations that avoid the library's Woodbury shortcuts.

#include "shasta/rng.hpp"
#include "shasta/types.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace shasta::testing {

inline Matrix gaussian(Rng& rng, Index rows, Index cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = scale * rng.normal();
  return m;
}

inline Vector positive(Rng& rng, Index n, double lo, double hi) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = lo + (hi - lo) * rng.uniform();
  return v;
}

/// Keeps each coordinate with probability p; the values are N(0, scale^2).
inline ObservedSample random_sample(Rng& rng, Index d, int groups, double p, double scale = 1.0) {
  ObservedSample s;
  std::vector<double> vals;
  for (Index j = 0; j < d; ++j) {
    if (rng.uniform() < p) {
      s.omega.push_back(j);
      vals.push_back(scale * rng.normal());
    }
  }
  s.values = Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size()));
  s.group = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(groups)));
  return s;
}

/// Sample drawn from the factor model itself, so likelihood ranges are realistic.
inline ObservedSample model_sample(Rng& rng, const Matrix& f, const Vector& v, double p) {
  const Index d = f.rows();
  ObservedSample s;
  s.group = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(v.size())));
  const Vector z = gaussian(rng, f.cols(), 1);
  const Vector y = f * z + std::sqrt(v[s.group]) * gaussian(rng, d, 1);
  std::vector<double> vals;
  for (Index j = 0; j < d; ++j) {
    if (rng.uniform() < p) {
      s.omega.push_back(j);
      vals.push_back(y[j]);
    }
  }
  s.values = Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size()));
  return s;
}

inline Matrix observed_rows(const Matrix& f, const ObservedSample& s) {
  Matrix fo(s.observed(), f.cols());
  for (Index i = 0; i < s.observed(); ++i) fo.row(i) = f.row(s.omega[static_cast<std::size_t>(i)]);
  return fo;
}

/// -log det C - y' C^{-1} y with C = F_o F_o' + v I formed explicitly.
inline double dense_log_likelihood(const Matrix& f, double v, const ObservedSample& s) {
  const Matrix fo = observed_rows(f, s);
  const Matrix c = fo * fo.transpose() + v * Matrix::Identity(s.observed(), s.observed());
  Eigen::FullPivLU<Matrix> lu(c);
  double logdet = 0.0;
  for (Index i = 0; i < c.rows(); ++i) logdet += std::log(std::abs(lu.matrixLU()(i, i)));
  return -logdet - s.values.dot(lu.solve(s.values));
}

/// Conditional law of z given y_o from the joint Gaussian of (z, y_o):
/// mean F_o' C^{-1} y_o, covariance I - F_o' C^{-1} F_o (= v M).
struct DensePosterior {
  Vector mean;
  Matrix cov;
};
inline DensePosterior dense_posterior(const Matrix& f, double v, const ObservedSample& s) {
  const Matrix fo = observed_rows(f, s);
  const Matrix c = fo * fo.transpose() + v * Matrix::Identity(s.observed(), s.observed());
  const Eigen::FullPivLU<Matrix> lu(c);
  return {fo.transpose() * lu.solve(s.values),
          Matrix::Identity(f.cols(), f.cols()) - fo.transpose() * lu.solve(fo)};
}

inline double max_abs(const Matrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace shasta::testing
