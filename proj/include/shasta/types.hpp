#pragma once

// Core value types shared by every estimator.

#include <Eigen/Dense>

#include <vector>

namespace shasta {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// d x k factor estimate F; row j is f_j.
using FactorMatrix = Eigen::MatrixXd;

/// Per-group noise variances v_1..v_L (stored 0-based).
using NoiseVariances = Eigen::VectorXd;

/// Smallest variance any routine will consume.
inline constexpr double kVarianceFloor = 1e-12;

inline double floored(double v) { return v < kVarianceFloor ? kVarianceFloor : v; }

/// Clamps every entry of v to kVarianceFloor from below.
void apply_variance_floor(NoiseVariances& v);

/// One data vector restricted to the coordinates that were observed.
///
/// `omega` holds 0-based coordinate indices in strictly increasing order and
/// `values[i]` is the observation at `omega[i]`. An empty omega is legal and
/// carries no information. `group` is the 0-based noise group label.
struct ObservedSample {
  std::vector<Index> omega;
  Vector values;
  int group = 0;

  Index observed() const { return values.size(); }

  /// Builds a fully observed sample from a dense vector.
  static ObservedSample full(const Vector& y, int group);

  /// Throws std::invalid_argument if the sample is inconsistent with an
  /// ambient dimension `d` and `groups` noise groups.
  void validate(Index d, int groups) const;

  /// Dense length-d vector with zeros in the missing entries.
  Vector zero_filled(Index d) const;

  friend bool operator==(const ObservedSample&, const ObservedSample&) = default;
};

/// Posterior moments of the latent coefficients given one observed sample:
/// z | y ~ N(zbar, v_g * m) with m = (F_o' F_o + v_g I)^{-1}, zbar = m F_o' y_o.
struct PosteriorStats {
  Matrix m;
  Vector zbar;
};

}  // namespace shasta
