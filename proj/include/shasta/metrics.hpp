#pragma once

#include "shasta/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shasta {

/// (1/k) ||Uh Uh' - U U'||_F^2 = 2 (k - ||Uh' U||_F^2) / k for orthonormal
/// d x k inputs. Throws std::invalid_argument if either input deviates from
/// orthonormality by more than 1e-8.
double subspace_error(const Matrix& u_hat, const Matrix& u);

/// L(f, v) - L(f*, v*) over `data`.
double loglik_gap(const FactorMatrix& f, const NoiseVariances& v,
                  std::span<const ObservedSample> data, const FactorMatrix& f_star,
                  const NoiseVariances& v_star);

/// Elementwise |v_hat - v*| / v*.
Vector variance_error(const NoiseVariances& v_hat, const NoiseVariances& v_star);

struct MetricRecord {
  std::uint64_t t = 0;
  std::optional<double> subspace_error;
  std::optional<double> loglik_gap;
  std::optional<Vector> v_estimates;
  double elapsed_seconds = 0.0;
};

/// Checkpointed metrics for one estimator run. Sample indices strictly increase.
class MetricTrace {
 public:
  explicit MetricTrace(int groups) : groups_(groups) {}

  /// Throws std::invalid_argument if `t` does not increase or a field is out of range.
  void append(MetricRecord record);

  const std::vector<MetricRecord>& records() const { return records_; }
  int groups() const { return groups_; }
  bool empty() const { return records_.empty(); }
  const MetricRecord& back() const { return records_.back(); }

  /// CSV with header t,subspace_error,loglik_gap,v_1..v_L,elapsed_s; absent
  /// optional fields are empty cells.
  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;

 private:
  int groups_;
  std::vector<MetricRecord> records_;
};

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

}  // namespace shasta
