#pragma once

#include "shasta/types.hpp"

#include <optional>
#include <string>

namespace shasta {

/// Common surface for the streaming estimators so a harness can drive them
/// interchangeably over the same sample stream.
class StreamingEstimator {
 public:
  virtual ~StreamingEstimator() = default;

  virtual void ingest(const ObservedSample& s) = 0;

  /// d x k orthonormal basis of the current subspace estimate.
  virtual Matrix current_subspace() const = 0;

  /// Current factor estimate, if the method keeps one.
  virtual std::optional<FactorMatrix> current_factors() const { return std::nullopt; }

  /// Current noise variance estimates, if the method learns them.
  virtual std::optional<NoiseVariances> current_variances() const { return std::nullopt; }

  virtual std::string name() const = 0;
};

}  // namespace shasta
