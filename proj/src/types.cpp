#include "shasta/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace shasta {

void apply_variance_floor(NoiseVariances& v) {
  for (Index i = 0; i < v.size(); ++i) v[i] = floored(v[i]);
}

ObservedSample ObservedSample::full(const Vector& y, int group) {
  ObservedSample s;
  s.omega.resize(static_cast<std::size_t>(y.size()));
  for (Index j = 0; j < y.size(); ++j) s.omega[static_cast<std::size_t>(j)] = j;
  s.values = y;
  s.group = group;
  return s;
}

void ObservedSample::validate(Index d, int groups) const {
  if (group < 0 || group >= groups) {
    throw std::invalid_argument("sample group " + std::to_string(group) +
                                " outside [0, " + std::to_string(groups) + ")");
  }
  if (static_cast<Index>(omega.size()) != values.size()) {
    throw std::invalid_argument("sample omega/values length mismatch");
  }
  Index prev = -1;
  for (Index j : omega) {
    if (j <= prev || j >= d) {
      throw std::invalid_argument("sample indices must be strictly increasing in [0, d)");
    }
    prev = j;
  }
  if (!values.allFinite()) throw std::invalid_argument("sample values must be finite");
}

Vector ObservedSample::zero_filled(Index d) const {
  Vector y = Vector::Zero(d);
  for (std::size_t i = 0; i < omega.size(); ++i) y[omega[i]] = values[static_cast<Index>(i)];
  return y;
}

}  // namespace shasta
