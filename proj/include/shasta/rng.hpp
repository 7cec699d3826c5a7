#pragma once

#include <cstdint>

namespace shasta {

/// Counter-based generator: draw i of a stream with key K is
/// splitmix64(K + i * golden). Streams are split by hashing a stream id into
/// a new key, so any sub-stream can be regenerated independently of the
/// others. Normals use Box-Muller so results do not depend on the standard
/// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent child stream identified by `stream`.
  Rng split(std::uint64_t stream) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal.
  double normal();
  /// Uniform integer on [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  Rng(std::uint64_t key, int) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace shasta
