#pragma once

// Binary checkpoint of a ShastaState. Layout (all little-endian):
//
//   offset  size  field
//   0       8     magic "SHASTA\0\1" (last byte is the format version)
//   8       8     d  (uint64)
//   16      8     k  (uint64)
//   24      8     L  (uint64)
//   32      8     t  (uint64, samples ingested)
//   40      ...   float64 arrays, column-major:
//                 F (d*k), v (L), R_bar (k*k*d, block j = rows of R_bar_j),
//                 s_bar (k*d), f_hat (d*k), theta_bar (L), rho_bar (L)
//
// The size depends only on (d, k, L). See docs/checkpoint_format.md.

#include "shasta/shasta.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace shasta {

inline constexpr char kCheckpointMagic[8] = {'S', 'H', 'A', 'S', 'T', 'A', '\0', '\1'};

/// Byte size of a checkpoint for the given shape.
std::size_t checkpoint_size(Index d, Index k, Index groups);

std::string serialize_state(const ShastaState& state);
ShastaState deserialize_state(const std::string& bytes);

void save_state(const ShastaState& state, const std::filesystem::path& path);
ShastaState load_state(const std::filesystem::path& path);

/// Human-readable JSON view of a state. Arrays are included when `full`.
std::string state_to_json(const ShastaState& state, bool full);

}  // namespace shasta
