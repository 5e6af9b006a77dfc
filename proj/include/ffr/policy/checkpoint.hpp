#pragma once

#include "ffr/policy/policy.hpp"

#include <filesystem>
#include <iosfwd>

namespace ffr::policy {

/// Binary layout, little-endian:
///   8 bytes  magic "FFRCKPT1"
///   u32      format version (1)
///   u32      V
///   u32      F
///   u64      feature hash seed
///   u64      number of weights (V * F)
///   f64[]    weights, row-major
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const PolicyParams& params);
/// Throws CorruptCheckpoint on a bad header, shape mismatch, or truncation.
PolicyParams read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const PolicyParams& params);
PolicyParams load_checkpoint(const std::filesystem::path& path);

}  // namespace ffr::policy
