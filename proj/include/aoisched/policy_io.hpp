#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "aoisched/solver.hpp"

namespace aoi {

/// Binary policy file, all integers little-endian:
///
///   offset  size  field
///        0     4  magic "AOI1"
///        4     4  version (u32) = 1
///        8     4  N (u32)
///       12     4  M (u32)
///       16     4  R (u32)
///       20     1  cost kind (u8): 0 = error, 1 = aoi
///       21     8  gamma (f64)
///       29     4  action count K (u32)
///       33     8  state count M^N (u64)
///       41   8 K  action masks (u64 each, bit i = loop i scheduled)
///   41+8K   M^N  action index per state, ascending StateIndex
///                (loop 0 is the least significant mixed-radix digit)
///
/// Total length 41 + 8 K + M^N bytes.
inline constexpr std::uint32_t kPolicyFormatVersion = 1;
inline constexpr std::size_t kPolicyHeaderBytes = 41;

std::vector<std::uint8_t> serialize_policy(const PolicyTable& policy);
PolicyTable deserialize_policy(std::span<const std::uint8_t> bytes);

// Throw IoError when the file cannot be opened/written, ConfigError when the
// content is malformed.
void write_policy(const std::filesystem::path& path, const PolicyTable& policy);
PolicyTable read_policy(const std::filesystem::path& path);

}  // namespace aoi
