#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dense/sieve.hpp"

namespace dense::cache {

// Little-endian layout:
//   "TDSV" | version u32 | lo u64 | hi u64 |
//   spf u32 x (hi-lo) | phi u64 x (hi-lo) | lambda u64 x (hi-lo) |
//   FNV-1a 64 of every preceding byte
inline constexpr char kMagic[4] = {'T', 'D', 'S', 'V'};
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderSize = 4 + 4 + 8 + 8;

std::uint64_t checksum(std::span<const std::uint8_t> bytes) noexcept;

std::vector<std::uint8_t> encode(const SieveSegment& segment);
// Throws integrity_error (tagged with segment_index) on any mismatch.
SieveSegment decode(std::span<const std::uint8_t> bytes, std::uint64_t segment_index = 0);

std::filesystem::path segment_file(const std::filesystem::path& dir, std::uint64_t lo,
                                   std::uint64_t hi);

// Writes atomically (temp file + rename).
void write(const std::filesystem::path& dir, const SieveSegment& segment);
// Throws not_found_error if no file exists for [lo, hi), integrity_error if
// it fails validation or covers a different range.
SieveSegment read(const std::filesystem::path& dir, std::uint64_t lo, std::uint64_t hi,
                  std::uint64_t segment_index = 0);

}  // namespace dense::cache
