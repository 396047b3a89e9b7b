#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
// The dispatching entry points pick the variant once per process (CPU
// detection, overridable with DENSE_SIMD=scalar|avx2) and fall back to the
// scalar loop whenever the operands do not fit the 32x32->64 lane multiply.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace dense::kernels {

using u64 = std::uint64_t;

inline constexpr std::size_t kNone = SIZE_MAX;

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;
bool isa_available(Isa isa) noexcept;
Isa active_isa() noexcept;

// First i with sorted[i+1] * den > num * sorted[i], i.e. the first
// consecutive ratio exceeding num/den; kNone if every ratio is within.
std::size_t first_ratio_violation(std::span<const u64> sorted, u64 num, u64 den) noexcept;

// Number of i with values[i] * den <= num * (first_index + i).
std::size_t count_scaled_le(std::span<const u64> values, u64 first_index, u64 num,
                            u64 den) noexcept;

namespace scalar {
std::size_t first_ratio_violation(std::span<const u64> sorted, u64 num, u64 den) noexcept;
std::size_t count_scaled_le(std::span<const u64> values, u64 first_index, u64 num,
                            u64 den) noexcept;
}  // namespace scalar

// Requires every operand (values, indices, num, den) below 2^32 and a CPU
// with AVX2; the dispatcher checks both.
namespace avx2 {
std::size_t first_ratio_violation(std::span<const u64> sorted, u64 num, u64 den) noexcept;
std::size_t count_scaled_le(std::span<const u64> values, u64 first_index, u64 num,
                            u64 den) noexcept;
}  // namespace avx2

}  // namespace dense::kernels
