#include "dense/kernels.hpp"

namespace dense::kernels::scalar {

using u128 = unsigned __int128;

std::size_t first_ratio_violation(std::span<const u64> sorted, u64 num, u64 den) noexcept {
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (static_cast<u128>(sorted[i + 1]) * den > static_cast<u128>(num) * sorted[i]) return i;
  }
  return kNone;
}

std::size_t count_scaled_le(std::span<const u64> values, u64 first_index, u64 num,
                            u64 den) noexcept {
  std::size_t count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const u128 lhs = static_cast<u128>(values[i]) * den;
    const u128 rhs = static_cast<u128>(num) * (first_index + i);
    count += lhs <= rhs;
  }
  return count;
}

}  // namespace dense::kernels::scalar
