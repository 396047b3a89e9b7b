#include <immintrin.h>

#include <bit>

#include "dense/kernels.hpp"

namespace dense::kernels::avx2 {

namespace {

// Unsigned 64-bit a > b, lane-wise.
inline __m256i cmpgt_u64(__m256i a, __m256i b) {
  const __m256i bias = _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ull));
  return _mm256_cmpgt_epi64(_mm256_xor_si256(a, bias), _mm256_xor_si256(b, bias));
}

inline __m256i load(const u64* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

}  // namespace

std::size_t first_ratio_violation(std::span<const u64> sorted, u64 num, u64 den) noexcept {
  const std::size_t n = sorted.size();
  if (n < 2) return kNone;
  const __m256i vnum = _mm256_set1_epi64x(static_cast<long long>(num));
  const __m256i vden = _mm256_set1_epi64x(static_cast<long long>(den));
  const u64* d = sorted.data();
  std::size_t i = 0;
  for (; i + 4 < n; i += 4) {
    const __m256i lo = load(d + i);
    const __m256i hi = load(d + i + 1);
    const __m256i gt = cmpgt_u64(_mm256_mul_epu32(hi, vden), _mm256_mul_epu32(lo, vnum));
    const int mask = _mm256_movemask_pd(_mm256_castsi256_pd(gt));
    if (mask != 0) return i + static_cast<std::size_t>(std::countr_zero(static_cast<unsigned>(mask)));
  }
  for (; i + 1 < n; ++i) {
    if (d[i + 1] * den > num * d[i]) return i;
  }
  return kNone;
}

std::size_t count_scaled_le(std::span<const u64> values, u64 first_index, u64 num,
                            u64 den) noexcept {
  const std::size_t n = values.size();
  const __m256i vnum = _mm256_set1_epi64x(static_cast<long long>(num));
  const __m256i vden = _mm256_set1_epi64x(static_cast<long long>(den));
  const __m256i step = _mm256_set1_epi64x(4);
  __m256i idx = _mm256_setr_epi64x(static_cast<long long>(first_index),
                                   static_cast<long long>(first_index + 1),
                                   static_cast<long long>(first_index + 2),
                                   static_cast<long long>(first_index + 3));
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i lhs = _mm256_mul_epu32(load(values.data() + i), vden);
    const __m256i rhs = _mm256_mul_epu32(idx, vnum);
    const int gt = _mm256_movemask_pd(_mm256_castsi256_pd(cmpgt_u64(lhs, rhs)));
    count += 4 - static_cast<std::size_t>(std::popcount(static_cast<unsigned>(gt)));
    idx = _mm256_add_epi64(idx, step);
  }
  for (; i < n; ++i) count += values[i] * den <= num * (first_index + i);
  return count;
}

}  // namespace dense::kernels::avx2
