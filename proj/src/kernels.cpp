#include "dense/kernels.hpp"

#include <cstdlib>
#include <string>

namespace dense::kernels {

namespace {

constexpr u64 kLane = u64{1} << 32;

Isa detect() noexcept {
  Isa best = isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
  if (const char* env = std::getenv("DENSE_SIMD")) {
    const std::string_view want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
  }
  return best;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(DENSE_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept {
  static const Isa isa = detect();
  return isa;
}

std::size_t first_ratio_violation(std::span<const u64> sorted, u64 num, u64 den) noexcept {
#if defined(DENSE_HAVE_AVX2)
  if (active_isa() == Isa::avx2 && num < kLane && den < kLane &&
      (sorted.empty() || sorted.back() < kLane))
    return avx2::first_ratio_violation(sorted, num, den);
#endif
  return scalar::first_ratio_violation(sorted, num, den);
}

std::size_t count_scaled_le(std::span<const u64> values, u64 first_index, u64 num,
                            u64 den) noexcept {
#if defined(DENSE_HAVE_AVX2)
  if (active_isa() == Isa::avx2 && num < kLane && den < kLane && first_index + values.size() < kLane) {
    bool fits = true;
    for (u64 v : values) fits &= v < kLane;
    if (fits) return avx2::count_scaled_le(values, first_index, num, den);
  }
#endif
  return scalar::count_scaled_le(values, first_index, num, den);
}

}  // namespace dense::kernels
