#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dense/arith.hpp"

namespace dense {

// Smallest prime factor, phi and lambda for every n in [lo, hi).
//
// spf is stored as u32 with sentinel 0 for n = 1 (and n = 0) and for n whose
// least prime factor does not fit 32 bits, which for n < 2^64 means n is
// prime. smallest_factor() resolves the sentinel.
struct SieveSegment {
  u64 lo = 0;
  u64 hi = 0;
  std::vector<std::uint32_t> spf;
  std::vector<u64> phi;
  std::vector<u64> lambda;

  std::size_t size() const noexcept { return static_cast<std::size_t>(hi - lo); }
  bool contains(u64 n) const noexcept { return n >= lo && n < hi; }

  u64 smallest_factor(u64 n) const noexcept {
    const std::uint32_t s = spf[n - lo];
    return (s == 0 && n > 1) ? n : s;
  }
  u64 phi_of(u64 n) const noexcept { return phi[n - lo]; }
  u64 lambda_of(u64 n) const noexcept { return lambda[n - lo]; }

  friend bool operator==(const SieveSegment&, const SieveSegment&) = default;
};

enum class Delivery {
  serialized,  // consumer calls never overlap
  concurrent,  // consumer may run on several workers at once
};

inline constexpr u64 kDefaultSegmentLength = u64{1} << 22;

struct SieveConfig {
  u64 limit = 0;  // exclusive
  u64 segment_length = kDefaultSegmentLength;
  unsigned worker_count = 1;
  std::optional<std::filesystem::path> cache_path;
  Delivery delivery = Delivery::serialized;
};

struct SieveSummary {
  u64 segments_total = 0;
  u64 segments_completed = 0;
  u64 values_delivered = 0;
  u64 cache_hits = 0;
  u64 cache_writes = 0;
};

using SegmentConsumer = std::function<void(const SieveSegment&)>;

// Sieves [lo, hi) directly. lo may be 0; the n = 0 row is all zeros.
SieveSegment sieve_segment(u64 lo, u64 hi);

// Number of segments covering [1, limit): segment k is
// [1 + k*L, min(limit, 1 + (k+1)*L)).
u64 segment_count(const SieveConfig& cfg) noexcept;

// Delivers every n in [1, limit) exactly once. Segments arrive in any order
// when worker_count > 1. With a cache path, segments are read from the cache
// when present and written after sieving otherwise; a corrupted cache file
// raises integrity_error carrying the segment index.
SieveSummary iterate_segments(const SieveConfig& cfg, const SegmentConsumer& consumer);

// Ascending primes <= bound, cached process-wide. bound <= 2^32.
std::shared_ptr<const std::vector<std::uint32_t>> base_primes(u64 bound);

// Ascending primes in [lo, hi), produced lazily one window at a time.
class PrimeRange {
 public:
  class iterator {
   public:
    using value_type = u64;
    using difference_type = std::ptrdiff_t;
    using iterator_category = std::input_iterator_tag;

    iterator() = default;
    u64 operator*() const noexcept { return buffer_[pos_]; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& a, std::default_sentinel_t) noexcept { return a.done_; }

   private:
    friend class PrimeRange;
    iterator(u64 lo, u64 hi);
    void refill();

    u64 next_lo_ = 0;
    u64 hi_ = 0;
    std::vector<u64> buffer_;
    std::size_t pos_ = 0;
    bool done_ = true;
  };

  PrimeRange(u64 lo, u64 hi) noexcept : lo_(lo), hi_(hi) {}
  iterator begin() const { return iterator(lo_, hi_); }
  std::default_sentinel_t end() const noexcept { return {}; }

 private:
  u64 lo_;
  u64 hi_;
};

inline PrimeRange primes_in(u64 lo, u64 hi) noexcept { return PrimeRange(lo, hi); }

// Full-range smallest-prime-factor index for factoring any m < limit in
// O(Omega(m)) steps. Stores one u16 per odd m (0 = prime), so limit is
// capped at 2^32; 1 byte per integer overall.
class FactorTable {
 public:
  static constexpr u64 kMaxLimit = u64{1} << 32;

  explicit FactorTable(u64 limit);

  u64 limit() const noexcept { return limit_; }
  // Requires 1 <= m < limit.
  Factorization factor(u64 m) const;
  // Appends the distinct primes of m in ascending order into `out` (cleared).
  void distinct_primes(u64 m, std::vector<u64>& out) const;
  // Omega(m): prime factors counted with multiplicity.
  unsigned big_omega(u64 m) const;

 private:
  u64 limit_;
  std::vector<std::uint16_t> odd_spf_;  // index m / 2 for odd m
};

struct ShiftedPrime {
  u64 prime;
  u64 largest;                // P+(p - 1); 0 for p = 2
  std::vector<u64> factors;   // distinct primes of p - 1, ascending
};

// Streams one record per prime p < limit, ascending.
void shifted_prime_factor_table(const FactorTable& table, u64 limit,
                                const std::function<void(const ShiftedPrime&)>& consumer);
std::vector<ShiftedPrime> shifted_prime_factor_table(u64 limit);

}  // namespace dense
