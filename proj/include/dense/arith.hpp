#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dense/rational.hpp"

namespace dense {

struct PrimePower {
  u64 prime;
  unsigned exponent;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// Canonical factorization: primes strictly increasing, exponents >= 1, and
// the product of prime^exponent equals value(). The unit has no factors.
class Factorization {
 public:
  Factorization() = default;

  // Validates the invariants (ordering, primality, product). Throws
  // domain_error when they do not hold.
  Factorization(u64 value, std::vector<PrimePower> factors);

  // Trusted construction for callers that produced canonical factors
  // themselves (sieve tables, pruned searches). Not checked.
  static Factorization from_canonical(u64 value, std::vector<PrimePower> factors) noexcept;

  u64 value() const noexcept { return value_; }
  std::span<const PrimePower> factors() const& noexcept { return factors_; }
  // A span into a temporary would dangle, e.g. in `for (auto pp : factorize(n).factors())`.
  std::span<const PrimePower> factors() const&& = delete;
  std::size_t size() const noexcept { return factors_.size(); }
  bool is_unit() const noexcept { return factors_.empty(); }

  // prod (e_i + 1), saturating at UINT64_MAX.
  u64 divisor_count() const noexcept;

  friend bool operator==(const Factorization&, const Factorization&) = default;

 private:
  u64 value_ = 1;
  std::vector<PrimePower> factors_;
};

inline constexpr std::size_t kDefaultDivisorCap = std::size_t{1} << 20;

// Deterministic for every n < 2^64.
bool is_prime(u64 n) noexcept;

// Throws domain_error for n = 0.
Factorization factorize(u64 n);

u64 euler_phi(const Factorization& f);
u64 carmichael(const Factorization& f);

// lambda of a single prime power.
u64 carmichael_prime_power(u64 p, unsigned e);

// All divisors in ascending order. Throws capacity_error when the divisor
// count exceeds `cap`.
std::vector<u64> divisors(const Factorization& f, std::size_t cap = kDefaultDivisorCap);

// Divisors <= bound, ascending. Same cap semantics, applied to the output size.
std::vector<u64> divisors_up_to(const Factorization& f, u64 bound,
                                std::size_t cap = kDefaultDivisorCap);

// P+(n), with P+(1) = 0.
u64 largest_prime_factor(u64 n);

// Least t >= 1 with a^t = 1 (mod n). Descends the exponents of lambda(n).
u64 multiplicative_order(u64 a, u64 n);

u64 mul_mod(u64 a, u64 b, u64 m) noexcept;
u64 pow_mod(u64 base, u64 exp, u64 m) noexcept;

// Checked multiply; throws arithmetic_error on overflow.
u64 checked_mul(u64 a, u64 b);
// lcm(a, b); throws arithmetic_error on overflow.
u64 checked_lcm(u64 a, u64 b);

// Ascending primes below 2^16.
std::span<const std::uint32_t> small_primes();

// floor(sqrt(n)) exactly.
u64 isqrt(u64 n) noexcept;

}  // namespace dense
