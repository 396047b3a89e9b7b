#include "dense/arith.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>
#include <string>

#include "dense/errors.hpp"

namespace dense {

u64 mul_mod(u64 a, u64 b, u64 m) noexcept {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 pow_mod(u64 base, u64 exp, u64 m) noexcept {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

u64 checked_mul(u64 a, u64 b) {
  u64 r;
  if (__builtin_mul_overflow(a, b, &r)) throw arithmetic_error("64-bit product overflows");
  return r;
}

u64 checked_lcm(u64 a, u64 b) {
  if (a == 0 || b == 0) return 0;
  return checked_mul(a / std::gcd(a, b), b);
}

u64 isqrt(u64 n) noexcept {
  u64 r = static_cast<u64>(__builtin_sqrtl(static_cast<long double>(n)));
  while (r > 0 && (r > UINT32_MAX || r * r > n)) --r;
  while (r < UINT32_MAX && (r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::span<const std::uint32_t> small_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    constexpr std::uint32_t kBound = 1u << 16;
    std::vector<bool> composite(kBound, false);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 2; i < kBound; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (std::uint64_t j = std::uint64_t{i} * i; j < kBound; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

namespace {

// Strong probable-prime test to base a; n odd, n > 2.
bool strong_probable_prime(u64 n, u64 a) noexcept {
  a %= n;
  if (a == 0) return true;
  u64 d = n - 1;
  const int s = std::countr_zero(d);
  d >>= s;
  u64 x = pow_mod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int r = 1; r < s; ++r) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace

bool is_prime(u64 n) noexcept {
  if (n < 2) return false;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  if (n < 41 * 41) return true;
  // Jim Sinclair's seven bases cover every n < 2^64.
  for (u64 a : {2ull, 325ull, 9375ull, 28178ull, 450775ull, 9780504ull, 1795265022ull}) {
    if (!strong_probable_prime(n, a)) return false;
  }
  return true;
}

namespace {

// Brent's variant of Pollard rho. n odd composite with no factor below 2^16.
u64 find_factor(u64 n) {
  for (u64 c = 1;; ++c) {
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    u64 r = 1;
    constexpr u64 kBatch = 128;
    auto step = [&](u64 v) { return (mul_mod(v, v, n) + c) % n; };
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = step(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(kBatch, r - k); ++i) {
          y = step(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += kBatch;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1);
    if (g == n) {
      do {
        ys = step(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void split_large(u64 n, std::vector<u64>& primes) {
  if (n == 1) return;
  if (is_prime(n)) {
    primes.push_back(n);
    return;
  }
  const u64 r = isqrt(n);
  if (r * r == n) {
    split_large(r, primes);
    split_large(r, primes);
    return;
  }
  const u64 d = find_factor(n);
  split_large(d, primes);
  split_large(n / d, primes);
}

}  // namespace

Factorization::Factorization(u64 value, std::vector<PrimePower> factors)
    : value_(value), factors_(std::move(factors)) {
  if (value_ == 0) throw domain_error("factorization of zero");
  u128 product = 1;
  u64 prev = 0;
  for (const auto& [p, e] : factors_) {
    if (p <= prev || e == 0 || !is_prime(p))
      throw domain_error("non-canonical factorization of " + std::to_string(value_));
    prev = p;
    for (unsigned i = 0; i < e; ++i) {
      product *= p;
      if (product > value_) throw domain_error("factor product exceeds " + std::to_string(value_));
    }
  }
  if (product != value_) throw domain_error("factor product differs from " + std::to_string(value_));
}

Factorization Factorization::from_canonical(u64 value, std::vector<PrimePower> factors) noexcept {
  Factorization f;
  f.value_ = value;
  f.factors_ = std::move(factors);
  return f;
}

u64 Factorization::divisor_count() const noexcept {
  u64 count = 1;
  for (const auto& pp : factors_) {
    if (__builtin_mul_overflow(count, u64{pp.exponent} + 1, &count)) return UINT64_MAX;
  }
  return count;
}

Factorization factorize(u64 n) {
  if (n == 0) throw domain_error("factorize(0) is undefined");
  std::vector<PrimePower> factors;
  u64 m = n;
  if (const int tz = std::countr_zero(m); tz > 0) {
    factors.push_back({2, static_cast<unsigned>(tz)});
    m >>= tz;
  }
  for (std::uint32_t p : small_primes().subspan(1)) {
    if (u64{p} * p > m) break;
    if (m % p != 0) continue;
    unsigned e = 0;
    do {
      m /= p;
      ++e;
    } while (m % p == 0);
    factors.push_back({p, e});
  }
  if (m > 1) {
    // The cofactor has no prime factor below 2^16 (or is itself prime).
    std::vector<u64> rest;
    split_large(m, rest);
    std::sort(rest.begin(), rest.end());
    for (u64 p : rest) {
      if (!factors.empty() && factors.back().prime == p)
        ++factors.back().exponent;
      else
        factors.push_back({p, 1});
    }
  }
  return Factorization::from_canonical(n, std::move(factors));
}

u64 euler_phi(const Factorization& f) {
  u64 phi = 1;
  for (const auto& [p, e] : f.factors()) {
    phi = checked_mul(phi, p - 1);
    for (unsigned i = 1; i < e; ++i) phi = checked_mul(phi, p);
  }
  return phi;
}

u64 carmichael_prime_power(u64 p, unsigned e) {
  if (p == 2 && e >= 3) return u64{1} << (e - 2);
  u64 v = p - 1;
  for (unsigned i = 1; i < e; ++i) v = checked_mul(v, p);
  return v;
}

u64 carmichael(const Factorization& f) {
  u64 lambda = 1;
  for (const auto& [p, e] : f.factors()) lambda = checked_lcm(lambda, carmichael_prime_power(p, e));
  return lambda;
}

std::vector<u64> divisors(const Factorization& f, std::size_t cap) {
  const u64 count = f.divisor_count();
  if (count > cap)
    throw capacity_error(std::to_string(f.value()) + " has " + std::to_string(count) +
                         " divisors, above the cap of " + std::to_string(cap));
  std::vector<u64> out;
  out.reserve(count);
  out.push_back(1);
  for (const auto& [p, e] : f.factors()) {
    const std::size_t base = out.size();
    u64 pk = 1;
    for (unsigned k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<u64> divisors_up_to(const Factorization& f, u64 bound, std::size_t cap) {
  std::vector<u64> out;
  if (bound == 0) return out;
  out.push_back(1);
  for (const auto& [p, e] : f.factors()) {
    const std::size_t base = out.size();
    for (std::size_t i = 0; i < base; ++i) {
      u64 d = out[i];
      for (unsigned k = 1; k <= e; ++k) {
        if (d > bound / p) break;
        d *= p;
        out.push_back(d);
        if (out.size() > cap)
          throw capacity_error("more than " + std::to_string(cap) + " divisors of " +
                               std::to_string(f.value()) + " below " + std::to_string(bound));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

u64 largest_prime_factor(u64 n) {
  const Factorization f = factorize(n);
  return f.is_unit() ? 0 : f.factors().back().prime;
}

u64 multiplicative_order(u64 a, u64 n) {
  if (n == 0) throw domain_error("multiplicative_order: modulus must be positive");
  if (std::gcd(a, n) != 1)
    throw domain_error("multiplicative_order: gcd(" + std::to_string(a) + ", " + std::to_string(n) +
                       ") != 1");
  if (n == 1) return 1;
  u64 order = carmichael(factorize(n));
  const Factorization fo = factorize(order);
  for (const auto& [q, e] : fo.factors()) {
    for (unsigned i = 0; i < e; ++i) {
      if (pow_mod(a, order / q, n) != 1) break;
      order /= q;
    }
  }
  return order;
}

}  // namespace dense
