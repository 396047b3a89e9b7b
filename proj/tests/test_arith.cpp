#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "dense/arith.hpp"
#include "dense/errors.hpp"

using namespace dense;

namespace {

u64 coprime_count(u64 n) {
  u64 c = 0;
  for (u64 a = 1; a <= n; ++a) c += std::gcd(a, n) == 1;
  return c;
}

// Order by repeated multiplication; independent of multiplicative_order.
u64 naive_order(u64 a, u64 n) {
  if (n == 1) return 1;
  u64 t = 1, v = a % n;
  while (v != 1) {
    v = v * a % n;
    ++t;
  }
  return t;
}

std::vector<u64> naive_divisors(u64 n) {
  std::vector<u64> out;
  for (u64 d = 1; d <= n; ++d)
    if (n % d == 0) out.push_back(d);
  return out;
}

}  // namespace

TEST_CASE("factorize examples") {
  CHECK(factorize(1).is_unit());
  CHECK(factorize(12).size() == 2);
  CHECK(factorize(12) == Factorization(12, {{2, 2}, {3, 1}}));
  CHECK(factorize(97) == Factorization(97, {{97, 1}}));
  CHECK_THROWS_AS(factorize(0), domain_error);
}

TEST_CASE("factorize large inputs") {
  const u64 p = 4294967291, q = 4294967279;  // largest primes below 2^32
  CHECK(factorize(p * q) == Factorization(p * q, {{q, 1}, {p, 1}}));
  CHECK(factorize(u64{1} << 63) == Factorization(u64{1} << 63, {{2, 63}}));
  const u64 big_prime = 18446744073709551557ull;  // largest prime below 2^64
  CHECK(factorize(big_prime) == Factorization(big_prime, {{big_prime, 1}}));
  const u64 sq = 4294967291ull * 4294967291ull;
  CHECK(factorize(sq) == Factorization(sq, {{4294967291ull, 2}}));

  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const u64 n = rng() | 1;
    const auto f = factorize(n);
    u64 prod = 1;
    for (const auto& [pr, e] : f.factors()) {
      CHECK(is_prime(pr));
      for (unsigned k = 0; k < e; ++k) prod *= pr;
    }
    CHECK(prod == n);
    CHECK(std::is_sorted(f.factors().begin(), f.factors().end(),
                         [](auto a, auto b) { return a.prime < b.prime; }));
  }
}

TEST_CASE("Factorization rejects malformed input") {
  CHECK_THROWS_AS(Factorization(12, {{3, 1}, {2, 2}}), domain_error);
  CHECK_THROWS_AS(Factorization(12, {{2, 1}, {3, 1}}), domain_error);
  CHECK_THROWS_AS(Factorization(4, {{4, 1}}), domain_error);
}

TEST_CASE("phi and lambda examples") {
  CHECK(euler_phi(factorize(1)) == 1);
  CHECK(euler_phi(factorize(12)) == 4);
  CHECK(euler_phi(factorize(7)) == 6);
  CHECK(carmichael(factorize(8)) == 2);
  CHECK(carmichael(factorize(12)) == 2);
  CHECK(carmichael(factorize(1)) == 1);
  CHECK(carmichael(factorize(4)) == 2);
  CHECK(carmichael(factorize(16)) == 4);
  CHECK(carmichael(factorize(561)) == 80);
}

TEST_CASE("phi and lambda overflow") {
  // Valid factorization whose lambda exceeds 64 bits.
  std::vector<PrimePower> ps = {{4294967279ull, 1}, {4294967291ull, 1}};
  const auto f = Factorization::from_canonical(4294967279ull * 4294967291ull, ps);
  CHECK_NOTHROW(euler_phi(f));
  CHECK_THROWS_AS(checked_mul(u64{1} << 32, u64{1} << 32), arithmetic_error);
  CHECK_THROWS_AS(checked_lcm(18446744073709551557ull, 18446744073709551533ull), arithmetic_error);
}

TEST_CASE("phi and lambda against brute force, n <= 600") {
  for (u64 n = 1; n <= 600; ++n) {
    const auto f = factorize(n);
    REQUIRE(euler_phi(f) == coprime_count(n));
    u64 max_order = 1;
    std::set<u64> orders;
    for (u64 a = 1; a <= n; ++a) {
      if (std::gcd(a, n) != 1) continue;
      const u64 o = naive_order(a, n);
      orders.insert(o);
      max_order = std::max(max_order, o);
    }
    const u64 lam = carmichael(f);
    REQUIRE(lam == max_order);
    // Every divisor of lambda(n) occurs as an element order.
    const auto divs = naive_divisors(lam);
    REQUIRE(orders == std::set<u64>(divs.begin(), divs.end()));
  }
}

TEST_CASE("lambda divides phi and shares its primes") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20000; ++i) {
    const u64 n = 1 + rng() % 1000000000;
    const auto f = factorize(n);
    const u64 phi = euler_phi(f), lam = carmichael(f);
    REQUIRE(phi % lam == 0);
    std::vector<u64> a, b;
    const auto fp = factorize(phi), fl = factorize(lam);
    for (auto pp : fp.factors()) a.push_back(pp.prime);
    for (auto pp : fl.factors()) b.push_back(pp.prime);
    REQUIRE(a == b);
  }
}

TEST_CASE("divisors") {
  CHECK(divisors(factorize(6)) == std::vector<u64>{1, 2, 3, 6});
  CHECK(divisors(factorize(1)) == std::vector<u64>{1});
  CHECK(divisors(factorize(36)) == std::vector<u64>{1, 2, 3, 4, 6, 9, 12, 18, 36});
  for (u64 n = 1; n <= 3000; ++n) {
    const auto f = factorize(n);
    const auto d = divisors(f);
    REQUIRE(d == naive_divisors(n));
    REQUIRE(d.size() == f.divisor_count());
  }
  // 2^10 * 3^10 has 121 divisors.
  const auto f = factorize(59049ull * 1024);
  CHECK_THROWS_AS(divisors(f, 120), capacity_error);
  CHECK(divisors(f, 121).size() == 121);
  const auto small = divisors_up_to(f, 100);
  std::vector<u64> expect;
  for (u64 d : divisors(f))
    if (d <= 100) expect.push_back(d);
  CHECK(small == expect);
}

TEST_CASE("largest prime factor") {
  CHECK(largest_prime_factor(1) == 0);
  CHECK(largest_prime_factor(12) == 3);
  CHECK(largest_prime_factor(46) == 23);
}

TEST_CASE("multiplicative order") {
  CHECK(multiplicative_order(1, 9) == 1);
  CHECK(multiplicative_order(3, 8) == 2);
  CHECK(multiplicative_order(2, 7) == 3);
  CHECK_THROWS_AS(multiplicative_order(2, 8), domain_error);
  for (u64 n = 2; n <= 400; ++n)
    for (u64 a = 1; a < n; ++a)
      if (std::gcd(a, n) == 1) REQUIRE(multiplicative_order(a, n) == naive_order(a, n));
}

TEST_CASE("is_prime") {
  CHECK(is_prime(2));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(0));
  CHECK_FALSE(is_prime(3215031751ull));
  CHECK(factorize(3215031751ull) == Factorization(3215031751ull, {{151, 1}, {751, 1}, {28351, 1}}));
  // Strong pseudoprime to bases 2..37 (Jiang and Deng).
  CHECK_FALSE(is_prime(3825123056546413051ull));
  CHECK(is_prime(18446744073709551557ull));

  // Trial-division oracle below 10^6.
  std::vector<bool> composite(1000001, false);
  for (u64 i = 2; i * i <= 1000000; ++i)
    if (!composite[i])
      for (u64 j = i * i; j <= 1000000; j += i) composite[j] = true;
  for (u64 n = 2; n <= 1000000; ++n) REQUIRE(is_prime(n) == !composite[n]);
}

TEST_CASE("mul_mod and pow_mod") {
  const u64 m = 18446744073709551557ull;
  CHECK(mul_mod(m - 1, m - 1, m) == 1);
  CHECK(pow_mod(2, m - 1, m) == 1);
  CHECK(isqrt(UINT64_MAX) == 4294967295ull);
  CHECK(isqrt(15) == 3);
  CHECK(isqrt(16) == 4);
}
