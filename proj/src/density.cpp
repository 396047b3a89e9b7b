#include "dense/density.hpp"

#include <algorithm>
#include <array>
#include <compare>

#include "dense/errors.hpp"
#include "dense/kernels.hpp"

namespace dense {

namespace {

// a*b*c <=> x*y*z without overflow.
std::strong_ordering compare_products(u64 a, u64 b, u64 c, u64 x, u64 y, u64 z) noexcept {
  auto widen = [](u64 p, u64 q, u64 r) {
    const u128 pq = static_cast<u128>(p) * q;
    const u128 t0 = static_cast<u128>(static_cast<u64>(pq)) * r;
    const u128 t1 = static_cast<u128>(static_cast<u64>(pq >> 64)) * r + (t0 >> 64);
    return std::array<u64, 3>{static_cast<u64>(t1 >> 64), static_cast<u64>(t1), static_cast<u64>(t0)};
  };
  return widen(a, b, c) <=> widen(x, y, z);
}

// d <= u * L for integer d and rational L.
bool within(u64 d, const Rational& u, const Rational& lower) noexcept {
  return compare_products(d, u.den(), lower.den(), u.num(), lower.num(), 1) <= 0;
}

// floor(u * r), saturating at UINT64_MAX.
u64 scaled_floor(const Rational& u, const Rational& r) noexcept {
  const u128 num = static_cast<u128>(u.num()) * r.num();
  const u128 den = static_cast<u128>(u.den()) * r.den();
  const u128 q = num / den;
  return q > UINT64_MAX ? UINT64_MAX : static_cast<u64>(q);
}

// Is lower (with the given inclusion) still inside the interval's upper end?
bool below_upper(const Rational& lower, bool lower_included, const Interval& I) noexcept {
  const auto c = lower <=> I.hi;
  return c < 0 || (c == 0 && lower_included && I.hi_closed);
}

}  // namespace

Interval Interval::closed(Rational lo, Rational hi) {
  if (lo < Rational(1)) throw domain_error("interval starts below 1: " + lo.to_string());
  if (lo > hi) throw domain_error("interval endpoints reversed: " + lo.to_string() + " > " + hi.to_string());
  return Interval{lo, hi, true, true};
}

Interval Interval::half_open(Rational lo, Rational hi) {
  if (lo < Rational(1)) throw domain_error("interval starts below 1: " + lo.to_string());
  if (lo > hi) throw domain_error("interval endpoints reversed: " + lo.to_string() + " > " + hi.to_string());
  return Interval{lo, hi, true, false};
}

bool Interval::empty() const noexcept {
  const auto c = lo <=> hi;
  return c > 0 || (c == 0 && !(lo_closed && hi_closed));
}

bool Interval::contains(const Rational& y) const noexcept {
  const auto a = y <=> lo;
  const auto b = y <=> hi;
  return (a > 0 || (a == 0 && lo_closed)) && (b < 0 || (b == 0 && hi_closed));
}

Rational max_divisor_ratio(const Factorization& f) {
  const auto divs = divisors(f);
  u64 best_num = 1, best_den = 1;
  for (std::size_t i = 0; i + 1 < divs.size(); ++i) {
    if (static_cast<u128>(divs[i + 1]) * best_den > static_cast<u128>(best_num) * divs[i]) {
      best_num = divs[i + 1];
      best_den = divs[i];
    }
  }
  return Rational(best_num, best_den);
}

bool is_dense(const Factorization& f, const Rational& u) {
  if (u < Rational(1)) throw domain_error("density ratio below 1");
  // prefix saturates once it passes 2^64; every later prime then fits.
  u128 prefix = 1;
  for (const auto& [p, e] : f.factors()) {
    if (prefix <= UINT64_MAX && compare_scaled(u, static_cast<u64>(prefix), p) < 0) return false;
    for (unsigned i = 0; i < e && prefix <= UINT64_MAX; ++i) prefix *= p;
  }
  return true;
}

bool is_dense_in_sorted(std::span<const u64> d, const Rational& u, const Interval& I) {
  if (u < Rational(1)) throw domain_error("density ratio below 1");
  if (I.lo < Rational(1)) throw domain_error("interval starts below 1");
  if (I.empty()) return true;
  if (d.empty() || d.front() != 1) throw domain_error("divisor list must start at 1");

  // Gap i is [d_i, d_{i+1}); only its leftmost point inside I matters.
  const std::size_t first =
      static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), I.lo,
                                                [](const Rational& v, u64 x) { return v < Rational(x); }) -
                               d.begin()) - 1;
  if (first + 1 == d.size()) return false;
  if (!within(d[first + 1], u, I.lo)) return false;

  // Later gaps start at a divisor d_i > lo; they meet I while d_i is below hi.
  std::size_t last = first;
  while (last + 1 < d.size() && below_upper(Rational(d[last + 1]), true, I)) ++last;
  if (last == first) return true;
  if (last + 1 == d.size()) return false;
  const auto run = d.subspan(first + 1, last - first + 1);
  return kernels::first_ratio_violation(run, u.num(), u.den()) == kernels::kNone;
}

bool is_dense_in(const Factorization& f, const Rational& u, const Interval& I) {
  if (I.lo < Rational(1)) throw domain_error("interval starts below 1");
  if (I.empty()) return true;
  const auto divs = divisors_up_to(f, scaled_floor(u, I.hi));
  return is_dense_in_sorted(divs, u, I);
}

namespace {

struct DivisorSearch {
  std::span<const PrimePower> factors;
  u64 y;
  u64 best;  // current upper bound, inclusive
  bool found = false;
  bool stop_at_first = false;

  void run(std::size_t k, u64 d) {
    if (d > y) {
      if (d <= best) {
        best = d;
        found = true;
      }
      return;
    }
    if (k == factors.size() || (stop_at_first && found)) return;
    const u64 p = factors[k].prime;
    u64 cur = d;
    run(k + 1, cur);
    for (unsigned a = 1; a <= factors[k].exponent; ++a) {
      if (cur > best / p) return;
      cur *= p;
      run(k + 1, cur);
      if (stop_at_first && found) return;
    }
  }
};

}  // namespace

std::optional<u64> divisor_in(const Factorization& f, u64 y, u64 z) {
  if (y >= z) throw domain_error("divisor_in needs y < z");
  DivisorSearch s{f.factors(), y, z};
  s.run(0, 1);
  if (!s.found) return std::nullopt;
  return s.best;
}

bool has_divisor_in(const Factorization& f, u64 y, u64 z) {
  if (y >= z) throw domain_error("has_divisor_in needs y < z");
  DivisorSearch s{f.factors(), y, z};
  s.stop_at_first = true;
  s.run(0, 1);
  return s.found;
}

u64 DensityCertificate::chain_product() const {
  u64 p = 1;
  for (u64 m : chain) p = checked_mul(p, m);
  return p;
}

u64 DensityCertificate::right_endpoint() const { return checked_mul(chain_product(), y); }

DensityCertificate extend_certificate(const DensityCertificate& cert, u64 m_next) {
  if (m_next == 0) throw certificate_error("chain entries must be positive");
  const u64 prefix = cert.chain_product();
  if (static_cast<u128>(m_next) * cert.h > static_cast<u128>(cert.y) * prefix)
    throw certificate_error("m = " + std::to_string(m_next) + " exceeds (y/h) * prefix = " +
                            Rational(cert.y).times(prefix).to_string() + "/" + std::to_string(cert.h));
  DensityCertificate next = cert;
  next.chain.push_back(m_next);
  next.right_endpoint();  // overflow check
  return next;
}

std::string_view to_string(CertificateStatus status) noexcept {
  switch (status) {
    case CertificateStatus::valid: return "valid";
    case CertificateStatus::bad_parameters: return "bad_parameters";
    case CertificateStatus::overflow: return "overflow";
    case CertificateStatus::not_divisor: return "not_divisor";
    case CertificateStatus::base_not_dense: return "base_not_dense";
    case CertificateStatus::chain_inequality: return "chain_inequality";
  }
  return "unknown";
}

CertificateVerdict verify_certificate(const DensityCertificate& cert, const Factorization& target) {
  using S = CertificateStatus;
  if (cert.h == 0 || cert.base == 0 || cert.y < cert.h || cert.h == UINT64_MAX) return {S::bad_parameters};
  u128 product = cert.base;
  u128 prefix = 1;
  for (u64 m : cert.chain) {
    if (m == 0) return {S::bad_parameters};
    if (static_cast<u128>(m) * cert.h > static_cast<u128>(cert.y) * prefix) return {S::chain_inequality};
    prefix *= m;
    product *= m;
    if (product > UINT64_MAX) return {S::overflow};
  }
  if (prefix * cert.y > UINT64_MAX) return {S::overflow};
  if (target.value() % static_cast<u64>(product) != 0) return {S::not_divisor};
  const Interval base_range = Interval::closed(Rational(cert.h), Rational(cert.y));
  if (!is_dense_in(factorize(cert.base), cert.ratio(), base_range)) return {S::base_not_dense};
  return {S::valid};
}

std::optional<u64> largest_dense_prefix(std::span<const u64> d, const Rational& u, u64 h) {
  if (h == 0 || d.empty()) return std::nullopt;
  const Rational lo(h);
  std::size_t i = static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), h) - d.begin()) - 1;
  // First gap starts at h itself.
  if (i + 1 == d.size() || !within(d[i + 1], u, lo)) return std::nullopt;
  for (++i; i + 1 < d.size(); ++i) {
    if (static_cast<u128>(d[i + 1]) * u.den() > static_cast<u128>(u.num()) * d[i]) return d[i] - 1;
  }
  // Nothing lies above the largest divisor.
  return d.back() - 1;
}

std::optional<DensityCertificate> find_certificate(const Factorization& f, u64 h, u64 seed_bound) {
  if (h == 0) throw domain_error("h must be positive");
  constexpr u64 kSeedDivisorCap = u64{1} << 16;
  const Rational u = Rational::one_plus_inverse(h);

  std::vector<PrimePower> seed;
  std::vector<u64> rest;  // primes outside the seed, with multiplicity
  u64 seed_value = 1;
  u64 seed_divisors = 1;
  for (const auto& [p, e] : f.factors()) {
    u64 pe = 1;
    bool fits = true;
    for (unsigned i = 0; i < e && fits; ++i) fits = !__builtin_mul_overflow(pe, p, &pe);
    if (fits && pe <= seed_bound && seed_divisors * (e + 1) <= kSeedDivisorCap) {
      seed.push_back({p, e});
      seed_value *= pe;
      seed_divisors *= e + 1;
    } else {
      rest.insert(rest.end(), e, p);
    }
  }

  const Factorization seed_f = Factorization::from_canonical(seed_value, seed);
  const auto y = largest_dense_prefix(divisors(seed_f), u, h);
  if (!y) return std::nullopt;

  DensityCertificate cert{seed_value, h, *y, {}};
  u128 prefix = 1;
  for (u64 p : rest) {
    if (static_cast<u128>(p) * h > static_cast<u128>(*y) * prefix) break;
    if (prefix * *y * p > UINT64_MAX) break;
    prefix *= p;
    cert.chain.push_back(p);
  }
  if (cert.right_endpoint() <= h) return std::nullopt;
  return cert;
}

}  // namespace dense
