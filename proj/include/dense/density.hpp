#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dense/arith.hpp"
#include "dense/rational.hpp"

namespace dense {

// Real interval with exact endpoints, lo >= 1. Empty when lo > hi, or
// lo == hi without both ends closed.
struct Interval {
  Rational lo{1};
  Rational hi{1};
  bool lo_closed = true;
  bool hi_closed = true;

  static Interval closed(Rational lo, Rational hi);
  static Interval half_open(Rational lo, Rational hi);  // [lo, hi)

  bool empty() const noexcept;
  bool contains(const Rational& y) const noexcept;
};

// Largest d_{i+1}/d_i over consecutive divisors; 1 for the unit.
Rational max_divisor_ratio(const Factorization& f);

// Every interval (y, uy] with 1 <= y < m holds a divisor of m. Decided from
// the prime factorization: with primes p_1 < ... < p_k, m is u-dense iff
// p_j <= u * p_1^e_1 ... p_{j-1}^e_{j-1} for all j.
bool is_dense(const Factorization& f, const Rational& u);

// For every real y in I, (y, uy] holds a divisor of f.value().
bool is_dense_in(const Factorization& f, const Rational& u, const Interval& interval);

// Same predicate over an ascending divisor list. The list may be truncated to
// the divisors <= floor(u * interval.hi) without changing the verdict.
bool is_dense_in_sorted(std::span<const u64> divisors, const Rational& u, const Interval& interval);

// Smallest divisor d with y < d <= z, found by a pruned search over the
// factorization; nullopt if none (or y >= z).
std::optional<u64> divisor_in(const Factorization& f, u64 y, u64 z);
// Existence only; stops at the first hit.
bool has_divisor_in(const Factorization& f, u64 y, u64 z);

// Base D dense with ratio 1 + 1/h on [h, y], plus a chain m_1..m_k with
// m_j <= (y/h) m_1...m_{j-1}. Certifies D m_1...m_k is (1+1/h)-dense on
// [h, m_1...m_k y].
struct DensityCertificate {
  u64 base = 1;
  u64 h = 1;
  u64 y = 1;
  std::vector<u64> chain;

  // m_1...m_k; throws arithmetic_error on overflow.
  u64 chain_product() const;
  // m_1...m_k * y; throws arithmetic_error on overflow.
  u64 right_endpoint() const;
  Rational ratio() const { return Rational::one_plus_inverse(h); }
  Interval claimed_range() const { return Interval::closed(Rational(h), Rational(right_endpoint())); }

  friend bool operator==(const DensityCertificate&, const DensityCertificate&) = default;
};

// Throws certificate_error when m_next * h > y * m_1...m_k.
DensityCertificate extend_certificate(const DensityCertificate& cert, u64 m_next);

enum class CertificateStatus {
  valid,
  bad_parameters,   // h = 0, y < h, or a zero entry
  overflow,         // base * chain does not fit 64 bits
  not_divisor,      // base * chain does not divide the target
  base_not_dense,   // base fails the predicate on [h, y]
  chain_inequality  // some m_j exceeds (y/h) m_1...m_{j-1}
};

std::string_view to_string(CertificateStatus status) noexcept;

struct CertificateVerdict {
  CertificateStatus status = CertificateStatus::valid;
  explicit operator bool() const noexcept { return status == CertificateStatus::valid; }
};

CertificateVerdict verify_certificate(const DensityCertificate& cert, const Factorization& target);

// Largest integer y >= h with the sorted divisor list dense (ratio u) on
// [h, y]; nullopt when even [h, h] fails.
std::optional<u64> largest_dense_prefix(std::span<const u64> divisors, const Rational& u, u64 h);

// Greedy search: seed with the prime powers of f not above seed_bound, take
// the longest dense prefix, then absorb the remaining primes in ascending
// order while the chain inequality holds. Returns a certificate only when
// it covers more than the single point h. A miss proves nothing.
std::optional<DensityCertificate> find_certificate(const Factorization& f, u64 h, u64 seed_bound);

}  // namespace dense
