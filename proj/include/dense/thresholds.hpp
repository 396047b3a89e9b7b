#pragma once

#include <compare>
#include <cstdint>

#include "dense/rational.hpp"

namespace dense {

// a^q <=> b^p. Decided from extended-precision logarithms when they are
// clearly apart; otherwise equality is checked exactly on the prime
// factorizations and a remaining near-tie is settled at 200 digits.
std::strong_ordering compare_powers(u64 a, u64 q, u64 b, u64 p);

// floor(x^c) for x >= 1 and rational c >= 0.
u64 floor_pow(u64 x, const Rational& c);

// value > base^c, for integer value.
inline bool exceeds_power(u64 value, u64 base, const Rational& c) {
  return compare_powers(value, c.den(), base, c.num()) > 0;
}

}  // namespace dense
