#include "dense/thresholds.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "dense/arith.hpp"
#include "dense/errors.hpp"

namespace dense {

namespace {

// a^q == b^p, both sides > 1.
bool equal_powers(u64 a, u64 q, u64 b, u64 p) {
  const Factorization fa = factorize(a);
  const Factorization fb = factorize(b);
  if (fa.size() != fb.size()) return false;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    const auto& x = fa.factors()[i];
    const auto& y = fb.factors()[i];
    if (x.prime != y.prime) return false;
    if (static_cast<u128>(x.exponent) * q != static_cast<u128>(y.exponent) * p) return false;
  }
  return true;
}

}  // namespace

std::strong_ordering compare_powers(u64 a, u64 q, u64 b, u64 p) {
  // Degenerate bases and exponents first: x^0 = 1, 0^k = 0 (k > 0), 1^k = 1.
  const int lhs_kind = q == 0 ? 1 : (a == 0 ? 0 : (a == 1 ? 1 : 2));
  const int rhs_kind = p == 0 ? 1 : (b == 0 ? 0 : (b == 1 ? 1 : 2));
  if (lhs_kind != 2 || rhs_kind != 2) {
    if (lhs_kind != rhs_kind) return lhs_kind <=> rhs_kind;
    return std::strong_ordering::equal;
  }
  const long double la = static_cast<long double>(q) * std::log(static_cast<long double>(a));
  const long double lb = static_cast<long double>(p) * std::log(static_cast<long double>(b));
  const long double tol = 1e-16L * (la + lb);
  if (la - lb > tol) return std::strong_ordering::greater;
  if (lb - la > tol) return std::strong_ordering::less;
  if (equal_powers(a, q, b, p)) return std::strong_ordering::equal;

  using big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>>;
  const big diff = big(q) * log(big(a)) - big(p) * log(big(b));
  return diff > 0 ? std::strong_ordering::greater : std::strong_ordering::less;
}

u64 floor_pow(u64 x, const Rational& c) {
  if (x == 0) throw domain_error("floor_pow: base must be positive");
  if (c.num() == 0 || x == 1) return 1;
  const long double guess = std::exp(c.to_double() * std::log(static_cast<long double>(x)));
  u64 t = guess >= 1.8e19L ? UINT64_MAX - 1 : static_cast<u64>(guess);
  if (t == 0) t = 1;
  // t^den <= x^num  <=>  t <= x^c
  while (t > 1 && compare_powers(t, c.den(), x, c.num()) > 0) --t;
  while (t < UINT64_MAX && compare_powers(t + 1, c.den(), x, c.num()) <= 0) ++t;
  return t;
}

}  // namespace dense
