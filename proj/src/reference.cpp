#include "dense/reference.hpp"

#include <algorithm>

#include "dense/thresholds.hpp"

namespace dense::reference {

namespace {

u64 phi_of(u64 n) { return euler_phi(factorize(n)); }
u64 lambda_of(u64 n) { return carmichael(factorize(n)); }

bool has_prime_in(u64 m, u64 a, u64 b) {
  const Factorization f = factorize(m);
  for (const auto& pp : f.factors())
    if (pp.prime > a && pp.prime <= b) return true;
  return false;
}

}  // namespace

u64 next_divisor(const std::vector<u64>& divs, const Rational& y) {
  for (u64 d : divs)
    if (Rational(d) > y) return d;
  return 0;
}

bool dense_in_by_sweep(u64 m, const Rational& u, const Interval& I) {
  if (I.empty()) return true;
  const auto divs = divisors(factorize(m));
  std::vector<Rational> critical{I.lo};
  for (u64 d : divs)
    if (I.contains(Rational(d))) critical.emplace_back(d);
  for (const Rational& y : critical) {
    const u64 next = next_divisor(divs, y);
    if (next == 0) return false;
    // next <= u * y
    const u128 lhs = static_cast<u128>(next) * u.den() * y.den();
    const u128 rhs = static_cast<u128>(u.num()) * y.num();
    if (lhs > rhs) return false;
  }
  return true;
}

bool dense_by_sweep(u64 m, const Rational& u) {
  if (m == 1) return true;
  return dense_in_by_sweep(m, u, Interval::half_open(Rational(1), Rational(m)));
}

bool density_hit(u64 n, u64 x, const Rational& u, const IntervalSpec& spec, Target target) {
  auto check = [&](u64 v) {
    if (const auto* b = std::get_if<BoundedRange>(&spec)) {
      const u64 top = floor_pow(x, b->c);
      return top < b->h || dense_in_by_sweep(v, u, Interval::closed(Rational(b->h), Rational(top)));
    }
    return dense_by_sweep(v, u);
  };
  bool ok = true;
  if (target != Target::lambda) ok = check(phi_of(n));
  if (ok && target != Target::phi) ok = check(lambda_of(n));
  return ok;
}

bool full_range_hit(u64 n, u64 h) {
  const Rational u = Rational::one_plus_inverse(h);
  auto check = [&](u64 v) {
    const Rational top(v, h + 1);
    return top <= Rational(h) || dense_in_by_sweep(v, u, Interval::half_open(Rational(h), top));
  };
  return check(phi_of(n)) && check(lambda_of(n));
}

bool b_hit(u64 n, u64 y, u64 z) {
  const auto divs = divisors(factorize(phi_of(n)));
  return std::any_of(divs.begin(), divs.end(), [&](u64 d) { return d > y && d <= z; });
}

bool nondense_hit(u64 n, u64 x, const Rational& c) {
  const Rational u(floor_pow(x, c));
  return !dense_by_sweep(phi_of(n), u) && !dense_by_sweep(lambda_of(n), u);
}

bool gap_hit(u64 n, u64 x, const Rational& g, const Rational& eps) {
  const Rational top(g.num() * (eps.den() + eps.num()), g.den() * eps.den());
  return !has_prime_in(phi_of(n), floor_pow(x, g), floor_pow(x, top));
}

bool shifted_hit(u64 p, u64 a, u64 b) { return !has_prime_in(p - 1, a, b); }

bool landau_hit(u64 n, u64 D) {
  const Factorization f = factorize(n);
  for (const auto& pp : f.factors())
    if (pp.prime % D == 1 % D) return false;
  return true;
}

bool phi_ratio_hit(u64 n, const Rational& eps) {
  return static_cast<u128>(phi_of(n)) * eps.den() <= static_cast<u128>(eps.num()) * n;
}

bool theta_hit(u64 p, const Rational& c) {
  const u64 big = largest_prime_factor(p - 1);
  return big > 0 && exceeds_power(big, p, c);
}

}  // namespace dense::reference
