#pragma once

// Slow, direct evaluations of every experiment predicate from the
// single-integer arithmetic only: factorize, phi, lambda and full divisor
// lists scanned linearly. No sieve tables, no factor table, no prefix
// criterion. Used by the CLI self-test and as a cross-check in tests.

#include <cstdint>
#include <vector>

#include "dense/density.hpp"
#include "dense/experiments.hpp"

namespace dense::reference {

// Least divisor of m strictly greater than y, or 0 if none.
u64 next_divisor(const std::vector<u64>& divs, const Rational& y);

// Real-y sweep over the critical points {lo} and every divisor inside I.
bool dense_in_by_sweep(u64 m, const Rational& u, const Interval& interval);
// Global u-density by the same sweep over [1, m).
bool dense_by_sweep(u64 m, const Rational& u);

bool density_hit(u64 n, u64 x, const Rational& u, const IntervalSpec& spec, Target target);
bool full_range_hit(u64 n, u64 h);
bool b_hit(u64 n, u64 y, u64 z);
bool nondense_hit(u64 n, u64 x, const Rational& c);
bool gap_hit(u64 n, u64 x, const Rational& g, const Rational& eps);
bool shifted_hit(u64 p, u64 a, u64 b);
bool landau_hit(u64 n, u64 D);
bool phi_ratio_hit(u64 n, const Rational& eps);
// P+(p-1) > p^c.
bool theta_hit(u64 p, const Rational& c);

}  // namespace dense::reference
