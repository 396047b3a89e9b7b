#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dense/rational.hpp"
#include "dense/sieve.hpp"

namespace dense {

inline constexpr std::size_t kWitnessCap = 64;

// One experiment over n <= x (or primes p <= x).
struct ScanResult {
  std::string experiment_id;
  u64 x = 0;
  std::map<std::string, std::string> parameters;
  u64 total = 0;
  u64 hits = 0;
  std::vector<u64> witnesses;  // first hits, ascending, at most kWitnessCap
  std::vector<u64> misses;     // first non-hits, ascending, at most kWitnessCap
  u64 elapsed_ms = 0;

  // hits/total in lowest terms; 0 when total is 0.
  Rational fraction() const { return total == 0 ? Rational(0) : Rational(hits, total); }

  friend bool operator==(const ScanResult&, const ScanResult&) = default;
};

struct ScanOptions {
  unsigned workers = 1;
  u64 segment_length = kDefaultSegmentLength;
  std::optional<std::filesystem::path> cache_path;
  // Called after each finished segment with (done, total); may be invoked
  // from several workers at once.
  std::function<void(u64, u64)> progress;
};

// Shared state for scans over n <= x: sieve settings and a factor table for
// values below x + 1, built on first use.
class ScanContext {
 public:
  explicit ScanContext(u64 x, ScanOptions options = {});

  u64 x() const noexcept { return x_; }
  const ScanOptions& options() const noexcept { return options_; }
  SieveConfig sieve_config() const;
  const FactorTable& factor_table() const;

 private:
  u64 x_;
  ScanOptions options_;
  mutable std::once_flag table_once_;
  mutable std::unique_ptr<FactorTable> table_;
};

enum class Target { phi, lambda, both };

std::string_view to_string(Target t) noexcept;
Target parse_target(std::string_view s);

// Full u-density.
struct GlobalRange {};
// Density on [h, floor(x^c)].
struct BoundedRange {
  u64 h = 1;
  Rational c;
};
using IntervalSpec = std::variant<GlobalRange, BoundedRange>;

// Counts n <= x whose target value(s) are u-dense on the given range.
ScanResult scan_density(const ScanContext& ctx, const Rational& u, const IntervalSpec& spec, Target target);

// Counts n <= x with phi(n) dense on [h, phi(n)/(h+1)) and lambda(n) dense
// on [h, lambda(n)/(h+1)), ratio 1 + 1/h.
ScanResult scan_full_range_density(const ScanContext& ctx, u64 h);

// B(x, y, z): n <= x with a divisor of phi(n) in (y, z].
ScanResult count_B(const ScanContext& ctx, u64 y, u64 z);

// n <= x with neither phi(n) nor lambda(n) floor(x^c)-dense.
ScanResult nondense_scan(const ScanContext& ctx, const Rational& c);

struct ThetaRow {
  Rational c;
  u64 prime_count = 0;
  u64 qualifying_count = 0;
};

struct ThetaProfile {
  u64 x = 0;
  std::vector<ThetaRow> grid;  // ascending c
  u64 elapsed_ms = 0;
};

// For each c, primes p <= x with P+(p - 1) > p^c.
ThetaProfile theta_profile(const ScanContext& ctx, std::vector<Rational> c_grid);

// n <= x whose phi(n) has no prime factor in (x^g, x^{g(1+eps)}].
ScanResult phi_prime_gap_scan(const ScanContext& ctx, const Rational& g, const Rational& eps);

// Primes p <= w (= ctx.x()) whose p - 1 has no prime factor in (a, b].
ScanResult shifted_prime_scan(const ScanContext& ctx, u64 a, u64 b);

struct DistributionSummary {
  double mean = 0;
  double median = 0;
  std::array<double, 9> deciles{};  // 10%, 20%, ..., 90%
};

struct OmegaProfile {
  u64 x = 0;
  u64 count = 0;  // n in [3, x]
  DistributionSummary omega;  // Omega(phi(n))
  DistributionSummary ratio;  // Omega(phi(n)) / ((ln ln n)^2 / 2)
  u64 elapsed_ms = 0;
};

OmegaProfile omega_phi_profile(const ScanContext& ctx);

// n <= x with no prime factor q = 1 (mod D).
ScanResult landau_scan(const ScanContext& ctx, u64 D);

// n <= x with phi(n) <= eps * n.
ScanResult phi_ratio_small(const ScanContext& ctx, const Rational& eps);

// Single pass: the global 2-density scan for phi and lambda together with
// B(x, y, 2y) for each y.
std::vector<ScanResult> density_pipeline(const ScanContext& ctx, const std::vector<u64>& ys);

}  // namespace dense
