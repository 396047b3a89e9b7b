#include "dense/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iterator>
#include <numeric>

#include "dense/density.hpp"
#include "dense/errors.hpp"
#include "dense/kernels.hpp"
#include "dense/thresholds.hpp"

namespace dense {

namespace {

using Clock = std::chrono::steady_clock;

u64 elapsed_since(Clock::time_point start) {
  return static_cast<u64>(
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count());
}

std::vector<u64> merge_capped(const std::vector<u64>& a, const std::vector<u64>& b) {
  std::vector<u64> out;
  out.reserve(std::min(a.size() + b.size(), kWitnessCap));
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  if (out.size() > kWitnessCap) out.resize(kWitnessCap);
  return out;
}

// Associative, commutative partial count for one metric.
struct Tally {
  u64 total = 0;
  u64 hits = 0;
  std::vector<u64> witnesses;
  std::vector<u64> misses;

  void record(u64 n, bool hit) {
    ++total;
    if (hit) {
      ++hits;
      if (witnesses.size() < kWitnessCap) witnesses.push_back(n);
    } else if (misses.size() < kWitnessCap) {
      misses.push_back(n);
    }
  }

  void merge(const Tally& o) {
    total += o.total;
    hits += o.hits;
    witnesses = merge_capped(witnesses, o.witnesses);
    misses = merge_capped(misses, o.misses);
  }

  ScanResult to_result(std::string id, u64 x, std::map<std::string, std::string> params) const {
    ScanResult r;
    r.experiment_id = std::move(id);
    r.x = x;
    r.parameters = std::move(params);
    r.total = total;
    r.hits = hits;
    r.witnesses = witnesses;
    r.misses = misses;
    return r;
  }
};

// Concurrent delivery plus progress reporting.
void for_each_segment(const ScanContext& ctx, const SegmentConsumer& fn) {
  SieveConfig cfg = ctx.sieve_config();
  cfg.delivery = Delivery::concurrent;
  const u64 total = segment_count(cfg);
  std::atomic<u64> done{0};
  const auto& progress = ctx.options().progress;
  iterate_segments(cfg, [&](const SieveSegment& seg) {
    fn(seg);
    const u64 finished = done.fetch_add(1) + 1;
    if (progress) progress(finished, total);
  });
}

// Runs eval(segment, n, hits) for every n in [1, x]; hits has one slot per
// metric. Segments are processed in parallel and folded under a lock.
template <typename Eval>
std::vector<Tally> tally_segments(const ScanContext& ctx, std::size_t metrics, Eval&& eval) {
  std::vector<Tally> global(metrics);
  std::mutex mu;
  for_each_segment(ctx, [&](const SieveSegment& seg) {
    std::vector<Tally> local(metrics);
    std::vector<char> hit(metrics);
    for (u64 n = seg.lo; n < seg.hi; ++n) {
      std::fill(hit.begin(), hit.end(), 0);
      eval(seg, n, hit.data());
      for (std::size_t k = 0; k < metrics; ++k) local[k].record(n, hit[k] != 0);
    }
    std::lock_guard lock(mu);
    for (std::size_t k = 0; k < metrics; ++k) global[k].merge(local[k]);
  });
  return global;
}

std::string str(u64 v) { return std::to_string(v); }

}  // namespace

ScanContext::ScanContext(u64 x, ScanOptions options) : x_(x), options_(std::move(options)) {
  if (x_ == 0) throw domain_error("scan limit x must be positive");
  if (x_ >= FactorTable::kMaxLimit) throw domain_error("scan limit x must be below 2^32");
}

SieveConfig ScanContext::sieve_config() const {
  SieveConfig cfg;
  cfg.limit = x_ + 1;
  cfg.segment_length = options_.segment_length;
  cfg.worker_count = options_.workers;
  cfg.cache_path = options_.cache_path;
  return cfg;
}

const FactorTable& ScanContext::factor_table() const {
  std::call_once(table_once_, [this] { table_ = std::make_unique<FactorTable>(x_ + 1); });
  return *table_;
}

std::string_view to_string(Target t) noexcept {
  switch (t) {
    case Target::phi: return "phi";
    case Target::lambda: return "lambda";
    case Target::both: return "both";
  }
  return "unknown";
}

Target parse_target(std::string_view s) {
  if (s == "phi") return Target::phi;
  if (s == "lambda") return Target::lambda;
  if (s == "both") return Target::both;
  throw domain_error("unknown target '" + std::string(s) + "'");
}

ScanResult scan_density(const ScanContext& ctx, const Rational& u, const IntervalSpec& spec, Target target) {
  if (u < Rational(1)) throw domain_error("density ratio u must be at least 1");
  const auto start = Clock::now();
  const FactorTable& table = ctx.factor_table();
  std::map<std::string, std::string> params{{"u", u.to_string()}, {"target", std::string(to_string(target))}};

  std::optional<Interval> range;
  if (const auto* b = std::get_if<BoundedRange>(&spec)) {
    if (b->h == 0) throw domain_error("interval [h, x^c] needs h >= 1");
    const u64 top = floor_pow(ctx.x(), b->c);
    params["range"] = "bounded";
    params["h"] = str(b->h);
    params["c"] = b->c.to_string();
    params["upper"] = str(top);
    // top < h leaves nothing to check; every value qualifies vacuously.
    if (top >= b->h) range = Interval::closed(Rational(b->h), Rational(top));
  } else {
    params["range"] = "global";
  }

  const bool vacuous = std::holds_alternative<BoundedRange>(spec) && !range;
  auto dense_value = [&](u64 v) {
    if (vacuous) return true;
    const Factorization f = table.factor(v);
    return range ? is_dense_in(f, u, *range) : is_dense(f, u);
  };
  auto tallies = tally_segments(ctx, 1, [&](const SieveSegment& seg, u64 n, char* hit) {
    bool ok = true;
    if (target != Target::lambda) ok = dense_value(seg.phi_of(n));
    if (ok && target != Target::phi) ok = dense_value(seg.lambda_of(n));
    hit[0] = ok;
  });
  ScanResult r = tallies[0].to_result("scan_density", ctx.x(), std::move(params));
  r.elapsed_ms = elapsed_since(start);
  return r;
}

ScanResult scan_full_range_density(const ScanContext& ctx, u64 h) {
  if (h == 0) throw domain_error("h must be positive");
  const auto start = Clock::now();
  const FactorTable& table = ctx.factor_table();
  const Rational u = Rational::one_plus_inverse(h);

  auto dense_below_share = [&](u64 v) {
    // [h, v/(h+1)) is empty when v/(h+1) <= h.
    const Rational top(v, h + 1);
    if (top <= Rational(h)) return true;
    return is_dense_in(table.factor(v), u, Interval::half_open(Rational(h), top));
  };
  auto tallies = tally_segments(ctx, 1, [&](const SieveSegment& seg, u64 n, char* hit) {
    hit[0] = dense_below_share(seg.phi_of(n)) && dense_below_share(seg.lambda_of(n));
  });
  ScanResult r = tallies[0].to_result("scan_full_range_density", ctx.x(),
                                      {{"h", str(h)}, {"u", u.to_string()}});
  r.elapsed_ms = elapsed_since(start);
  return r;
}

ScanResult count_B(const ScanContext& ctx, u64 y, u64 z) {
  if (y >= z) throw domain_error("count_B needs y < z");
  const auto start = Clock::now();
  const FactorTable& table = ctx.factor_table();
  auto tallies = tally_segments(ctx, 1, [&](const SieveSegment& seg, u64 n, char* hit) {
    hit[0] = has_divisor_in(table.factor(seg.phi_of(n)), y, z);
  });
  ScanResult r = tallies[0].to_result("count_B", ctx.x(), {{"y", str(y)}, {"z", str(z)}});
  r.elapsed_ms = elapsed_since(start);
  return r;
}

ScanResult nondense_scan(const ScanContext& ctx, const Rational& c) {
  if (c.num() == 0 || c >= Rational(1)) throw domain_error("nondense_scan needs 0 < c < 1");
  const auto start = Clock::now();
  const FactorTable& table = ctx.factor_table();
  const u64 bound = floor_pow(ctx.x(), c);
  const Rational u(bound);
  auto tallies = tally_segments(ctx, 1, [&](const SieveSegment& seg, u64 n, char* hit) {
    hit[0] = !is_dense(table.factor(seg.phi_of(n)), u) && !is_dense(table.factor(seg.lambda_of(n)), u);
  });
  ScanResult r = tallies[0].to_result("nondense_scan", ctx.x(), {{"c", c.to_string()}, {"u", str(bound)}});
  r.elapsed_ms = elapsed_since(start);
  return r;
}

ThetaProfile theta_profile(const ScanContext& ctx, std::vector<Rational> c_grid) {
  const auto start = Clock::now();
  for (const auto& c : c_grid)
    if (c.num() == 0 || c >= Rational(1)) throw domain_error("theta grid values must lie in (0, 1)");
  std::sort(c_grid.begin(), c_grid.end());
  c_grid.erase(std::unique(c_grid.begin(), c_grid.end()), c_grid.end());

  ThetaProfile profile;
  profile.x = ctx.x();
  for (const auto& c : c_grid) profile.grid.push_back({c, 0, 0});
  shifted_prime_factor_table(ctx.factor_table(), ctx.x() + 1, [&](const ShiftedPrime& rec) {
    for (auto& row : profile.grid) {
      ++row.prime_count;
      if (rec.largest > 0 && exceeds_power(rec.largest, rec.prime, row.c)) ++row.qualifying_count;
    }
  });
  profile.elapsed_ms = elapsed_since(start);
  return profile;
}

ScanResult phi_prime_gap_scan(const ScanContext& ctx, const Rational& g, const Rational& eps) {
  if (g.num() == 0 || eps.num() == 0) throw domain_error("g and eps must be positive");
  const auto start = Clock::now();
  const FactorTable& table = ctx.factor_table();
  const u64 x = ctx.x();
  // Exponent g(1 + eps) kept exact.
  const Rational upper_exp(checked_mul(g.num(), eps.den() + eps.num()), checked_mul(g.den(), eps.den()));
  const u64 a = floor_pow(x, g);
  const u64 b = floor_pow(x, upper_exp);

  auto tallies = tally_segments(ctx, 1, [&](const SieveSegment& seg, u64 n, char* hit) {
    thread_local std::vector<u64> primes;
    table.distinct_primes(seg.phi_of(n), primes);
    hit[0] = std::none_of(primes.begin(), primes.end(), [&](u64 q) { return q > a && q <= b; });
  });

  const double gd = g.to_double(), ed = eps.to_double();
  const double lx = std::log(static_cast<double>(x));
  const bool in_window = g <= Rational(1, 10) && eps <= Rational(1, 4) && ed * gd * lx >= 1.0;
  char bound[64];
  std::snprintf(bound, sizeof bound, "%.6f", std::pow(gd, ed / 2) * std::log(1 / gd) * static_cast<double>(x));

  ScanResult r = tallies[0].to_result("phi_prime_gap_scan", x,
                                      {{"g", g.to_string()},
                                       {"eps", eps.to_string()},
                                       {"window_lo", str(a)},
                                       {"window_hi", str(b)},
                                       {"reference_bound", bound},
                                       {"hypotheses", in_window ? "inside" : "outside"}});
  r.elapsed_ms = elapsed_since(start);
  return r;
}

ScanResult shifted_prime_scan(const ScanContext& ctx, u64 a, u64 b) {
  if (ctx.x() < 3) throw domain_error("shifted_prime_scan needs w >= 3");
  const auto start = Clock::now();
  Tally t;
  shifted_prime_factor_table(ctx.factor_table(), ctx.x() + 1, [&](const ShiftedPrime& rec) {
    const bool none = std::none_of(rec.factors.begin(), rec.factors.end(),
                                   [&](u64 q) { return q > a && q <= b; });
    t.record(rec.prime, none);
  });
  char ref[64];
  const double w = static_cast<double>(ctx.x());
  std::snprintf(ref, sizeof ref, "%.6f", w / std::log(w));
  ScanResult r = t.to_result("shifted_prime_scan", ctx.x(),
                             {{"window_lo", str(a)}, {"window_hi", str(b)}, {"w_over_log_w", ref}});
  r.elapsed_ms = elapsed_since(start);
  return r;
}

namespace {

// Lower nearest-rank quantile of sorted data.
template <typename T>
double quantile(const std::vector<T>& sorted, double q) {
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return static_cast<double>(sorted[rank - 1]);
}

template <typename T>
DistributionSummary summarize(std::vector<T>& values) {
  DistributionSummary s;
  if (values.empty()) return s;
  long double sum = 0;
  for (T v : values) sum += v;
  s.mean = static_cast<double>(sum / static_cast<long double>(values.size()));
  std::sort(values.begin(), values.end());
  s.median = quantile(values, 0.5);
  for (int k = 1; k <= 9; ++k) s.deciles[static_cast<std::size_t>(k - 1)] = quantile(values, k / 10.0);
  return s;
}

}  // namespace

OmegaProfile omega_phi_profile(const ScanContext& ctx) {
  if (ctx.x() < 16) throw domain_error("omega_phi_profile needs x >= 16");
  const auto start = Clock::now();
  const FactorTable& table = ctx.factor_table();
  const u64 count = ctx.x() - 2;
  std::vector<std::uint8_t> omega(count);
  std::vector<float> ratio(count);
  for_each_segment(ctx, [&](const SieveSegment& seg) {
    for (u64 n = std::max<u64>(seg.lo, 3); n < seg.hi; ++n) {
      const unsigned w = table.big_omega(seg.phi_of(n));
      const double ll = std::log(std::log(static_cast<double>(n)));
      omega[n - 3] = static_cast<std::uint8_t>(w);
      ratio[n - 3] = static_cast<float>(w / (ll * ll / 2));
    }
  });
  OmegaProfile p;
  p.x = ctx.x();
  p.count = count;
  p.omega = summarize(omega);
  p.ratio = summarize(ratio);
  p.elapsed_ms = elapsed_since(start);
  return p;
}

ScanResult landau_scan(const ScanContext& ctx, u64 D) {
  if (D == 0) throw domain_error("landau_scan needs D >= 1");
  const auto start = Clock::now();
  const FactorTable& table = ctx.factor_table();
  auto tallies = tally_segments(ctx, 1, [&](const SieveSegment& seg, u64 n, char* hit) {
    thread_local std::vector<u64> primes;
    if (n == 1) {
      hit[0] = true;
      return;
    }
    (void)seg;
    table.distinct_primes(n, primes);
    hit[0] = std::none_of(primes.begin(), primes.end(), [&](u64 q) { return q % D == 1 % D; });
  });
  const u64 phi_d = euler_phi(factorize(D));
  ScanResult r = tallies[0].to_result("landau_scan", ctx.x(),
                                      {{"D", str(D)}, {"decay_exponent", Rational(1, phi_d).to_string()}});
  r.elapsed_ms = elapsed_since(start);
  return r;
}

ScanResult phi_ratio_small(const ScanContext& ctx, const Rational& eps) {
  if (eps.num() == 0 || eps > Rational(1)) throw domain_error("phi_ratio_small needs 0 < eps <= 1");
  const auto start = Clock::now();
  Tally global;
  std::mutex mu;
  for_each_segment(ctx, [&](const SieveSegment& seg) {
    Tally local;
    // Sample witnesses with the scalar loop, then count the rest in bulk.
    u64 n = seg.lo;
    for (; n < seg.hi && (local.witnesses.size() < kWitnessCap || local.misses.size() < kWitnessCap); ++n) {
      local.record(n, static_cast<u128>(seg.phi_of(n)) * eps.den() <= static_cast<u128>(eps.num()) * n);
    }
    if (n < seg.hi) {
      const std::span<const u64> rest(seg.phi.data() + (n - seg.lo), seg.hi - n);
      local.hits += kernels::count_scaled_le(rest, n, eps.num(), eps.den());
      local.total += rest.size();
    }
    std::lock_guard lock(mu);
    global.merge(local);
  });
  ScanResult r = global.to_result("phi_ratio_small", ctx.x(), {{"eps", eps.to_string()}});
  r.elapsed_ms = elapsed_since(start);
  return r;
}

std::vector<ScanResult> density_pipeline(const ScanContext& ctx, const std::vector<u64>& ys) {
  const auto start = Clock::now();
  const FactorTable& table = ctx.factor_table();
  const Rational two(2);
  auto tallies = tally_segments(ctx, 1 + ys.size(), [&](const SieveSegment& seg, u64 n, char* hit) {
    const Factorization fphi = table.factor(seg.phi_of(n));
    hit[0] = is_dense(fphi, two) && is_dense(table.factor(seg.lambda_of(n)), two);
    for (std::size_t k = 0; k < ys.size(); ++k) hit[k + 1] = has_divisor_in(fphi, ys[k], 2 * ys[k]);
  });
  const u64 elapsed = elapsed_since(start);
  std::vector<ScanResult> out;
  out.push_back(tallies[0].to_result("scan_density", ctx.x(),
                                     {{"range", "global"}, {"target", "both"}, {"u", "2"}}));
  for (std::size_t k = 0; k < ys.size(); ++k)
    out.push_back(tallies[k + 1].to_result("count_B", ctx.x(), {{"y", str(ys[k])}, {"z", str(2 * ys[k])}}));
  for (auto& r : out) r.elapsed_ms = elapsed;
  return out;
}

}  // namespace dense
