#include "dense/sieve.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "dense/cache.hpp"
#include "dense/errors.hpp"

namespace dense {

namespace {

// Above this sqrt(hi) the segment falls back to per-n factorization instead
// of holding every base prime.
constexpr u64 kMaxBasePrime = u64{1} << 27;

std::vector<std::uint32_t> simple_sieve(std::uint32_t bound) {
  std::vector<std::uint32_t> out;
  if (bound < 2) return out;
  out.push_back(2);
  // Odd-only flags: index i stands for 2i + 1.
  std::vector<std::uint8_t> composite(bound / 2 + 1, 0);
  for (u64 i = 1; 2 * i + 1 <= bound; ++i) {
    if (composite[i]) continue;
    const u64 p = 2 * i + 1;
    out.push_back(static_cast<std::uint32_t>(p));
    for (u64 j = p * p / 2; 2 * j + 1 <= bound; j += p) composite[j] = 1;
  }
  return out;
}

u64 fast_lcm(u64 a, u64 b) {
  if (a % b == 0) return a;
  return checked_mul(a / std::gcd(a, b), b);
}

void fill_by_factorization(SieveSegment& s) {
  for (u64 n = std::max<u64>(s.lo, 2); n < s.hi; ++n) {
    const Factorization f = factorize(n);
    const std::size_t i = n - s.lo;
    const u64 p = f.factors().front().prime;
    s.spf[i] = p < (u64{1} << 32) ? static_cast<std::uint32_t>(p) : 0;
    s.phi[i] = euler_phi(f);
    s.lambda[i] = carmichael(f);
  }
}

}  // namespace

std::shared_ptr<const std::vector<std::uint32_t>> base_primes(u64 bound) {
  static std::mutex mu;
  static std::shared_ptr<const std::vector<std::uint32_t>> cached;
  static u64 cached_bound = 0;
  if (bound > (u64{1} << 32)) throw domain_error("base prime bound above 2^32");
  std::lock_guard lock(mu);
  if (!cached || cached_bound < bound) {
    // Grow geometrically so repeated slightly-larger requests stay cheap.
    const u64 target = std::min<u64>(std::max(bound, cached_bound * 2), UINT32_MAX);
    cached = std::make_shared<const std::vector<std::uint32_t>>(
        simple_sieve(static_cast<std::uint32_t>(target)));
    cached_bound = target;
  }
  return cached;
}

SieveSegment sieve_segment(u64 lo, u64 hi) {
  if (hi < lo) throw domain_error("segment with hi < lo");
  SieveSegment s;
  s.lo = lo;
  s.hi = hi;
  const std::size_t len = s.size();
  s.spf.assign(len, 0);
  s.phi.assign(len, 1);
  s.lambda.assign(len, 1);
  if (len == 0) return s;
  if (lo == 0) {
    s.phi[0] = 0;
    s.lambda[0] = 0;
  }
  if (hi <= 2) return s;

  const u64 root = isqrt(hi - 1);
  if (root > kMaxBasePrime) {
    fill_by_factorization(s);
    return s;
  }

  // rem holds the part of n not yet explained by a base prime.
  std::vector<u64> rem(len);
  std::iota(rem.begin(), rem.end(), lo);

  // p = 2 via trailing zeros.
  for (u64 n = lo + (lo & 1); n < hi; n += 2) {
    if (n == 0) continue;
    const std::size_t i = n - lo;
    const int e = std::countr_zero(n);
    rem[i] = n >> e;
    s.spf[i] = 2;
    s.phi[i] = u64{1} << (e - 1);
    s.lambda[i] = e >= 3 ? u64{1} << (e - 2) : u64{1} << (e - 1);
  }

  const auto primes = base_primes(root);
  for (std::uint32_t p32 : *primes) {
    const u64 p = p32;
    if (p == 2) continue;
    if (p > root) break;
    u64 start = (lo + p - 1) / p * p;
    if (start == 0) start = p;
    for (u64 n = start; n < hi; n += p) {
      const std::size_t i = n - lo;
      u64 r = rem[i] / p;
      u64 pe = p;
      while (r % p == 0) {
        r /= p;
        pe *= p;
      }
      rem[i] = r;
      const u64 lam = pe / p * (p - 1);
      s.phi[i] *= lam;
      s.lambda[i] = fast_lcm(s.lambda[i], lam);
      if (s.spf[i] == 0) s.spf[i] = static_cast<std::uint32_t>(p);
    }
  }

  for (std::size_t i = 0; i < len; ++i) {
    const u64 r = rem[i];
    if (r <= 1) continue;
    // What remains is a single prime above sqrt(hi).
    s.phi[i] *= r - 1;
    s.lambda[i] = fast_lcm(s.lambda[i], r - 1);
    if (s.spf[i] == 0 && r < (u64{1} << 32)) s.spf[i] = static_cast<std::uint32_t>(r);
  }
  return s;
}

u64 segment_count(const SieveConfig& cfg) noexcept {
  if (cfg.limit <= 1 || cfg.segment_length == 0) return 0;
  return (cfg.limit - 1 + cfg.segment_length - 1) / cfg.segment_length;
}

SieveSummary iterate_segments(const SieveConfig& cfg, const SegmentConsumer& consumer) {
  if (cfg.segment_length < 2) throw domain_error("segment_length must be at least 2");
  SieveSummary summary;
  summary.segments_total = segment_count(cfg);
  if (summary.segments_total == 0) return summary;

  if (cfg.cache_path) std::filesystem::create_directories(*cfg.cache_path);

  std::atomic<u64> next{0};
  std::atomic<u64> completed{0}, delivered{0}, hits{0}, writes{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu, deliver_mu;

  auto work = [&] {
    try {
      for (;;) {
        if (failed.load(std::memory_order_relaxed)) return;
        const u64 k = next.fetch_add(1);
        if (k >= summary.segments_total) return;
        const u64 lo = 1 + k * cfg.segment_length;
        const u64 hi = std::min(cfg.limit, lo + cfg.segment_length);

        SieveSegment seg;
        bool from_cache = false;
        if (cfg.cache_path) {
          try {
            seg = cache::read(*cfg.cache_path, lo, hi, k);
            from_cache = true;
            hits.fetch_add(1);
          } catch (const not_found_error&) {
          }
        }
        if (!from_cache) {
          seg = sieve_segment(lo, hi);
          if (cfg.cache_path) {
            cache::write(*cfg.cache_path, seg);
            writes.fetch_add(1);
          }
        }

        if (cfg.delivery == Delivery::serialized) {
          std::lock_guard lock(deliver_mu);
          consumer(seg);
        } else {
          consumer(seg);
        }
        delivered.fetch_add(seg.size());
        completed.fetch_add(1);
      }
    } catch (...) {
      std::lock_guard lock(error_mu);
      if (!error) error = std::current_exception();
      failed.store(true);
    }
  };

  const unsigned workers =
      std::clamp<u64>(cfg.worker_count == 0 ? 1 : cfg.worker_count, 1, summary.segments_total);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  summary.segments_completed = completed.load();
  summary.values_delivered = delivered.load();
  summary.cache_hits = hits.load();
  summary.cache_writes = writes.load();
  return summary;
}

// --- PrimeRange ------------------------------------------------------------

namespace {
constexpr u64 kPrimeWindow = u64{1} << 18;
}

PrimeRange::iterator::iterator(u64 lo, u64 hi) : next_lo_(std::max<u64>(lo, 2)), hi_(hi), done_(false) {
  refill();
}

PrimeRange::iterator& PrimeRange::iterator::operator++() {
  if (++pos_ >= buffer_.size()) refill();
  return *this;
}

void PrimeRange::iterator::refill() {
  buffer_.clear();
  pos_ = 0;
  while (buffer_.empty()) {
    if (next_lo_ >= hi_) {
      done_ = true;
      return;
    }
    const u64 lo = next_lo_;
    const u64 hi = (hi_ - lo > kPrimeWindow) ? lo + kPrimeWindow : hi_;
    next_lo_ = hi;

    const u64 root = isqrt(hi - 1);
    if (root > kMaxBasePrime) {
      for (u64 n = lo; n < hi; ++n)
        if (is_prime(n)) buffer_.push_back(n);
      continue;
    }
    std::vector<std::uint8_t> composite(hi - lo, 0);
    const auto primes = base_primes(root);
    for (std::uint32_t p32 : *primes) {
      const u64 p = p32;
      if (p > root) break;
      u64 start = std::max(p * p, (lo + p - 1) / p * p);
      for (u64 n = start; n < hi; n += p) composite[n - lo] = 1;
    }
    for (u64 n = lo; n < hi; ++n)
      if (!composite[n - lo]) buffer_.push_back(n);
  }
}

// --- FactorTable -----------------------------------------------------------

FactorTable::FactorTable(u64 limit) : limit_(limit) {
  if (limit > kMaxLimit) throw domain_error("FactorTable limit above 2^32");
  odd_spf_.assign(limit / 2 + 1, 0);
  if (limit < 9) return;
  const u64 root = isqrt(limit - 1);
  const auto primes = base_primes(root);
  // Blocked marking keeps the active slice of the table cache resident.
  constexpr u64 kBlock = u64{1} << 19;
  std::vector<u64> next_multiple;
  std::vector<u64> active;
  for (std::uint32_t p : *primes) {
    if (p == 2) continue;
    if (p > root) break;
    active.push_back(p);
    next_multiple.push_back(u64{p} * p);
  }
  for (u64 block_lo = 0; block_lo < limit; block_lo += kBlock) {
    const u64 block_hi = std::min(limit, block_lo + kBlock);
    for (std::size_t k = 0; k < active.size(); ++k) {
      const u64 p = active[k];
      u64 m = next_multiple[k];
      const auto tag = static_cast<std::uint16_t>(p);
      for (; m < block_hi; m += 2 * p) {
        auto& slot = odd_spf_[m / 2];
        if (slot == 0) slot = tag;
      }
      next_multiple[k] = m;
    }
  }
}

Factorization FactorTable::factor(u64 m) const {
  if (m == 0 || m >= limit_) throw domain_error("FactorTable::factor out of range");
  std::vector<PrimePower> factors;
  const u64 value = m;
  if (const int tz = std::countr_zero(m); tz > 0) {
    factors.push_back({2, static_cast<unsigned>(tz)});
    m >>= tz;
  }
  while (m > 1) {
    const std::uint16_t s = odd_spf_[m / 2];
    const u64 p = s == 0 ? m : s;
    unsigned e = 0;
    do {
      m /= p;
      ++e;
    } while (m % p == 0);
    factors.push_back({p, e});
  }
  return Factorization::from_canonical(value, std::move(factors));
}

void FactorTable::distinct_primes(u64 m, std::vector<u64>& out) const {
  out.clear();
  if (m == 0 || m >= limit_) throw domain_error("FactorTable::distinct_primes out of range");
  if (const int tz = std::countr_zero(m); tz > 0) {
    out.push_back(2);
    m >>= tz;
  }
  while (m > 1) {
    const std::uint16_t s = odd_spf_[m / 2];
    const u64 p = s == 0 ? m : s;
    do m /= p;
    while (m % p == 0);
    out.push_back(p);
  }
}

unsigned FactorTable::big_omega(u64 m) const {
  if (m == 0 || m >= limit_) throw domain_error("FactorTable::big_omega out of range");
  unsigned count = static_cast<unsigned>(std::countr_zero(m));
  m >>= count;
  while (m > 1) {
    const std::uint16_t s = odd_spf_[m / 2];
    if (s == 0) return count + 1;
    m /= s;
    ++count;
  }
  return count;
}

void shifted_prime_factor_table(const FactorTable& table, u64 limit,
                                const std::function<void(const ShiftedPrime&)>& consumer) {
  if (limit > table.limit() + 1) throw domain_error("shifted prime table exceeds factor table");
  ShiftedPrime rec;
  for (u64 p : primes_in(2, limit)) {
    rec.prime = p;
    if (p == 2) {
      rec.factors.clear();
    } else {
      table.distinct_primes(p - 1, rec.factors);
    }
    rec.largest = rec.factors.empty() ? 0 : rec.factors.back();
    consumer(rec);
  }
}

std::vector<ShiftedPrime> shifted_prime_factor_table(u64 limit) {
  const FactorTable table(std::max<u64>(limit, 2));
  std::vector<ShiftedPrime> out;
  shifted_prime_factor_table(table, limit, [&](const ShiftedPrime& r) { out.push_back(r); });
  return out;
}

}  // namespace dense
