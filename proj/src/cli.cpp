#include "dense/cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <iostream>
#include <mutex>
#include <numeric>
#include <sstream>

#include "dense/arith.hpp"
#include "dense/density.hpp"
#include "dense/errors.hpp"
#include "dense/experiments.hpp"
#include "dense/reference.hpp"
#include "dense/report.hpp"
#include "dense/sieve.hpp"
#include "dense/thresholds.hpp"

namespace dense::cli {

namespace {

// Parameter validation failure, reported as a usage error.
struct UsageError : std::runtime_error {
  UsageError(const std::string& flag, const std::string& why)
      : std::runtime_error("--" + flag + ": " + why) {}
};

constexpr u64 kSelftestX = 3000;

struct Common {
  std::string format = "csv";
  std::string output;
  unsigned workers = 1;
  std::string cache_dir;
  u64 segment_length = kDefaultSegmentLength;
  bool selftest = false;
  bool no_timing = false;
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--output", c.output, "Write the result document here instead of stdout");
  sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
  sub->add_option("--cache-dir", c.cache_dir, "Segment cache directory (default: $DENSE_CACHE_DIR)");
  sub->add_option("--segment-length", c.segment_length, "Values per sieve segment")
      ->check(CLI::Range(u64{2}, u64{1} << 30));
  sub->add_flag("--selftest", c.selftest, "Run at tiny x and cross-check against brute force");
  sub->add_flag("--no-timing", c.no_timing, "Write elapsed_ms as 0 for byte-identical reruns");
  sub->add_flag("--quiet", c.quiet, "No progress on stderr");
}

Rational parse_rational(const std::string& flag, const std::string& text) {
  try {
    return Rational::parse(text);
  } catch (const std::exception& e) {
    throw UsageError(flag, e.what());
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string factorization_text(const Factorization& f) {
  if (f.is_unit()) return "1";
  std::string s;
  for (const auto& [p, e] : f.factors()) {
    if (!s.empty()) s += "*";
    s += std::to_string(p);
    if (e > 1) s += "^" + std::to_string(e);
  }
  return s;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int main(std::span<const std::string> argv);

 private:
  ScanOptions scan_options(const std::string& name);
  u64 effective_x(u64 x) const { return common_.selftest ? std::min(x, kSelftestX) : x; }
  void write(const std::string& document);
  void finish(ScanResult r) {
    if (common_.no_timing) r.elapsed_ms = 0;
    write(emit(std::span<const ScanResult>(&r, 1), format()));
  }
  Format format() const { return parse_format(common_.format); }
  // Compares a result against a brute-force predicate over 1..x.
  void check_against(const ScanResult& r, u64 first, const std::function<bool(u64)>& hit,
                     const std::function<bool(u64)>& in_domain = {});
  void selftest_failed(const std::string& what) { selftest_errors_.push_back(what); }

  std::ostream& out_;
  std::ostream& err_;
  Common common_;
  std::vector<std::string> selftest_errors_;
  std::mutex progress_mu_;
};

ScanOptions Runner::scan_options(const std::string& name) {
  ScanOptions o;
  o.workers = common_.workers;
  o.segment_length = common_.segment_length;
  std::string dir = common_.cache_dir;
  if (dir.empty())
    if (const char* env = std::getenv("DENSE_CACHE_DIR")) dir = env;
  if (!dir.empty()) o.cache_path = dir;
  if (!common_.quiet) {
    o.progress = [this, name](u64 done, u64 total) {
      std::lock_guard lock(progress_mu_);
      if (done == total || done % std::max<u64>(1, total / 10) == 0)
        err_ << name << ": segment " << done << "/" << total << "\n";
    };
  }
  return o;
}

void Runner::write(const std::string& document) {
  if (common_.output.empty()) {
    out_ << document;
    out_.flush();
    return;
  }
  std::ofstream f(common_.output, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + common_.output + " for writing");
  f << document;
  if (!f) throw std::runtime_error("write to " + common_.output + " failed");
}

void Runner::check_against(const ScanResult& r, u64 first, const std::function<bool(u64)>& hit,
                           const std::function<bool(u64)>& in_domain) {
  u64 total = 0, hits = 0;
  std::vector<u64> witnesses, misses;
  for (u64 n = first; n <= r.x; ++n) {
    if (in_domain && !in_domain(n)) continue;
    ++total;
    if (hit(n)) {
      ++hits;
      if (witnesses.size() < kWitnessCap) witnesses.push_back(n);
    } else if (misses.size() < kWitnessCap) {
      misses.push_back(n);
    }
  }
  if (total != r.total) selftest_failed("total " + std::to_string(r.total) + " != " + std::to_string(total));
  if (hits != r.hits) selftest_failed("hits " + std::to_string(r.hits) + " != " + std::to_string(hits));
  if (witnesses != r.witnesses) selftest_failed("witness list differs");
  if (misses != r.misses) selftest_failed("miss list differs");
}

int Runner::main(std::span<const std::string> argv) {
  CLI::App app{"Dense divisors of Euler's phi and Carmichael's lambda", "dense"};
  app.require_subcommand(1);
  // Subcommands inherit this; a bare -h would collide with --h.
  app.set_help_flag("--help", "Print this help message and exit");

  // phi
  u64 n_single = 0;
  auto* phi_cmd = app.add_subcommand("phi", "phi, lambda and divisor ratios of one integer");
  phi_cmd->add_option("--n", n_single, "The integer")->required()->check(CLI::PositiveNumber);

  // scan-density
  u64 x = 0;
  std::string u_text = "2", c_text, target_text = "both";
  u64 h = 0;
  bool global = false;
  auto* density_cmd = app.add_subcommand("scan-density", "Count n <= x with u-dense phi(n) / lambda(n)");
  density_cmd->add_option("--x", x)->required();
  density_cmd->add_option("--u", u_text, "Density ratio (rational, >= 1)");
  density_cmd->add_flag("--global", global, "Full u-density");
  density_cmd->add_option("--h", h, "Left endpoint of [h, floor(x^c)]");
  density_cmd->add_option("--c", c_text, "Exponent of the right endpoint floor(x^c)");
  density_cmd->add_option("--target", target_text)->check(CLI::IsMember({"phi", "lambda", "both"}));

  auto* full_cmd = app.add_subcommand("scan-full-range", "Density on [h, phi(n)/(h+1)) and [h, lambda(n)/(h+1))");
  full_cmd->add_option("--x", x)->required();
  full_cmd->add_option("--h", h)->required();

  u64 y = 0, z = 0;
  auto* b_cmd = app.add_subcommand("count-b", "B(x, y, z): n <= x with a divisor of phi(n) in (y, z]");
  b_cmd->add_option("--x", x)->required();
  b_cmd->add_option("--y", y)->required();
  b_cmd->add_option("--z", z)->required();

  auto* nondense_cmd = app.add_subcommand("nondense", "n <= x with neither phi(n) nor lambda(n) x^c-dense");
  nondense_cmd->add_option("--x", x)->required();
  nondense_cmd->add_option("--c", c_text)->required();

  std::string grid_text = "0.1,0.2,0.3,0.4,0.5,0.6,0.677,0.7,0.8,0.9";
  auto* theta_cmd = app.add_subcommand("theta", "Primes p <= x with P+(p-1) > p^c, per c");
  theta_cmd->add_option("--x", x)->required();
  theta_cmd->add_option("--c-grid", grid_text, "Comma-separated exponents in (0, 1)");

  std::string g_text, eps_text;
  auto* gap_cmd = app.add_subcommand("gap-scan", "n <= x with no prime factor of phi(n) in (x^g, x^{g(1+eps)}]");
  gap_cmd->add_option("--x", x)->required();
  gap_cmd->add_option("--g", g_text)->required();
  gap_cmd->add_option("--eps", eps_text)->required();

  u64 a = 0, b = 0;
  std::string lo_exp, hi_exp;
  auto* shifted_cmd = app.add_subcommand("shifted-prime", "Primes p <= w with no prime factor of p-1 in (a, b]");
  shifted_cmd->add_option("--w", x)->required();
  shifted_cmd->add_option("--a", a, "Window start (exclusive)");
  shifted_cmd->add_option("--b", b, "Window end (inclusive)");
  shifted_cmd->add_option("--lo-exp", lo_exp, "Window start as floor(w^e)")->excludes("--a");
  shifted_cmd->add_option("--hi-exp", hi_exp, "Window end as floor(w^e)")->excludes("--b");

  auto* omega_cmd = app.add_subcommand("omega", "Distribution of Omega(phi(n)) for 3 <= n <= x");
  omega_cmd->add_option("--x", x)->required();

  u64 D = 0;
  auto* landau_cmd = app.add_subcommand("landau", "n <= x with no prime factor q = 1 (mod D)");
  landau_cmd->add_option("--x", x)->required();
  landau_cmd->add_option("--D", D)->required();

  auto* ratio_cmd = app.add_subcommand("phi-ratio", "n <= x with phi(n) <= eps * n");
  ratio_cmd->add_option("--x", x)->required();
  ratio_cmd->add_option("--eps", eps_text)->required();

  std::string ys_text = "10,100,1000";
  auto* pipe_cmd = app.add_subcommand("pipeline", "Global 2-density scan plus B(x, y, 2y) in one pass");
  pipe_cmd->add_option("--x", x)->required();
  pipe_cmd->add_option("--y-list", ys_text, "Comma-separated y values");

  auto* sieve_cmd = app.add_subcommand("sieve", "Sieve [1, limit), filling the segment cache");
  sieve_cmd->add_option("--limit", x)->required();

  for (auto* sub : app.get_subcommands({})) add_common(sub, common_);

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out_ << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out_ << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err_ << "dense: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    // Validate everything before any sieving.
    const bool needs_x = name != "phi";
    if (needs_x) {
      if (common_.selftest && x == 0) x = kSelftestX;
      if (x < 1) throw UsageError(name == "sieve" ? "limit" : (name == "shifted-prime" ? "w" : "x"), "must be positive");
      if (x >= FactorTable::kMaxLimit) throw UsageError("x", "must be below 2^32");
      x = effective_x(x);
    }
    if (!common_.quiet) err_ << "dense: " << name << (needs_x ? " x=" + std::to_string(x) : "") << "\n";

    if (name == "phi") {
      const Factorization f = factorize(n_single);
      const u64 phi = euler_phi(f), lambda = carmichael(f);
      const Factorization fphi = factorize(phi), flam = factorize(lambda);
      const auto divs = divisors(fphi);
      const std::string ratio_phi = max_divisor_ratio(fphi).to_string();
      const std::string ratio_lambda = max_divisor_ratio(flam).to_string();
      std::string divs_text;
      for (u64 d : divs) divs_text += (divs_text.empty() ? "" : ";") + std::to_string(d);
      if (format() == Format::csv) {
        write("n,factorization,phi,lambda,phi_factorization,phi_divisors,phi_max_ratio,lambda_max_ratio\n" +
              std::to_string(n_single) + "," + factorization_text(f) + "," + std::to_string(phi) + "," +
              std::to_string(lambda) + "," + factorization_text(fphi) + "," + divs_text + "," + ratio_phi + "," +
              ratio_lambda + "\n");
      } else {
        nlohmann::ordered_json j;
        j["version"] = kVersion;
        j["n"] = n_single;
        j["factorization"] = factorization_text(f);
        j["phi"] = phi;
        j["lambda"] = lambda;
        j["phi_factorization"] = factorization_text(fphi);
        j["phi_divisors"] = divs;
        j["phi_max_ratio"] = ratio_phi;
        j["lambda_max_ratio"] = ratio_lambda;
        write(j.dump(2) + "\n");
      }
      if (common_.selftest && n_single <= 10000) {
        u64 coprime = 0;
        for (u64 k = 1; k <= n_single; ++k) coprime += std::gcd(k, n_single) == 1;
        if (coprime != phi) selftest_failed("phi differs from coprime count");
        u64 max_order = 1;
        for (u64 k = 1; k <= n_single; ++k) {
          if (std::gcd(k, n_single) != 1 || n_single == 1) continue;
          u64 t = 1, v = k % n_single;
          while (v != 1) {
            v = mul_mod(v, k, n_single);
            ++t;
          }
          max_order = std::max(max_order, t);
        }
        if (max_order != lambda) selftest_failed("lambda differs from the largest element order");
      }
    } else if (name == "scan-density") {
      const Rational u = parse_rational("u", u_text);
      if (u < Rational(1)) throw UsageError("u", "must be at least 1");
      IntervalSpec spec = GlobalRange{};
      if (!global) {
        if (c_text.empty() && h == 0) {
          spec = GlobalRange{};
        } else {
          if (h == 0) throw UsageError("h", "must be at least 1");
          if (c_text.empty()) throw UsageError("c", "required with --h");
          const Rational c = parse_rational("c", c_text);
          if (c.num() == 0 || c > Rational(1)) throw UsageError("c", "must lie in (0, 1]");
          spec = BoundedRange{h, c};
        }
      } else if (h != 0 || !c_text.empty()) {
        throw UsageError("global", "cannot be combined with --h/--c");
      }
      const Target target = parse_target(target_text);
      const ScanContext ctx(x, scan_options(name));
      const ScanResult r = scan_density(ctx, u, spec, target);
      if (common_.selftest)
        check_against(r, 1, [&](u64 n) { return reference::density_hit(n, x, u, spec, target); });
      finish(r);
    } else if (name == "scan-full-range") {
      if (h == 0) throw UsageError("h", "must be at least 1");
      const ScanContext ctx(x, scan_options(name));
      const ScanResult r = scan_full_range_density(ctx, h);
      if (common_.selftest) check_against(r, 1, [&](u64 n) { return reference::full_range_hit(n, h); });
      finish(r);
    } else if (name == "count-b") {
      if (y >= z) throw UsageError("z", "must exceed --y");
      const ScanContext ctx(x, scan_options(name));
      const ScanResult r = count_B(ctx, y, z);
      if (common_.selftest) check_against(r, 1, [&](u64 n) { return reference::b_hit(n, y, z); });
      finish(r);
    } else if (name == "nondense") {
      const Rational c = parse_rational("c", c_text);
      if (c.num() == 0 || c >= Rational(1)) throw UsageError("c", "must lie in (0, 1)");
      const ScanContext ctx(x, scan_options(name));
      const ScanResult r = nondense_scan(ctx, c);
      if (common_.selftest) check_against(r, 1, [&](u64 n) { return reference::nondense_hit(n, x, c); });
      finish(r);
    } else if (name == "theta") {
      std::vector<Rational> grid;
      for (const auto& item : split(grid_text, ',')) {
        const Rational c = parse_rational("c-grid", item);
        if (c.num() == 0 || c >= Rational(1)) throw UsageError("c-grid", item + " is outside (0, 1)");
        grid.push_back(c);
      }
      if (grid.empty()) throw UsageError("c-grid", "is empty");
      const ScanContext ctx(x, scan_options(name));
      ThetaProfile p = theta_profile(ctx, grid);
      if (common_.no_timing) p.elapsed_ms = 0;
      if (common_.selftest) {
        for (const auto& row : p.grid) {
          u64 primes = 0, qualifying = 0;
          for (u64 q = 2; q <= x; ++q) {
            if (!is_prime(q)) continue;
            ++primes;
            qualifying += reference::theta_hit(q, row.c);
          }
          if (primes != row.prime_count || qualifying != row.qualifying_count)
            selftest_failed("theta row c=" + row.c.to_string() + " differs");
        }
      }
      write(emit(p, format()));
    } else if (name == "gap-scan") {
      const Rational g = parse_rational("g", g_text);
      const Rational eps = parse_rational("eps", eps_text);
      if (g.num() == 0 || g >= Rational(1)) throw UsageError("g", "must lie in (0, 1)");
      if (eps.num() == 0) throw UsageError("eps", "must be positive");
      const ScanContext ctx(x, scan_options(name));
      const ScanResult r = phi_prime_gap_scan(ctx, g, eps);
      if (r.parameters.at("hypotheses") != "inside" && !common_.quiet)
        err_ << "dense: warning: (g, eps) lies outside 1/(g log x) <= eps <= 1/4, g <= 1/10\n";
      if (common_.selftest) check_against(r, 1, [&](u64 n) { return reference::gap_hit(n, x, g, eps); });
      finish(r);
    } else if (name == "shifted-prime") {
      if (x < 3) throw UsageError("w", "must be at least 3");
      if (!lo_exp.empty()) a = floor_pow(x, parse_rational("lo-exp", lo_exp));
      if (!hi_exp.empty()) b = floor_pow(x, parse_rational("hi-exp", hi_exp));
      if (a > b) throw UsageError("b", "window end must not precede its start");
      const ScanContext ctx(x, scan_options(name));
      const ScanResult r = shifted_prime_scan(ctx, a, b);
      if (common_.selftest)
        check_against(r, 2, [&](u64 p) { return reference::shifted_hit(p, a, b); }, [](u64 p) { return is_prime(p); });
      finish(r);
    } else if (name == "omega") {
      if (x < 16) throw UsageError("x", "must be at least 16");
      const ScanContext ctx(x, scan_options(name));
      OmegaProfile p = omega_phi_profile(ctx);
      if (common_.no_timing) p.elapsed_ms = 0;
      if (common_.selftest) {
        long double sum = 0;
        for (u64 n = 3; n <= x; ++n) {
          const auto f = factorize(euler_phi(factorize(n)));
          for (const auto& pp : f.factors()) sum += pp.exponent;
        }
        const double mean = static_cast<double>(sum / static_cast<long double>(x - 2));
        if (std::abs(mean - p.omega.mean) > 1e-9) selftest_failed("mean Omega(phi(n)) differs");
      }
      write(emit(p, format()));
    } else if (name == "landau") {
      if (D == 0) throw UsageError("D", "must be at least 1");
      const ScanContext ctx(x, scan_options(name));
      const ScanResult r = landau_scan(ctx, D);
      if (common_.selftest) check_against(r, 1, [&](u64 n) { return reference::landau_hit(n, D); });
      finish(r);
    } else if (name == "phi-ratio") {
      const Rational eps = parse_rational("eps", eps_text);
      if (eps.num() == 0 || eps > Rational(1)) throw UsageError("eps", "must lie in (0, 1]");
      const ScanContext ctx(x, scan_options(name));
      const ScanResult r = phi_ratio_small(ctx, eps);
      if (common_.selftest) check_against(r, 1, [&](u64 n) { return reference::phi_ratio_hit(n, eps); });
      finish(r);
    } else if (name == "pipeline") {
      std::vector<u64> ys;
      for (const auto& item : split(ys_text, ',')) {
        u64 v = 0;
        try {
          v = std::stoull(item);
        } catch (const std::exception&) {
          throw UsageError("y-list", "'" + item + "' is not an integer");
        }
        if (v == 0 || v > UINT64_MAX / 2) throw UsageError("y-list", "values must lie in [1, 2^63)");
        ys.push_back(v);
      }
      const ScanContext ctx(x, scan_options(name));
      std::vector<ScanResult> rs = density_pipeline(ctx, ys);
      if (common_.selftest) {
        check_against(rs[0], 1, [&](u64 n) {
          return reference::density_hit(n, x, Rational(2), GlobalRange{}, Target::both);
        });
        for (std::size_t k = 0; k < ys.size(); ++k)
          check_against(rs[k + 1], 1, [&](u64 n) { return reference::b_hit(n, ys[k], 2 * ys[k]); });
      }
      if (common_.no_timing)
        for (auto& r : rs) r.elapsed_ms = 0;
      write(emit(rs, format()));
    } else if (name == "sieve") {
      const ScanOptions o = scan_options(name);
      SieveConfig cfg;
      cfg.limit = x;
      cfg.segment_length = o.segment_length;
      cfg.worker_count = o.workers;
      cfg.cache_path = o.cache_path;
      cfg.delivery = Delivery::concurrent;
      std::atomic<u64> checked{0};
      const auto start = std::chrono::steady_clock::now();
      const SieveSummary s = iterate_segments(cfg, [&](const SieveSegment& seg) {
        if (!common_.selftest) return;
        for (u64 n = seg.lo; n < seg.hi; ++n) {
          const Factorization f = factorize(n);
          if (seg.phi_of(n) != euler_phi(f) || seg.lambda_of(n) != carmichael(f) ||
              (n > 1 && seg.smallest_factor(n) != f.factors().front().prime))
            checked.fetch_add(1);
        }
      });
      if (checked.load() != 0) selftest_failed(std::to_string(checked.load()) + " sieve rows differ");
      const u64 ms = common_.no_timing ? 0
                                       : static_cast<u64>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                                              std::chrono::steady_clock::now() - start)
                                                              .count());
      if (format() == Format::csv) {
        write("limit,segments_total,segments_completed,values_delivered,cache_hits,cache_writes,elapsed_ms\n" +
              std::to_string(x) + "," + std::to_string(s.segments_total) + "," + std::to_string(s.segments_completed) +
              "," + std::to_string(s.values_delivered) + "," + std::to_string(s.cache_hits) + "," +
              std::to_string(s.cache_writes) + "," + std::to_string(ms) + "\n");
      } else {
        nlohmann::ordered_json j;
        j["version"] = kVersion;
        j["limit"] = x;
        j["segments_total"] = s.segments_total;
        j["segments_completed"] = s.segments_completed;
        j["values_delivered"] = s.values_delivered;
        j["cache_hits"] = s.cache_hits;
        j["cache_writes"] = s.cache_writes;
        j["elapsed_ms"] = ms;
        write(j.dump(2) + "\n");
      }
    }

    if (common_.selftest) {
      if (!selftest_errors_.empty()) {
        for (const auto& e : selftest_errors_) err_ << "dense: selftest FAILED: " << e << "\n";
        return kExitRuntime;
      }
      err_ << "dense: selftest passed\n";
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err_ << "dense: usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err_ << "dense: error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int run(std::span<const std::string> argv, std::ostream& out, std::ostream& err) {
  Runner runner(out, err);
  return runner.main(argv);
}

}  // namespace dense::cli
