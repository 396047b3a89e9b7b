#include "dense/report.hpp"

#include <cstdio>
#include <json.hpp>
#include <set>
#include <sstream>

#include "dense/errors.hpp"

namespace dense {

using nlohmann::ordered_json;

Format parse_format(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw domain_error("unknown output format '" + std::string(s) + "'");
}

namespace {

std::string join(const std::vector<u64>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(sep);
    out += std::to_string(values[i]);
  }
  return out;
}

ordered_json to_json(const ScanResult& r) {
  const Rational f = r.fraction();
  ordered_json j;
  j["version"] = kVersion;
  j["experiment_id"] = r.experiment_id;
  j["x"] = r.x;
  j["parameters"] = ordered_json::object();
  for (const auto& [k, v] : r.parameters) j["parameters"][k] = v;
  j["total"] = r.total;
  j["hits"] = r.hits;
  j["fraction_num"] = f.num();
  j["fraction_den"] = f.den();
  j["fraction_decimal"] = f.to_decimal(12);
  j["elapsed_ms"] = r.elapsed_ms;
  j["witnesses"] = r.witnesses;
  j["misses"] = r.misses;
  return j;
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string emit_csv(std::span<const ScanResult> results) {
  std::set<std::string> keys;
  for (const auto& r : results)
    for (const auto& [k, v] : r.parameters) keys.insert(k);

  std::ostringstream out;
  out << "experiment_id,x";
  for (const auto& k : keys) out << ',' << k;
  out << ",total,hits,fraction_num,fraction_den,fraction_decimal,elapsed_ms,witnesses\n";
  for (const auto& r : results) {
    const Rational f = r.fraction();
    out << r.experiment_id << ',' << r.x;
    for (const auto& k : keys) {
      out << ',';
      if (auto it = r.parameters.find(k); it != r.parameters.end()) out << it->second;
    }
    out << ',' << r.total << ',' << r.hits << ',' << f.num() << ',' << f.den() << ',' << f.to_decimal(12)
        << ',' << r.elapsed_ms << ',' << join(r.witnesses, ';') << '\n';
  }
  return out.str();
}

std::string emit_json(std::span<const ScanResult> results) {
  if (results.size() == 1) return to_json(results[0]).dump(2) + "\n";
  ordered_json arr = ordered_json::array();
  for (const auto& r : results) arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

std::string emit(std::span<const ScanResult> results, Format format) {
  return format == Format::csv ? emit_csv(results) : emit_json(results);
}

ScanResult parse_scan_result_json(std::string_view document) {
  const auto j = nlohmann::json::parse(document);
  ScanResult r;
  r.experiment_id = j.at("experiment_id").get<std::string>();
  r.x = j.at("x").get<u64>();
  for (const auto& [k, v] : j.at("parameters").items()) r.parameters[k] = v.get<std::string>();
  r.total = j.at("total").get<u64>();
  r.hits = j.at("hits").get<u64>();
  r.elapsed_ms = j.at("elapsed_ms").get<u64>();
  r.witnesses = j.at("witnesses").get<std::vector<u64>>();
  r.misses = j.value("misses", std::vector<u64>{});
  return r;
}

std::string emit(const ThetaProfile& p, Format format) {
  if (format == Format::csv) {
    std::ostringstream out;
    out << "x,c,c_decimal,prime_count,qualifying_count,fraction_decimal,elapsed_ms\n";
    for (const auto& row : p.grid) {
      const Rational f = row.prime_count ? Rational(row.qualifying_count, row.prime_count) : Rational(0);
      out << p.x << ',' << row.c.to_string() << ',' << row.c.to_decimal(6) << ',' << row.prime_count << ','
          << row.qualifying_count << ',' << f.to_decimal(12) << ',' << p.elapsed_ms << '\n';
    }
    return out.str();
  }
  ordered_json j;
  j["version"] = kVersion;
  j["experiment_id"] = "theta_profile";
  j["x"] = p.x;
  j["elapsed_ms"] = p.elapsed_ms;
  j["grid"] = ordered_json::array();
  for (const auto& row : p.grid) {
    const Rational f = row.prime_count ? Rational(row.qualifying_count, row.prime_count) : Rational(0);
    j["grid"].push_back({{"c", row.c.to_string()},
                         {"prime_count", row.prime_count},
                         {"qualifying_count", row.qualifying_count},
                         {"fraction_decimal", f.to_decimal(12)}});
  }
  return j.dump(2) + "\n";
}

std::string emit(const OmegaProfile& p, Format format) {
  if (format == Format::csv) {
    std::ostringstream out;
    out << "x,count,statistic,mean,median,d10,d20,d30,d40,d50,d60,d70,d80,d90,elapsed_ms\n";
    auto row = [&](const char* name, const DistributionSummary& s) {
      out << p.x << ',' << p.count << ',' << name << ',' << fixed(s.mean) << ',' << fixed(s.median);
      for (double d : s.deciles) out << ',' << fixed(d);
      out << ',' << p.elapsed_ms << '\n';
    };
    row("omega_phi", p.omega);
    row("omega_phi_over_loglog_sq_half", p.ratio);
    return out.str();
  }
  auto summary = [](const DistributionSummary& s) {
    ordered_json j;
    j["mean"] = fixed(s.mean);
    j["median"] = fixed(s.median);
    j["deciles"] = ordered_json::array();
    for (double d : s.deciles) j["deciles"].push_back(fixed(d));
    return j;
  };
  ordered_json j;
  j["version"] = kVersion;
  j["experiment_id"] = "omega_phi_profile";
  j["x"] = p.x;
  j["count"] = p.count;
  j["elapsed_ms"] = p.elapsed_ms;
  j["omega_phi"] = summary(p.omega);
  j["omega_phi_over_loglog_sq_half"] = summary(p.ratio);
  return j.dump(2) + "\n";
}

}  // namespace dense
