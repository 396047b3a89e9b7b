#pragma once

#include <span>
#include <string>
#include <string_view>

#include "dense/experiments.hpp"

namespace dense {

inline constexpr std::string_view kVersion = "dense 1.0.0";

enum class Format { csv, json };

Format parse_format(std::string_view s);

// CSV columns, in order:
//   experiment_id, x, <parameter keys, sorted; union over all rows>,
//   total, hits, fraction_num, fraction_den, fraction_decimal (12 digits),
//   elapsed_ms, witnesses (semicolon-joined, possibly empty)
// One header line, one line per result.
std::string emit_csv(std::span<const ScanResult> results);

// Same fields as the CSV plus "misses" and "version". A single result is
// emitted as an object, several as an array.
std::string emit_json(std::span<const ScanResult> results);

std::string emit(std::span<const ScanResult> results, Format format);

// Inverse of emit_json for one result object.
ScanResult parse_scan_result_json(std::string_view document);

std::string emit(const ThetaProfile& profile, Format format);
std::string emit(const OmegaProfile& profile, Format format);

}  // namespace dense
