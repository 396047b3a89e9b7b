#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dense {

// Input outside an operation's domain (n = 0, gcd(a, n) != 1, interval below 1).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Result does not fit in 64 bits.
class arithmetic_error : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// Divisor enumeration would exceed the configured cap.
class capacity_error : public std::length_error {
 public:
  using std::length_error::length_error;
};

// A certificate extension violates the chain inequality.
class certificate_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Cache file failed its checksum or header validation.
class integrity_error : public std::runtime_error {
 public:
  integrity_error(const std::string& what, std::uint64_t segment_index)
      : std::runtime_error(what), segment_index_(segment_index) {}

  std::uint64_t segment_index() const noexcept { return segment_index_; }

 private:
  std::uint64_t segment_index_;
};

class not_found_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dense
