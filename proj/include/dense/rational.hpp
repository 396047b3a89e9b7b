#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace dense {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Exact non-negative fraction num/den kept in lowest terms. Comparisons
// cross-multiply in 128 bits and never overflow.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(u64 num, u64 den = 1);

  // One plus 1/h, the density parameter (h+1)/h.
  static Rational one_plus_inverse(u64 h);

  // Accepts "3", "3/2", "0.25" and "1.5"; at most 18 fractional digits.
  static Rational parse(std::string_view text);

  u64 num() const noexcept { return num_; }
  u64 den() const noexcept { return den_; }

  bool is_integer() const noexcept { return den_ == 1; }
  u64 floor() const noexcept { return num_ / den_; }
  u64 ceil() const noexcept { return num_ / den_ + (num_ % den_ != 0); }

  // "num/den", or just "num" for integers.
  std::string to_string() const;
  // Fixed-point rendering with `digits` decimals, rounded half-up, computed
  // exactly with integer long division.
  std::string to_decimal(int digits) const;
  double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  // this * k, exact; throws arithmetic_error if the reduced result overflows.
  Rational times(u64 k) const;

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    return static_cast<u128>(a.num_) * b.den_ <=> static_cast<u128>(b.num_) * a.den_;
  }
  friend bool operator==(const Rational& a, u64 k) noexcept {
    return a.den_ == 1 && a.num_ == k;
  }
  friend std::strong_ordering operator<=>(const Rational& a, u64 k) noexcept {
    return static_cast<u128>(a.num_) <=> static_cast<u128>(k) * a.den_;
  }

 private:
  u64 num_ = 0;
  u64 den_ = 1;
};

// u * y <=> z for integers y, z, exactly.
inline std::strong_ordering compare_scaled(const Rational& u, u64 y, u64 z) noexcept {
  return static_cast<u128>(u.num()) * y <=> static_cast<u128>(z) * u.den();
}

}  // namespace dense
