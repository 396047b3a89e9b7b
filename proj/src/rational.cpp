#include "dense/rational.hpp"

#include <charconv>
#include <numeric>
#include <string>

#include "dense/errors.hpp"

namespace dense {

Rational::Rational(u64 num, u64 den) {
  if (den == 0) throw domain_error("rational with zero denominator");
  const u64 g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
  if (num_ == 0) den_ = 1;
}

Rational Rational::one_plus_inverse(u64 h) {
  if (h == 0) throw domain_error("h must be positive");
  if (h == UINT64_MAX) throw arithmetic_error("h + 1 overflows");
  return Rational(h + 1, h);
}

namespace {

u64 parse_u64(std::string_view s, std::string_view whole) {
  u64 v = 0;
  if (s.empty()) throw domain_error("malformed rational: '" + std::string(whole) + "'");
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw domain_error("malformed rational: '" + std::string(whole) + "'");
  return v;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_u64(text.substr(0, slash), text), parse_u64(text.substr(slash + 1), text));
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return Rational(parse_u64(text, text));

  std::string_view int_part = text.substr(0, dot);
  std::string_view frac_part = text.substr(dot + 1);
  if (frac_part.size() > 18) throw domain_error("too many decimal digits: '" + std::string(text) + "'");
  if (int_part.empty() && frac_part.empty())
    throw domain_error("malformed rational: '" + std::string(text) + "'");
  u64 scale = 1;
  for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
  const u64 ip = int_part.empty() ? 0 : parse_u64(int_part, text);
  const u64 fp = frac_part.empty() ? 0 : parse_u64(frac_part, text);
  const u128 num = static_cast<u128>(ip) * scale + fp;
  if (num > UINT64_MAX) throw arithmetic_error("rational out of range: '" + std::string(text) + "'");
  return Rational(static_cast<u64>(num), scale);
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::string Rational::to_decimal(int digits) const {
  // Scale the remainder digit by digit; one extra digit drives rounding.
  u64 whole = num_ / den_;
  u128 rem = num_ % den_;
  std::string frac;
  frac.reserve(static_cast<std::size_t>(digits) + 1);
  for (int i = 0; i <= digits; ++i) {
    rem *= 10;
    frac.push_back(static_cast<char>('0' + static_cast<int>(rem / den_)));
    rem %= den_;
  }
  const bool round_up = frac.back() >= '5';
  frac.pop_back();
  if (round_up) {
    int i = digits - 1;
    for (; i >= 0; --i) {
      if (frac[static_cast<std::size_t>(i)] == '9') {
        frac[static_cast<std::size_t>(i)] = '0';
      } else {
        ++frac[static_cast<std::size_t>(i)];
        break;
      }
    }
    if (i < 0) ++whole;
  }
  std::string out = std::to_string(whole);
  if (digits > 0) out += "." + frac;
  return out;
}

Rational Rational::times(u64 k) const {
  const u64 g = std::gcd(k, den_);
  const u128 n = static_cast<u128>(num_) * (k / g);
  if (n > UINT64_MAX) throw arithmetic_error("rational product overflows");
  return Rational(static_cast<u64>(n), den_ / g);
}

}  // namespace dense
