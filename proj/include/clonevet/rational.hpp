#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace clonevet {

/// Exact nonnegative-or-signed fraction over 64-bit integers, always kept in
/// lowest terms with a positive denominator. Used wherever thresholds are
/// compared with "≥" so that boundary cases are decided exactly.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  /// Parses "0.9", "9/10", "1", "1e-1" is not accepted. Throws
  /// Error(InvalidParameter) on malformed text.
  static Rational parse(std::string_view text);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  std::string to_string() const;

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) noexcept {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// True when 0 ≤ r ≤ 1.
inline bool in_unit_interval(const Rational& r) {
  return Rational(0) <= r && r <= Rational(1);
}

}  // namespace clonevet
