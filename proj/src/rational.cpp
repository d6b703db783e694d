#include "clonevet/rational.hpp"

#include <cctype>
#include <numeric>

#include "clonevet/error.hpp"

namespace clonevet {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::InvalidParameter, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

namespace {

std::int64_t parse_digits(std::string_view s, std::string_view whole) {
  if (s.empty() || s.size() > 18) {
    throw Error(ErrorCode::InvalidParameter,
                "cannot parse rational '" + std::string(whole) + "'");
  }
  std::int64_t v = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw Error(ErrorCode::InvalidParameter,
                  "cannot parse rational '" + std::string(whole) + "'");
    }
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational r;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    r = Rational(parse_digits(s.substr(0, slash), text),
                 parse_digits(s.substr(slash + 1), text));
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) {
      throw Error(ErrorCode::InvalidParameter,
                  "cannot parse rational '" + std::string(text) + "'");
    }
    std::int64_t whole = int_part.empty() ? 0 : parse_digits(int_part, text);
    std::int64_t frac = frac_part.empty() ? 0 : parse_digits(frac_part, text);
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    r = Rational(whole * scale + frac, scale);
  } else {
    r = Rational(parse_digits(s, text));
  }
  return negative ? Rational(-r.num(), r.den()) : r;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace clonevet
