#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rotorb {

/// Exact fraction kept in lowest terms with a positive denominator.
class Rational {
 public:
  constexpr Rational() = default;

  Rational(std::int64_t num, std::int64_t den = 1) : num_{num}, den_{den} {
    if (den_ == 0) throw std::invalid_argument("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const auto g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const auto lhs = static_cast<__int128>(a.num_) * b.den_;
    const auto rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }

  Rational operator-() const { return Rational{-num_, den_}; }

  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Accepts "p" or "p/q" with optional sign on p; no whitespace inside.
  static Rational parse(std::string_view text) {
    const auto slash = text.find('/');
    const auto num = parse_int(text.substr(0, slash), text);
    if (slash == std::string_view::npos) return Rational{num};
    const auto den = parse_int(text.substr(slash + 1), text);
    return Rational{num, den};
  }

 private:
  static std::int64_t parse_int(std::string_view part, std::string_view whole) {
    if (!part.empty() && part.front() == '+') part.remove_prefix(1);
    std::int64_t value = 0;
    const auto* end = part.data() + part.size();
    const auto [ptr, ec] = std::from_chars(part.data(), end, value);
    if (part.empty() || ec != std::errc{} || ptr != end) {
      throw std::invalid_argument("not a rational number: '" + std::string(whole) + "'");
    }
    return value;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace rotorb
