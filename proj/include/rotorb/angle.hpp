#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rotorb/rational.hpp"
#include "rotorb/tolerances.hpp"

namespace rotorb {

/// Wraps any real angle into (-pi, pi].
inline double wrap_radians(double x) {
  double r = std::remainder(x, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

/// num/den times pi, normalized so that num/den lies in (-1, 1].
struct RationalPi {
  std::int64_t num = 0;
  std::int64_t den = 1;
  friend bool operator==(const RationalPi&, const RationalPi&) = default;
};

/// The angle whose cosine is `cosval`; `sine_sign` picks the half-turn.
struct AlgebraicCos {
  Rational cosval;
  int sine_sign = 1;
  friend bool operator==(const AlgebraicCos&, const AlgebraicCos&) = default;
};

struct RawRadians {
  double radians = 0.0;
  friend bool operator==(const RawRadians&, const RawRadians&) = default;
};

/// A rotation amount that keeps its exact tag. Numeric evaluation happens
/// only when a matrix is built.
class Angle {
 public:
  using Kind = std::variant<RationalPi, AlgebraicCos, RawRadians>;

  Angle() : kind_{RationalPi{}} {}

  static Angle pi_multiple(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::invalid_argument("pi multiple with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    // bring num/den into (-1, 1]
    const std::int64_t period = 2 * den;
    std::int64_t r = num % period;
    if (r < 0) r += period;
    if (r > den) r -= period;
    const Rational q{r, den};
    return Angle{RationalPi{q.num(), q.den()}};
  }

  static Angle acos_of(Rational cosval, int sine_sign = 1) {
    if (cosval < Rational{-1} || cosval > Rational{1}) {
      throw std::invalid_argument("cosine " + cosval.to_string() + " outside [-1, 1]");
    }
    if (sine_sign != 1 && sine_sign != -1) throw std::invalid_argument("sine sign must be +1 or -1");
    if (cosval == Rational{1} || cosval == Rational{-1}) sine_sign = 1;
    return Angle{AlgebraicCos{cosval, sine_sign}};
  }

  static Angle raw(double radians) {
    if (!std::isfinite(radians)) throw std::invalid_argument("angle must be finite");
    return Angle{RawRadians{wrap_radians(radians)}};
  }

  const Kind& kind() const { return kind_; }

  /// Rad, in (-pi, pi].
  double radians() const {
    return std::visit(
        [](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, RationalPi>) {
            return std::numbers::pi * static_cast<double>(k.num) / static_cast<double>(k.den);
          } else if constexpr (std::is_same_v<T, AlgebraicCos>) {
            return k.sine_sign * std::acos(k.cosval.to_double());
          } else {
            return k.radians;
          }
        },
        kind_);
  }

  /// Size = |Rad|.
  double size() const { return std::abs(radians()); }

  /// Rad of the exponent-th power, wrapped to (-pi, pi]. Exact for RationalPi tags.
  double scaled_radians(std::int64_t exponent) const {
    if (const auto* q = std::get_if<RationalPi>(&kind_)) {
      const __int128 period = 2 * static_cast<__int128>(q->den);
      __int128 r = (static_cast<__int128>(q->num) * exponent) % period;
      if (r < 0) r += period;
      if (r > q->den) r -= period;
      return std::numbers::pi * static_cast<double>(r) / static_cast<double>(q->den);
    }
    return wrap_radians(static_cast<double>(exponent) * radians());
  }

  Angle negated() const {
    return std::visit(
        [](const auto& k) -> Angle {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, RationalPi>) {
            return pi_multiple(-k.num, k.den);
          } else if constexpr (std::is_same_v<T, AlgebraicCos>) {
            return acos_of(k.cosval, -k.sine_sign);
          } else {
            return raw(-k.radians);
          }
        },
        kind_);
  }

  /// Text tag: `pi p/q`, `acos p/q +|-`, or `rad x`.
  std::string to_string() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, RationalPi>) {
            return "pi " + Rational{k.num, k.den}.to_string();
          } else if constexpr (std::is_same_v<T, AlgebraicCos>) {
            return "acos " + k.cosval.to_string() + (k.sine_sign > 0 ? " +" : " -");
          } else {
            char buf[40];
            std::snprintf(buf, sizeof buf, "rad %.17g", k.radians);
            return buf;
          }
        },
        kind_);
  }

  static Angle parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::vector<std::string> tok;
    for (std::string t; in >> t;) tok.push_back(t);
    const auto bad = [&] {
      return std::invalid_argument("malformed angle '" + std::string(text) +
                                   "' (expected 'pi p/q', 'acos p/q +|-', or 'rad x')");
    };
    if (tok.empty()) throw bad();
    if (tok[0] == "pi" && tok.size() == 2) {
      const auto q = Rational::parse(tok[1]);
      return pi_multiple(q.num(), q.den());
    }
    if (tok[0] == "acos" && (tok.size() == 2 || tok.size() == 3)) {
      int sign = 1;
      if (tok.size() == 3) {
        if (tok[2] == "+") sign = 1;
        else if (tok[2] == "-") sign = -1;
        else throw bad();
      }
      return acos_of(Rational::parse(tok[1]), sign);
    }
    if (tok[0] == "rad" && tok.size() == 2) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(tok[1], &used);
      } catch (const std::exception&) {
        throw bad();
      }
      if (used != tok[1].size()) throw bad();
      return raw(x);
    }
    throw bad();
  }

  friend bool operator==(const Angle&, const Angle&) = default;

 private:
  explicit Angle(Kind k) : kind_{std::move(k)} {}
  Kind kind_;
};

/// Rationality verdict for a rotation amount. `order` is meaningful only for
/// Rational verdicts and is the least n >= 1 with n*Rad = 0 (mod 2pi).
struct AngleClass {
  enum class Verdict { Rational, Irrational, Unknown };
  Verdict verdict = Verdict::Unknown;
  std::int64_t order = 0;

  bool finite() const { return verdict == Verdict::Rational; }
  friend bool operator==(const AngleClass&, const AngleClass&) = default;

  static AngleClass rational(std::int64_t order) { return {Verdict::Rational, order}; }
  static AngleClass irrational() { return {Verdict::Irrational, 0}; }
  static AngleClass unknown() { return {Verdict::Unknown, 0}; }
};

inline const char* verdict_name(AngleClass::Verdict v) {
  switch (v) {
    case AngleClass::Verdict::Rational: return "Rational";
    case AngleClass::Verdict::Irrational: return "Irrational";
    case AngleClass::Verdict::Unknown: return "Unknown";
  }
  return "Unknown";
}

/// Order of the rotation by (p/q)*pi with p/q in lowest terms.
inline std::int64_t rational_pi_order(std::int64_t p, std::int64_t q) {
  if (p == 0) return 1;
  return (p % 2 == 0) ? q : 2 * q;
}

inline AngleClass classify_angle(const Angle& a) {
  return std::visit(
      [](const auto& k) -> AngleClass {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, RationalPi>) {
          return AngleClass::rational(rational_pi_order(k.num, k.den));
        } else if constexpr (std::is_same_v<T, AlgebraicCos>) {
          // Niven: a rational multiple of pi has a rational cosine only at these values.
          const Rational c = k.cosval;
          if (c == Rational{1}) return AngleClass::rational(1);
          if (c == Rational{-1}) return AngleClass::rational(2);
          if (c == Rational{0}) return AngleClass::rational(4);
          if (c == Rational{1, 2}) return AngleClass::rational(6);
          if (c == Rational{-1, 2}) return AngleClass::rational(3);
          return AngleClass::irrational();
        } else {
          for (std::int64_t n = 1; n <= tol::raw_angle_max_denominator; ++n) {
            const double turns = k.radians * static_cast<double>(n) / std::numbers::pi;
            const auto m = static_cast<std::int64_t>(std::llround(turns));
            if (std::abs(k.radians - std::numbers::pi * static_cast<double>(m) / n) < tol::raw_angle_match) {
              const Rational q{m, n};
              return AngleClass::rational(rational_pi_order(q.num(), q.den()));
            }
          }
          return AngleClass::unknown();
        }
      },
      a.kind());
}

}  // namespace rotorb
