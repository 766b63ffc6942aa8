#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "rotorb/angle.hpp"
#include "rotorb/geometry.hpp"
#include "rotorb/isometry.hpp"

namespace rotorb {

/// One power g_i^e of a generator. `gen` is a zero-based index; the text form
/// numbers generators from 1.
struct Letter {
  std::size_t gen = 0;
  std::int64_t exp = 1;
  friend bool operator==(const Letter&, const Letter&) = default;
};

template <int D>
struct Generator {
  Axis<D> axis;
  Angle angle;
  AngleClass order;
};

/// Generator rotations r_i, one per axis.
template <int D>
class GeneratorSet {
 public:
  static GeneratorSet make(const std::vector<std::pair<Axis<D>, Angle>>& specs) {
    if (specs.empty()) throw std::invalid_argument("generator list is empty");
    GeneratorSet set;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const auto& [axis, angle] = specs[i];
      for (std::size_t j = 0; j < i; ++j) {
        if (same_point_set(specs[j].first, axis)) {
          throw std::invalid_argument("generators " + std::to_string(j + 1) + " and " + std::to_string(i + 1) +
                                      " share an axis");
        }
      }
      const auto order = classify_angle(angle);
      if (order.finite() && order.order == 1) {
        throw std::invalid_argument("generator " + std::to_string(i + 1) + " is the identity rotation");
      }
      set.gens_.push_back(Generator<D>{axis, angle, order});
    }
    return set;
  }

  std::size_t size() const { return gens_.size(); }
  const Generator<D>& operator[](std::size_t i) const { return gens_.at(i); }
  const std::vector<Generator<D>>& generators() const { return gens_; }

  /// Balanced residue in (-n/2, n/2] for a generator of finite order n;
  /// unchanged otherwise.
  std::int64_t canonical_exponent(std::size_t gen, std::int64_t e) const {
    const auto& o = gens_.at(gen).order;
    if (!o.finite()) return e;
    const std::int64_t n = o.order;
    std::int64_t r = e % n;
    if (r < 0) r += n;
    if (2 * r > n) r -= n;
    return r;
  }

  /// The nonzero exponents that enumerate G_i: every nonzero residue for a
  /// finite order, else -max_exp..-1, 1..max_exp. Ascending.
  std::vector<std::int64_t> exponent_range(std::size_t gen, std::int64_t max_exp) const {
    std::vector<std::int64_t> out;
    const auto& o = gens_.at(gen).order;
    if (o.finite()) {
      const std::int64_t n = o.order;
      for (std::int64_t e = -((n - 1) / 2); e <= n / 2; ++e)
        if (e != 0) out.push_back(e);
    } else {
      for (std::int64_t e = -max_exp; e <= max_exp; ++e)
        if (e != 0) out.push_back(e);
    }
    return out;
  }

  /// r_i^e about the original (stationary) axis.
  Isometry<D> rotation(const Letter& l) const { return rotation_about(gens_.at(l.gen).axis, l); }

  /// r_i^e carried to an arbitrary axis position.
  Isometry<D> rotation_about(const Axis<D>& axis, const Letter& l) const {
    return make_rotation(axis, gens_.at(l.gen).angle.scaled_radians(l.exp));
  }

 private:
  std::vector<Generator<D>> gens_;
};

template <int D>
GeneratorSet<D> make_generators(const std::vector<std::pair<Axis<D>, Angle>>& specs) {
  return GeneratorSet<D>::make(specs);
}

/// Reduced word: adjacent letters use distinct generators, exponents are
/// nonzero canonical residues. The empty word is the identity.
class Word {
 public:
  Word() = default;

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  std::span<const Letter> span() const { return letters_; }

  /// Letter reversal; the result is still reduced.
  Word reversed() const {
    Word w;
    w.letters_.assign(letters_.rbegin(), letters_.rend());
    return w;
  }

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word& a, const Word& b) {
    return std::lexicographical_compare_three_way(
        a.letters_.begin(), a.letters_.end(), b.letters_.begin(), b.letters_.end(),
        [](const Letter& x, const Letter& y) {
          if (auto c = x.gen <=> y.gen; c != 0) return c;
          return x.exp <=> y.exp;
        });
  }

  template <int D>
  friend Word reduce(const GeneratorSet<D>& gens, std::span<const Letter> raw);

 private:
  std::vector<Letter> letters_;
};

/// Merges adjacent powers of the same generator, applies modular congruences
/// and drops identities. A stack gives the fixpoint in one pass.
template <int D>
Word reduce(const GeneratorSet<D>& gens, std::span<const Letter> raw) {
  Word w;
  auto& out = w.letters_;
  for (const auto& l : raw) {
    if (l.gen >= gens.size()) throw std::out_of_range("generator index " + std::to_string(l.gen + 1) + " out of range");
    std::int64_t e = gens.canonical_exponent(l.gen, l.exp);
    if (e == 0) continue;
    if (!out.empty() && out.back().gen == l.gen) {
      e = gens.canonical_exponent(l.gen, out.back().exp + e);
      if (e == 0) {
        out.pop_back();
      } else {
        out.back().exp = e;
      }
      continue;
    }
    out.push_back(Letter{l.gen, e});
  }
  return w;
}

template <int D>
Word reduce(const GeneratorSet<D>& gens, const std::vector<Letter>& raw) {
  return reduce(gens, std::span<const Letter>{raw});
}

template <int D>
bool is_reduced(const GeneratorSet<D>& gens, std::span<const Letter> letters) {
  for (std::size_t i = 0; i < letters.size(); ++i) {
    const auto& l = letters[i];
    if (l.gen >= gens.size() || l.exp == 0) return false;
    if (gens.canonical_exponent(l.gen, l.exp) != l.exp) return false;
    if (i > 0 && letters[i - 1].gen == l.gen) return false;
  }
  return true;
}

/// Stationary product: left-to-right fold of rotations about the fixed axes.
template <int D>
Isometry<D> stationary_eval(const GeneratorSet<D>& gens, std::span<const Letter> letters) {
  Isometry<D> m;
  for (const auto& l : letters) {
    if (l.gen >= gens.size()) throw std::out_of_range("generator index out of range");
    m = m.then(gens.rotation(l));
  }
  return m;
}

template <int D>
Isometry<D> stationary_eval(const GeneratorSet<D>& gens, const Word& w) {
  return stationary_eval(gens, w.span());
}

/// Step-by-step record of a peripatetic evaluation. Index t holds the state
/// after t letters; index 0 is the starting state.
template <int D>
struct PeripateticTrace {
  Isometry<D> total;
  std::vector<Isometry<D>> isometry_history;
  std::vector<std::vector<Axis<D>>> axis_history;
  std::vector<Vec<D>> point_history;  // empty unless a point was tracked
};

/// Peripatetic product with literal axis tracking: each letter rotates about
/// the generator's current axis position, and every axis rides along.
template <int D>
PeripateticTrace<D> peripatetic_eval(const GeneratorSet<D>& gens, std::span<const Letter> letters,
                                     std::type_identity_t<std::optional<Vec<D>>> tracked = std::nullopt) {
  PeripateticTrace<D> trace;
  std::vector<Axis<D>> axes;
  for (const auto& g : gens.generators()) axes.push_back(g.axis);
  Isometry<D> m;
  trace.isometry_history.push_back(m);
  trace.axis_history.push_back(axes);
  if (tracked) trace.point_history.push_back(*tracked);
  for (const auto& l : letters) {
    if (l.gen >= gens.size()) throw std::out_of_range("generator index out of range");
    const auto r = gens.rotation_about(axes[l.gen], l);
    m = m.then(r);
    for (auto& b : axes) b = transform_axis(r, b);
    trace.isometry_history.push_back(m);
    trace.axis_history.push_back(axes);
    if (tracked) trace.point_history.push_back(r.apply(trace.point_history.back()));
  }
  trace.total = m;
  return trace;
}

template <int D>
PeripateticTrace<D> peripatetic_eval(const GeneratorSet<D>& gens, const Word& w,
                                     std::type_identity_t<std::optional<Vec<D>>> tracked = std::nullopt) {
  return peripatetic_eval(gens, w.span(), tracked);
}

/// Isomorphism S(R) -> W(R) sending a stationary word to the peripatetic word
/// with the same action: letter reversal.
inline Word transport_isomorphism(const Word& w) { return w.reversed(); }

/// Uniform length in [0, max_len]; each letter picks a generator uniformly
/// among those allowed after its predecessor and an exponent uniformly from
/// the nonzero range (finite orders use their residues).
template <int D>
Word random_reduced_word(const GeneratorSet<D>& gens, std::size_t max_len, std::int64_t max_exp,
                         std::mt19937_64& rng) {
  if (max_exp < 1) throw std::invalid_argument("max_exp must be at least 1");
  std::uniform_int_distribution<std::size_t> len_dist(0, max_len);
  const std::size_t len = len_dist(rng);
  std::vector<Letter> letters;
  for (std::size_t t = 0; t < len; ++t) {
    std::size_t gen = 0;
    if (letters.empty()) {
      gen = std::uniform_int_distribution<std::size_t>(0, gens.size() - 1)(rng);
    } else {
      if (gens.size() < 2) break;
      gen = std::uniform_int_distribution<std::size_t>(0, gens.size() - 2)(rng);
      if (gen >= letters.back().gen) ++gen;
    }
    const auto exps = gens.exponent_range(gen, max_exp);
    std::vector<std::int64_t> allowed;
    for (auto e : exps)
      if (std::abs(e) <= max_exp) allowed.push_back(e);
    if (allowed.empty()) allowed = exps;
    const auto e = allowed[std::uniform_int_distribution<std::size_t>(0, allowed.size() - 1)(rng)];
    letters.push_back(Letter{gen, e});
  }
  return reduce(gens, letters);
}

template <int D>
Word random_reduced_word(const GeneratorSet<D>& gens, std::size_t max_len, std::int64_t max_exp,
                         std::uint64_t seed) {
  std::mt19937_64 rng{seed};
  return random_reduced_word(gens, max_len, max_exp, rng);
}

/// Parses `i^e` tokens separated by commas, e.g. "1^2, 2^-1". A bare `i`
/// means exponent 1. Indices are 1-based and checked against `gen_count`.
inline std::vector<Letter> parse_letters(std::string_view text, std::size_t gen_count) {
  std::string compact;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) compact.push_back(ch);
  std::vector<Letter> out;
  if (compact.empty()) return out;
  std::size_t pos = 0;
  while (pos <= compact.size()) {
    const auto comma = compact.find(',', pos);
    const std::string tok = compact.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto caret = tok.find('^');
    const auto bad = [&] { return std::invalid_argument("malformed word token '" + tok + "'"); };
    const auto to_int = [&](const std::string& s) {
      if (s.empty()) throw bad();
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(s, &used);
      } catch (const std::exception&) {
        throw bad();
      }
      if (used != s.size()) throw bad();
      return static_cast<std::int64_t>(v);
    };
    const auto index = to_int(tok.substr(0, caret));
    const auto exp = caret == std::string::npos ? std::int64_t{1} : to_int(tok.substr(caret + 1));
    if (index < 1 || static_cast<std::size_t>(index) > gen_count) {
      throw std::invalid_argument("word token '" + tok + "' names a generator outside 1.." + std::to_string(gen_count));
    }
    if (exp == 0) throw std::invalid_argument("word token '" + tok + "' has exponent 0");
    out.push_back(Letter{static_cast<std::size_t>(index - 1), exp});
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <int D>
Word parse_word(const GeneratorSet<D>& gens, std::string_view text) {
  return reduce(gens, parse_letters(text, gens.size()));
}

inline std::string format_word(std::span<const Letter> letters) {
  std::string out;
  for (const auto& l : letters) {
    if (!out.empty()) out += ',';
    out += std::to_string(l.gen + 1) + "^" + std::to_string(l.exp);
  }
  return out;
}

inline std::string format_word(const Word& w) { return format_word(w.span()); }

}  // namespace rotorb
