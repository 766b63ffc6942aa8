#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rotorb/angle.hpp"
#include "rotorb/geometry.hpp"
#include "rotorb/spatial_hash.hpp"
#include "rotorb/tolerances.hpp"
#include "rotorb/words.hpp"

namespace rotorb {

/// Deduplicated orbit sample. No two stored points are closer than
/// `dedup_cell` in Chebyshev distance; the first arrival wins.
template <int D>
class OrbitCloud {
 public:
  explicit OrbitCloud(double dedup_cell = tol::dedup_cell, bool record_words = false)
      : dedup_cell_{dedup_cell}, record_words_{record_words}, hash_{dedup_cell} {}

  /// Returns false when p duplicates a stored point.
  bool insert(const Vec<D>& p, int word_len, const std::vector<Letter>* word = nullptr) {
    if (contains(p)) return false;
    hash_.insert(static_cast<std::uint32_t>(points_.size()), p);
    points_.push_back(p);
    word_len_.push_back(word_len);
    if (record_words_) words_.push_back(word ? *word : std::vector<Letter>{});
    return true;
  }

  bool contains(const Vec<D>& p) const {
    bool hit = false;
    hash_.for_each_nearby(p, 1, [&](std::uint32_t i) {
      if (!hit && chebyshev(points_[i], p) < dedup_cell_) hit = true;
    });
    return hit;
  }

  const std::vector<Vec<D>>& points() const { return points_; }
  const std::vector<int>& word_len() const { return word_len_; }
  /// Generating letters per point; empty unless recording was requested.
  const std::vector<std::vector<Letter>>& words() const { return words_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  double dedup_cell() const { return dedup_cell_; }
  bool truncated() const { return truncated_; }
  void mark_truncated() { truncated_ = true; }
  int max_word_len() const { return word_len_.empty() ? 0 : *std::max_element(word_len_.begin(), word_len_.end()); }

 private:
  double dedup_cell_;
  bool record_words_;
  bool truncated_ = false;
  std::vector<Vec<D>> points_;
  std::vector<int> word_len_;
  std::vector<std::vector<Letter>> words_;
  SpatialHash<D> hash_;
};

struct SamplerBudget {
  std::size_t max_len = 0;
  std::int64_t max_exp = 1;
  std::size_t max_points = 100000;

  void validate() const {
    if (max_exp < 1) throw std::invalid_argument("budget.max_exp must be positive");
    if (max_points < 1) throw std::invalid_argument("budget.max_points must be positive");
  }
};

enum class Mode { Stationary, Peripatetic };

inline const char* mode_name(Mode m) { return m == Mode::Stationary ? "stationary" : "peripatetic"; }

inline Mode parse_mode(std::string_view s) {
  if (s == "stationary") return Mode::Stationary;
  if (s == "peripatetic") return Mode::Peripatetic;
  throw std::invalid_argument("unknown mode '" + std::string(s) + "' (expected stationary or peripatetic)");
}

struct BfsOptions {
  double dedup_cell = tol::dedup_cell;
  bool record_words = false;
};

/// Breadth-first enumeration of P f over reduced words f, shortest first.
/// Children are ordered by generator index, then by ascending exponent.
/// Peripatetic states carry the cumulative isometry so that each letter turns
/// about the generator's transported axis.
template <int D>
OrbitCloud<D> bfs_orbit(const GeneratorSet<D>& gens, const Vec<D>& p, Mode mode, const SamplerBudget& budget,
                        const BfsOptions& opts = {}) {
  budget.validate();
  for (int i = 0; i < D; ++i)
    if (!std::isfinite(p[i])) throw std::invalid_argument("orbit seed point must be finite");

  struct State {
    Vec<D> point;
    Isometry<D> total;
    std::size_t last = std::numeric_limits<std::size_t>::max();
    std::vector<Letter> word;
  };

  const std::size_t n = gens.size();
  std::vector<std::vector<std::int64_t>> exps(n);
  std::vector<std::vector<Isometry<D>>> fixed_rot(n);
  for (std::size_t g = 0; g < n; ++g) {
    exps[g] = gens.exponent_range(g, budget.max_exp);
    for (auto e : exps[g]) fixed_rot[g].push_back(gens.rotation(Letter{g, e}));
  }

  OrbitCloud<D> cloud{opts.dedup_cell, opts.record_words};
  const std::vector<Letter> empty_word;
  cloud.insert(p, 0, opts.record_words ? &empty_word : nullptr);
  if (cloud.size() >= budget.max_points && budget.max_len > 0) {
    cloud.mark_truncated();
    return cloud;
  }

  std::vector<State> frontier{State{p, Isometry<D>{}, std::numeric_limits<std::size_t>::max(), {}}};
  for (std::size_t depth = 1; depth <= budget.max_len; ++depth) {
    const bool keep_children = depth < budget.max_len;
    std::vector<State> next;
    for (const auto& s : frontier) {
      for (std::size_t g = 0; g < n; ++g) {
        if (g == s.last) continue;
        std::optional<Axis<D>> moved_axis;
        if (mode == Mode::Peripatetic) moved_axis = transform_axis(s.total, gens[g].axis);
        for (std::size_t k = 0; k < exps[g].size(); ++k) {
          const Letter letter{g, exps[g][k]};
          State child;
          child.last = g;
          if (mode == Mode::Stationary) {
            child.point = fixed_rot[g][k].apply(s.point);
          } else {
            const auto r = gens.rotation_about(*moved_axis, letter);
            child.point = r.apply(s.point);
            if (keep_children) child.total = s.total.then(r);
          }
          if (opts.record_words) {
            child.word = s.word;
            child.word.push_back(letter);
          }
          cloud.insert(child.point, static_cast<int>(depth), opts.record_words ? &child.word : nullptr);
          if (cloud.size() >= budget.max_points) {
            cloud.mark_truncated();
            return cloud;
          }
          if (keep_children) next.push_back(std::move(child));
        }
      }
    }
    frontier = std::move(next);
  }
  return cloud;
}

/// Circular gaps of the fractional parts {j x : 0 <= j < n}.
struct GapReport {
  std::size_t n = 0;
  std::size_t distinct_points = 0;
  std::vector<std::pair<double, std::size_t>> gaps;  // ascending length, multiplicity
  double max_gap = 0.0;
  double min_gap = 0.0;
  bool exact = false;  // true when computed in exact rational arithmetic

  std::size_t distinct_gap_count() const { return gaps.size(); }
  double total() const {
    double s = 0.0;
    for (const auto& [len, mult] : gaps) s += len * static_cast<double>(mult);
    return s;
  }
};

namespace detail {

/// positions j*step mod modulus, j < n, all in exact integer arithmetic.
inline GapReport gaps_from_residues(unsigned __int128 step, unsigned __int128 modulus, std::size_t n) {
  GapReport rep;
  rep.n = n;
  std::vector<unsigned __int128> pos(n);
  for (std::size_t j = 0; j < n; ++j) pos[j] = (static_cast<unsigned __int128>(j) * step) % modulus;
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  rep.distinct_points = pos.size();
  std::vector<unsigned __int128> raw;
  raw.reserve(pos.size());
  for (std::size_t i = 1; i < pos.size(); ++i) raw.push_back(pos[i] - pos[i - 1]);
  raw.push_back(modulus - pos.back() + pos.front());
  std::sort(raw.begin(), raw.end());
  const auto to_real = [&](unsigned __int128 g) {
    return static_cast<double>(static_cast<long double>(g) / static_cast<long double>(modulus));
  };
  for (std::size_t i = 0; i < raw.size();) {
    std::size_t j = i;
    while (j < raw.size() && raw[j] == raw[i]) ++j;
    rep.gaps.emplace_back(to_real(raw[i]), j - i);
    i = j;
  }
  rep.min_gap = rep.gaps.front().first;
  rep.max_gap = rep.gaps.back().first;
  return rep;
}

}  // namespace detail

/// Gap statistics for x = turn fraction in [0, 1). The real x is replaced by
/// the nearest multiple of 2^-64 and all positions are then exact, so gap
/// lengths compare without tolerance.
inline GapReport circle_gap_stats_turns(double x, std::size_t n) {
  if (n < 1) throw std::invalid_argument("gap statistics need n >= 1");
  if (!std::isfinite(x)) throw std::invalid_argument("turn fraction must be finite");
  long double frac = static_cast<long double>(x) - std::floor(static_cast<long double>(x));
  const long double scaled = std::ldexp(frac, 64);
  const unsigned __int128 modulus = static_cast<unsigned __int128>(1) << 64;
  auto step = static_cast<unsigned __int128>(std::floor(scaled + 0.5L));
  step %= modulus;
  return detail::gaps_from_residues(step, modulus, n);
}

/// Gap statistics for the rotation's orbit on a circle: x = Rad / 2pi.
/// Exact for rational multiples of pi.
inline GapReport circle_gap_stats(const Angle& rho, std::size_t n) {
  if (n < 1) throw std::invalid_argument("gap statistics need n >= 1");
  if (const auto* q = std::get_if<RationalPi>(&rho.kind())) {
    const std::int64_t modulus = 2 * q->den;
    std::int64_t step = q->num % modulus;
    if (step < 0) step += modulus;
    auto rep = detail::gaps_from_residues(static_cast<unsigned __int128>(step),
                                          static_cast<unsigned __int128>(modulus), n);
    rep.exact = true;
    return rep;
  }
  return circle_gap_stats_turns(rho.radians() / (2.0 * std::numbers::pi), n);
}

template <int D>
struct LadderStage {
  int stage = 0;
  OrbitCloud<D> points;
  std::size_t axis_used = 0;
  std::int64_t exp_bound = 0;
};

template <int D>
struct Ladder {
  std::array<double, 2> rho{};
  std::array<std::int64_t, 2> k{};
  std::vector<LadderStage<D>> stages;
  bool truncated = false;
};

/// k = floor(1/rho) for rho = Size/pi of an infinite-order generator,
/// guarded so that k*rho < 1 < (k+1)*rho is numerically certain.
inline std::int64_t ladder_k(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("ladder needs Size/pi in (0, 1)");
  const double inv = 1.0 / rho;
  if (std::abs(inv - std::round(inv)) <= tol::ladder_integer_guard) {
    throw std::invalid_argument("1/rho is too close to an integer for k to be well defined");
  }
  return static_cast<std::int64_t>(std::floor(inv));
}

/// Back-and-forth ladder of nested orbit subsets about two fixed centers:
/// stage b applies generator 1 (odd b) or 2 (even b) with exponents
/// 0..2^b k_i to every point of stage b-1, starting from {V}.
template <int D>
Ladder<D> ladder_orbit(const GeneratorSet<D>& gens, const Vec<D>& v, int stages,
                       double dedup_cell = tol::dedup_cell, std::size_t max_points = 5'000'000) {
  if (gens.size() != 2) throw std::invalid_argument("ladder needs exactly two generators");
  if (stages < 1) throw std::invalid_argument("ladder needs at least one stage");
  Ladder<D> out;
  for (std::size_t i = 0; i < 2; ++i) {
    if (gens[i].order.finite()) {
      throw std::invalid_argument("ladder generator " + std::to_string(i + 1) + " has finite order");
    }
    out.rho[i] = gens[i].angle.size() / std::numbers::pi;
    out.k[i] = ladder_k(out.rho[i]);
  }
  OrbitCloud<D> prev{dedup_cell};
  prev.insert(v, 0);
  for (int b = 1; b <= stages; ++b) {
    const std::size_t g = (b % 2 == 1) ? 0 : 1;
    const std::int64_t bound = (std::int64_t{1} << b) * out.k[g];
    if (prev.size() * static_cast<std::size_t>(bound + 1) > max_points) {
      out.truncated = true;
      break;
    }
    std::vector<Isometry<D>> powers;
    for (std::int64_t j = 1; j <= bound; ++j) powers.push_back(gens.rotation(Letter{g, j}));
    OrbitCloud<D> cur{dedup_cell};
    for (std::size_t i = 0; i < prev.size(); ++i) cur.insert(prev.points()[i], prev.word_len()[i]);
    for (const auto& a : prev.points())
      for (const auto& r : powers) cur.insert(r.apply(a), b);
    out.stages.push_back(LadderStage<D>{b, cur, g, bound});
    prev = std::move(cur);
  }
  return out;
}

template <int D>
struct Ball {
  Vec<D> center{};
  double radius = 1.0;
};

/// Largest distance from a probe-grid candidate inside the ball to its
/// nearest cloud point: a grid approximation of the largest empty disc
/// (ball) centered in the probe region.
template <int D>
double mesh_estimate(const OrbitCloud<D>& cloud, const Ball<D>& probe, int grid_res) {
  if (cloud.empty()) throw std::invalid_argument("mesh estimate of an empty cloud");
  if (!(probe.radius > 0.0)) throw std::invalid_argument("probe radius must be positive");
  if (grid_res < 1) throw std::invalid_argument("grid resolution must be positive");
  const NearestIndex<D> index{std::span<const Vec<D>>{cloud.points()}};
  const double step = 2.0 * probe.radius / grid_res;
  double worst = 0.0;
  std::array<int, D> idx{};
  while (true) {
    Vec<D> q;
    for (int d = 0; d < D; ++d) q[d] = probe.center[d] - probe.radius + (idx[d] + 0.5) * step;
    if (distance(q, probe.center) <= probe.radius) worst = std::max(worst, index.nearest_distance(q));
    int d = 0;
    while (d < D && ++idx[d] == grid_res) idx[d++] = 0;
    if (d == D) break;
  }
  return worst;
}

/// Fraction of grid cells (n per side over the ball's bounding cube) whose
/// centers lie in the ball and that hold at least one cloud point.
template <int D>
double coverage(const OrbitCloud<D>& cloud, const Ball<D>& ball, int n) {
  if (n < 1) throw std::invalid_argument("coverage needs at least one cell per side");
  const double step = 2.0 * ball.radius / n;
  std::size_t total_cells = 1;
  for (int d = 0; d < D; ++d) total_cells *= static_cast<std::size_t>(n);
  std::vector<char> hit(total_cells, 0);
  for (const auto& p : cloud.points()) {
    std::size_t flat = 0;
    bool inside = true;
    for (int d = D - 1; d >= 0; --d) {
      const double t = (p[d] - (ball.center[d] - ball.radius)) / step;
      if (!(t >= 0.0 && t < n)) {
        inside = false;
        break;
      }
      flat = flat * n + static_cast<std::size_t>(t);
    }
    if (inside) hit[flat] = 1;
  }
  std::size_t counted = 0, covered = 0;
  std::array<int, D> idx{};
  for (std::size_t flat = 0; flat < total_cells; ++flat) {
    std::size_t rem = flat;
    for (int d = 0; d < D; ++d) {
      idx[d] = static_cast<int>(rem % n);
      rem /= n;
    }
    Vec<D> c;
    for (int d = 0; d < D; ++d) c[d] = ball.center[d] - ball.radius + (idx[d] + 0.5) * step;
    if (distance(c, ball.center) > ball.radius) continue;
    ++counted;
    covered += hit[flat] ? 1 : 0;
  }
  return counted == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(counted);
}

struct SphereConfinement {
  double max_abs_deviation = 0.0;
  bool pass = true;
};

inline SphereConfinement sphere_confinement_check(const OrbitCloud<3>& cloud, const Vec3& v, double r0) {
  SphereConfinement out;
  for (const auto& q : cloud.points()) out.max_abs_deviation = std::max(out.max_abs_deviation, std::abs(distance(q, v) - r0));
  out.pass = out.max_abs_deviation < tol::sphere_confinement;
  return out;
}

struct Discreteness {
  std::size_t distinct_count = 0;
  double min_distance = std::numeric_limits<double>::infinity();
};

template <int D>
Discreteness discreteness_report(const OrbitCloud<D>& cloud) {
  if (cloud.empty()) throw std::invalid_argument("discreteness report of an empty cloud");
  Discreteness out;
  out.distinct_count = cloud.size();
  const NearestIndex<D> index{std::span<const Vec<D>>{cloud.points()}};
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out.min_distance = std::min(out.min_distance, index.nearest_distance(cloud.points()[i], i));
  }
  return out;
}

}  // namespace rotorb
