#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "rotorb/vec.hpp"

namespace rotorb {

template <int D>
using CellKey = std::array<std::int64_t, D>;

template <int D>
struct CellKeyHash {
  std::size_t operator()(const CellKey<D>& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (auto v : k) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

/// Uniform-grid bucket index over a point list it does not own.
template <int D>
class SpatialHash {
 public:
  explicit SpatialHash(double cell) : cell_{cell} {
    if (!(cell > 0.0)) throw std::invalid_argument("spatial hash cell must be positive");
  }

  double cell() const { return cell_; }

  CellKey<D> key_of(const Vec<D>& p) const {
    CellKey<D> k;
    for (int i = 0; i < D; ++i) k[i] = static_cast<std::int64_t>(std::floor(p[i] / cell_));
    return k;
  }

  void insert(std::uint32_t index, const Vec<D>& p) { buckets_[key_of(p)].push_back(index); }

  const std::vector<std::uint32_t>* bucket(const CellKey<D>& k) const {
    const auto it = buckets_.find(k);
    return it == buckets_.end() ? nullptr : &it->second;
  }

  /// Calls f(index) for every point in the cells within `reach` cells of p.
  template <typename F>
  void for_each_nearby(const Vec<D>& p, int reach, F&& f) const {
    const auto base = key_of(p);
    CellKey<D> k = base;
    visit_box(base, k, 0, reach, f);
  }

  /// Calls f(index) for every point in the cells at Chebyshev ring `r` around `center`.
  template <typename F>
  void for_each_in_ring(const CellKey<D>& center, std::int64_t r, F&& f) const {
    CellKey<D> k = center;
    visit_ring(center, k, 0, r, false, f);
  }

 private:
  template <typename F>
  void visit_box(const CellKey<D>& base, CellKey<D>& k, int dim, int reach, F& f) const {
    if (dim == D) {
      if (const auto* b = bucket(k)) for (auto i : *b) f(i);
      return;
    }
    for (std::int64_t o = -reach; o <= reach; ++o) {
      k[dim] = base[dim] + o;
      visit_box(base, k, dim + 1, reach, f);
    }
  }

  template <typename F>
  void visit_ring(const CellKey<D>& center, CellKey<D>& k, int dim, std::int64_t r, bool on_shell, F& f) const {
    if (dim == D) {
      if (!on_shell) return;
      if (const auto* b = bucket(k)) for (auto i : *b) f(i);
      return;
    }
    if (dim == D - 1 && !on_shell) {
      // only the two faces remain for this coordinate
      k[dim] = center[dim] - r;
      visit_ring(center, k, dim + 1, r, true, f);
      if (r > 0) {
        k[dim] = center[dim] + r;
        visit_ring(center, k, dim + 1, r, true, f);
      }
      return;
    }
    for (std::int64_t o = -r; o <= r; ++o) {
      k[dim] = center[dim] + o;
      visit_ring(center, k, dim + 1, r, on_shell || o == -r || o == r, f);
    }
  }

  double cell_;
  std::unordered_map<CellKey<D>, std::vector<std::uint32_t>, CellKeyHash<D>> buckets_;
};

/// Nearest-neighbor queries by expanding rings over a SpatialHash; falls back
/// to a linear scan for small clouds or when the ring search gets too wide.
template <int D>
class NearestIndex {
 public:
  explicit NearestIndex(std::span<const Vec<D>> points) : points_{points}, hash_{choose_cell(points)} {
    for (std::size_t i = 0; i < points_.size(); ++i) hash_.insert(static_cast<std::uint32_t>(i), points_[i]);
    if (!points_.empty()) {
      lo_ = hi_ = hash_.key_of(points_[0]);
      for (const auto& p : points_) {
        const auto k = hash_.key_of(p);
        for (int d = 0; d < D; ++d) {
          lo_[d] = std::min(lo_[d], k[d]);
          hi_[d] = std::max(hi_[d], k[d]);
        }
      }
    }
  }

  /// Distance from q to the closest point, skipping index `skip` if given.
  /// +inf when no candidate exists.
  double nearest_distance(const Vec<D>& q, std::optional<std::size_t> skip = std::nullopt) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (points_.size() <= kLinearScan) return linear(q, skip);
    double best = inf;
    const auto center = hash_.key_of(q);
    std::int64_t rmax = 0;
    for (int d = 0; d < D; ++d) {
      rmax = std::max(rmax, std::abs(center[d] - lo_[d]));
      rmax = std::max(rmax, std::abs(center[d] - hi_[d]));
    }
    std::size_t scanned_cells = 0;
    for (std::int64_t r = 0; r <= rmax; ++r) {
      hash_.for_each_in_ring(center, r, [&](std::uint32_t i) {
        if (skip && *skip == i) return;
        best = std::min(best, distance(q, points_[i]));
      });
      if (best <= static_cast<double>(r) * hash_.cell()) break;
      scanned_cells += ring_cells(r);
      if (scanned_cells > 4 * points_.size() + 64) return linear(q, skip);
    }
    return best;
  }

 private:
  static constexpr std::size_t kLinearScan = 64;

  static std::size_t ring_cells(std::int64_t r) {
    const auto side = static_cast<std::size_t>(2 * r + 1);
    const auto inner = r == 0 ? 0 : static_cast<std::size_t>(2 * r - 1);
    std::size_t a = 1, b = 1;
    for (int d = 0; d < D; ++d) {
      a *= side;
      b *= inner;
    }
    return a - b;
  }

  static double choose_cell(std::span<const Vec<D>> pts) {
    if (pts.size() < 2) return 1.0;
    double extent = 0.0;
    for (int d = 0; d < D; ++d) {
      double lo = pts[0][d], hi = pts[0][d];
      for (const auto& p : pts) {
        lo = std::min(lo, p[d]);
        hi = std::max(hi, p[d]);
      }
      extent = std::max(extent, hi - lo);
    }
    if (extent <= 0.0) return 1.0;
    const double per_side = std::ceil(std::pow(static_cast<double>(pts.size()), 1.0 / D));
    return extent / per_side;
  }

  double linear(const Vec<D>& q, std::optional<std::size_t> skip) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (skip && *skip == i) continue;
      best = std::min(best, distance(q, points_[i]));
    }
    return best;
  }

  std::span<const Vec<D>> points_;
  SpatialHash<D> hash_;
  CellKey<D> lo_{}, hi_{};
};

}  // namespace rotorb
