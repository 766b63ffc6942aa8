#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "rotorb/angle.hpp"
#include "rotorb/isometry.hpp"
#include "rotorb/rational.hpp"
#include "rotorb/tolerances.hpp"
#include "rotorb/vec.hpp"

namespace rotorb {

template <int D>
class Axis;

/// Planar rotation center.
template <>
class Axis<2> {
 public:
  Axis() = default;
  explicit Axis(const Vec2& center) : center_{center} {}

  const Vec2& center() const { return center_; }

  friend bool operator==(const Axis&, const Axis&) = default;

 private:
  Vec2 center_{};
};

/// Directed line in 3-space: base point plus unit direction.
template <>
class Axis<3> {
 public:
  Axis() : dir_{0.0, 0.0, 1.0} {}

  /// Rejects directions that are not already unit length.
  Axis(const Vec3& base, const Vec3& dir) : base_{base}, dir_{dir} {
    if (std::abs(norm(dir) - 1.0) > tol::unit_direction) {
      throw std::invalid_argument("line direction is not a unit vector");
    }
  }

  /// The line through a toward b, directed from a to b.
  static Axis through(const Vec3& a, const Vec3& b) {
    const auto d = b - a;
    const double len = norm(d);
    if (len <= tol::geometric) throw std::invalid_argument("line through coincident points");
    return Axis{a, d / len};
  }

  const Vec3& base() const { return base_; }
  const Vec3& dir() const { return dir_; }

  Axis reversed() const { return Axis{base_, -dir_}; }

  double distance_to(const Vec3& p) const { return norm(cross(p - base_, dir_)); }

  Vec3 foot_of(const Vec3& p) const { return base_ + dot(p - base_, dir_) * dir_; }

  friend bool operator==(const Axis&, const Axis&) = default;

 private:
  Vec3 base_{};
  Vec3 dir_;
};

using Point2 = Axis<2>;
using Line3 = Axis<3>;

/// Same point set: equal centers in 2D, the same undirected line in 3D.
inline bool same_point_set(const Axis<2>& a, const Axis<2>& b) {
  return distance(a.center(), b.center()) <= tol::geometric;
}

inline bool same_point_set(const Axis<3>& a, const Axis<3>& b) {
  return norm(cross(a.dir(), b.dir())) <= tol::geometric && b.distance_to(a.base()) <= tol::geometric;
}

/// Same directed line: same point set and the same direction sense.
inline bool same_directed_line(const Axis<3>& a, const Axis<3>& b) {
  return same_point_set(a, b) && dot(a.dir(), b.dir()) > 0.0;
}

/// Rotation by `radians` about the axis. In 3D positive is counterclockwise
/// by the right-hand rule about the line's direction.
inline Isometry2 make_rotation(const Axis<2>& axis, double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  Mat<2> lin;
  lin.rows[0] = {c, s};
  lin.rows[1] = {-s, c};
  const auto& u = axis.center();
  return Isometry2::from_parts(lin, u - u * lin);
}

inline Isometry3 make_rotation(const Axis<3>& axis, double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  const auto& k = axis.dir();
  // Row-vector form of Rodrigues: transpose of c I + s [k]x + (1-c) k k^T.
  Mat<3> lin;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) lin(i, j) = (1.0 - c) * k[i] * k[j] + (i == j ? c : 0.0);
  lin(0, 1) += s * k[2];
  lin(0, 2) -= s * k[1];
  lin(1, 0) -= s * k[2];
  lin(1, 2) += s * k[0];
  lin(2, 0) += s * k[1];
  lin(2, 1) -= s * k[0];
  const auto& b = axis.base();
  return Isometry3::from_parts(lin, b - b * lin);
}

template <int D>
Isometry<D> make_rotation(const Axis<D>& axis, const Angle& angle) {
  return make_rotation(axis, angle.radians());
}

inline Axis<2> transform_axis(const Isometry2& f, const Axis<2>& a) { return Axis<2>{f.apply(a.center())}; }

inline Axis<3> transform_axis(const Isometry3& f, const Axis<3>& a) {
  auto dir = a.dir() * f.linear();
  // renormalize away rounding so the unit-direction check keeps holding downstream
  dir = dir / norm(dir);
  return Axis<3>{f.apply(a.base()), dir};
}

struct LineRelation {
  enum class Kind { Parallel, Intersecting, Skew };
  Kind kind = Kind::Parallel;
  Vec3 point{};             // common point when Intersecting
  bool coincident = false;  // Parallel and the same line
  double distance = 0.0;    // closest approach
};

inline const char* kind_name(LineRelation::Kind k) {
  switch (k) {
    case LineRelation::Kind::Parallel: return "Parallel";
    case LineRelation::Kind::Intersecting: return "Intersecting";
    case LineRelation::Kind::Skew: return "Skew";
  }
  return "Parallel";
}

inline LineRelation line_relation(const Line3& l1, const Line3& l2) {
  LineRelation rel;
  const auto n = cross(l1.dir(), l2.dir());
  const double sin_angle = norm(n);
  const auto w = l2.base() - l1.base();
  if (sin_angle <= tol::geometric) {
    rel.kind = LineRelation::Kind::Parallel;
    rel.distance = l1.distance_to(l2.base());
    rel.coincident = rel.distance <= tol::geometric;
    return rel;
  }
  rel.distance = std::abs(dot(w, n)) / sin_angle;
  if (rel.distance > tol::geometric) {
    rel.kind = LineRelation::Kind::Skew;
    return rel;
  }
  // closest points of the two lines; they agree up to tolerance here
  const double b = dot(l1.dir(), l2.dir());
  const double d = dot(l1.dir(), w);
  const double e = dot(l2.dir(), w);
  const double denom = 1.0 - b * b;
  const double t1 = (d - b * e) / denom;
  const double t2 = (b * d - e) / denom;
  const auto p1 = l1.base() + t1 * l1.dir();
  const auto p2 = l2.base() + t2 * l2.dir();
  rel.kind = LineRelation::Kind::Intersecting;
  rel.point = (p1 + p2) * 0.5;
  return rel;
}

/// Best p/q with q <= max_den within `tolerance` of x, if any.
inline std::optional<Rational> recognize_rational(double x, std::int64_t max_den, double tolerance) {
  for (std::int64_t q = 1; q <= max_den; ++q) {
    const auto p = static_cast<std::int64_t>(std::llround(x * static_cast<double>(q)));
    if (std::abs(x - static_cast<double>(p) / static_cast<double>(q)) <= tolerance) return Rational{p, q};
  }
  return std::nullopt;
}

struct Conformity {
  double cosine = 0.0;
  std::optional<Rational> exact_cosine;
  AngleClass angle_class;
};

/// Classifies the angle between two nonparallel directions. Translating one
/// line onto the other leaves this angle unchanged, so only directions matter.
template <int D>
Conformity conform_rationally(const Vec<D>& dir1, const Vec<D>& dir2) {
  const double n1 = norm(dir1);
  const double n2 = norm(dir2);
  if (n1 <= tol::geometric || n2 <= tol::geometric) throw std::invalid_argument("zero direction vector");
  Conformity out;
  out.cosine = std::clamp(dot(dir1, dir2) / (n1 * n2), -1.0, 1.0);
  if (1.0 - std::abs(out.cosine) <= tol::geometric) {
    throw std::invalid_argument("lines are parallel; no angle is formed");
  }
  out.exact_cosine =
      recognize_rational(out.cosine, tol::rational_cosine_max_denominator, tol::rational_cosine_match);
  out.angle_class =
      out.exact_cosine ? classify_angle(Angle::acos_of(*out.exact_cosine, 1)) : AngleClass::unknown();
  return out;
}

inline Conformity conform_rationally(const Line3& l1, const Line3& l2) {
  return conform_rationally(l1.dir(), l2.dir());
}

}  // namespace rotorb
