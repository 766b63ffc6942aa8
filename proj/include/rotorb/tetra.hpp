#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rotorb/geometry.hpp"
#include "rotorb/orbit.hpp"
#include "rotorb/words.hpp"

namespace rotorb {

inline constexpr std::array<char, 4> kVertexLabels{'A', 'B', 'C', 'D'};

/// Edges in generator order: AB, AC, AD, BC, BD, CD.
inline constexpr std::array<std::array<int, 2>, 6> kEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

inline std::string edge_name(std::size_t e) {
  return {kVertexLabels[kEdges.at(e)[0]], kVertexLabels[kEdges.at(e)[1]]};
}

/// Index of the edge joining two labels, in either order ("AB" == "BA").
inline std::size_t edge_index(std::string_view key) {
  const auto bad = [&] { return std::invalid_argument("unknown edge key '" + std::string(key) + "'"); };
  if (key.size() != 2) throw bad();
  int a = std::toupper(static_cast<unsigned char>(key[0])) - 'A';
  int b = std::toupper(static_cast<unsigned char>(key[1])) - 'A';
  if (a < 0 || a > 3 || b < 0 || b > 3 || a == b) throw bad();
  if (a > b) std::swap(a, b);
  for (std::size_t e = 0; e < kEdges.size(); ++e)
    if (kEdges[e][0] == a && kEdges[e][1] == b) return e;
  throw bad();
}

/// Regular tetrahedron with labeled vertices A, B, C, D.
class Tetrahedron {
 public:
  /// Checks regularity within tol::geometric and positive orientation, i.e.
  /// (A-D) . ((B-D) x (C-D)) > 0.
  static Tetrahedron from_vertices(const std::array<Vec3, 4>& v) {
    const double edge = distance(v[0], v[1]);
    if (!(edge > tol::geometric)) throw std::invalid_argument("degenerate tetrahedron");
    for (const auto& [i, j] : kEdges) {
      if (std::abs(distance(v[i], v[j]) - edge) > tol::geometric) {
        throw std::invalid_argument("tetrahedron is not regular");
      }
    }
    Tetrahedron t;
    t.vertices_ = v;
    t.edge_length_ = edge;
    if (t.signed_volume() <= 0.0) throw std::invalid_argument("tetrahedron is negatively oriented");
    return t;
  }

  const std::array<Vec3, 4>& vertices() const { return vertices_; }
  const Vec3& vertex(std::size_t i) const { return vertices_.at(i); }
  double edge_length() const { return edge_length_; }

  double signed_volume() const {
    const auto& v = vertices_;
    return dot(v[0] - v[3], cross(v[1] - v[3], v[2] - v[3])) / 6.0;
  }

  Vec3 barycenter() const { return (vertices_[0] + vertices_[1] + vertices_[2] + vertices_[3]) * 0.25; }

 private:
  std::array<Vec3, 4> vertices_{};
  double edge_length_ = 0.0;
};

/// Vertices s(1,1,1), s(1,-1,-1), s(-1,1,-1), s(-1,-1,1), s = edge/(2 sqrt 2).
inline Tetrahedron regular_tetrahedron(double edge_length) {
  if (!(edge_length > 0.0)) throw std::invalid_argument("edge length must be positive");
  const double s = edge_length / (2.0 * std::sqrt(2.0));
  return Tetrahedron::from_vertices({Vec3{s, s, s}, Vec3{s, -s, -s}, Vec3{-s, s, -s}, Vec3{-s, -s, s}});
}

/// Interior dihedral angle between faces sharing edge (i, j), computed from
/// face normals.
inline double numeric_dihedral(const Tetrahedron& t, std::size_t edge) {
  const auto [i, j] = kEdges.at(edge);
  std::array<int, 2> rest{};
  int r = 0;
  for (int k = 0; k < 4; ++k)
    if (k != i && k != j) rest[r++] = k;
  const auto& a = t.vertex(i);
  const auto axis = t.vertex(j) - a;
  const auto ax = axis / norm(axis);
  // components of the two off-edge vertices perpendicular to the edge
  auto p = t.vertex(rest[0]) - a;
  auto q = t.vertex(rest[1]) - a;
  p = p - dot(p, ax) * ax;
  q = q - dot(q, ax) * ax;
  return std::acos(std::clamp(dot(p, q) / (norm(p) * norm(q)), -1.0, 1.0));
}

/// theta with cos theta = 1/3, cross-checked against the geometry.
inline Angle dihedral_angle(const Tetrahedron& t) {
  const auto theta = Angle::acos_of(Rational{1, 3}, 1);
  for (std::size_t e = 0; e < kEdges.size(); ++e) {
    if (std::abs(numeric_dihedral(t, e) - theta.radians()) > tol::geometric) {
      throw std::invalid_argument("degenerate tetrahedron: dihedral angle differs from arccos(1/3)");
    }
  }
  return theta;
}

struct EdgeRotation {
  std::size_t u = 0, v = 0;  // vertex indices, u < v
  Line3 axis;
  Angle angle;
  int direction_sign = 1;  // +1: axis directed u -> v, -1: v -> u
};

/// Six edge generators of size pi - theta. The positive sense on edge UV
/// (remaining vertices X < Y by label) is the one carrying Y into the plane
/// UVX: the solid resting on face UVX rolls over UV onto face UVY.
struct EdgeRotationSet {
  std::array<EdgeRotation, 6> edges;
  bool flipped = false;

  GeneratorSet<3> generators() const {
    std::vector<std::pair<Axis<3>, Angle>> specs;
    for (const auto& e : edges) specs.emplace_back(e.axis, e.angle);
    return GeneratorSet<3>::make(specs);
  }

  /// Same edges with every sense reversed.
  EdgeRotationSet reversed() const {
    EdgeRotationSet out = *this;
    out.flipped = !flipped;
    for (auto& e : out.edges) {
      e.axis = e.axis.reversed();
      e.direction_sign = -e.direction_sign;
    }
    return out;
  }
};

inline double plane_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const auto n = cross(b - a, c - a);
  return std::abs(dot(p - a, n)) / norm(n);
}

inline EdgeRotationSet edge_rotations(const Tetrahedron& t) {
  // Size(r_E) = pi - theta, i.e. cos = -1/3 with positive sine
  const auto supplement = Angle::acos_of(Rational{-1, 3}, 1);
  EdgeRotationSet set;
  for (std::size_t e = 0; e < kEdges.size(); ++e) {
    const auto [u, v] = kEdges[e];
    std::array<int, 2> rest{};
    int r = 0;
    for (int k = 0; k < 4; ++k)
      if (k != u && k != v) rest[r++] = k;
    const auto& x = t.vertex(rest[0]);
    const auto& y = t.vertex(rest[1]);
    const auto forward = Line3::through(t.vertex(u), t.vertex(v));
    const auto rolls = [&](const Line3& axis) {
      const auto moved = make_rotation(axis, supplement).apply(y);
      return plane_distance(moved, t.vertex(u), t.vertex(v), x) <= tol::geometric;
    };
    EdgeRotation rot{static_cast<std::size_t>(u), static_cast<std::size_t>(v), forward, supplement, 1};
    if (!rolls(forward)) {
      rot.axis = forward.reversed();
      rot.direction_sign = -1;
      if (!rolls(rot.axis)) throw std::invalid_argument("no rolling sense found; tetrahedron is degenerate");
    }
    set.edges[e] = rot;
  }
  return set;
}

/// Parses tumble steps such as "AB, -CD, BC^2": an edge key with an optional
/// sign and an optional integer exponent.
inline std::vector<Letter> parse_tumble_steps(std::string_view text) {
  std::vector<Letter> out;
  std::string compact;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) compact.push_back(ch);
  if (compact.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = compact.find(',', pos);
    std::string tok = compact.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const std::string original = tok;
    std::int64_t sign = 1;
    if (!tok.empty() && (tok[0] == '+' || tok[0] == '-')) {
      sign = tok[0] == '-' ? -1 : 1;
      tok.erase(0, 1);
    }
    std::int64_t exp = 1;
    const auto caret = tok.find('^');
    if (caret != std::string::npos) {
      std::size_t used = 0;
      const std::string e = tok.substr(caret + 1);
      try {
        exp = std::stoll(e, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("malformed tumble step '" + original + "'");
      }
      if (used != e.size() || exp == 0) throw std::invalid_argument("malformed tumble step '" + original + "'");
      tok.erase(caret);
    }
    out.push_back(Letter{edge_index(tok), sign * exp});
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

struct TumbleFrame {
  std::size_t step = 0;
  std::array<Vec3, 4> vertices{};
  Vec3 point{};
  std::array<Line3, 6> axes{};
};

struct TumbleTrace {
  std::vector<TumbleFrame> frames;  // frames[0] is the starting state
  Isometry3 total;
};

/// Rolls the solid through the given edge steps with the peripatetic rule;
/// each step turns about the edge's current position.
inline TumbleTrace tumble(const Tetrahedron& t, const Vec3& p, std::span<const Letter> steps,
                          const EdgeRotationSet& rotations) {
  for (const auto& s : steps)
    if (s.gen >= 6) throw std::invalid_argument("unknown edge index " + std::to_string(s.gen));
  const auto gens = rotations.generators();
  const auto trace = peripatetic_eval(gens, steps, p);
  TumbleTrace out;
  out.total = trace.total;
  for (std::size_t k = 0; k < trace.isometry_history.size(); ++k) {
    TumbleFrame f;
    f.step = k;
    for (std::size_t i = 0; i < 4; ++i) f.vertices[i] = trace.isometry_history[k].apply(t.vertex(i));
    f.point = trace.point_history[k];
    for (std::size_t e = 0; e < 6; ++e) f.axes[e] = trace.axis_history[k][e];
    out.frames.push_back(f);
  }
  return out;
}

inline TumbleTrace tumble(const Tetrahedron& t, const Vec3& p, std::span<const Letter> steps) {
  return tumble(t, p, steps, edge_rotations(t));
}

struct HexReport {
  bool degenerate = false;
  Vec3 plane_point{};
  Vec3 plane_normal{};
  std::array<Vec3, 3> seeds{};  // P f, P(f * r_AB), P(f * r_AC)
  std::vector<Vec3> in_plane;
  std::vector<std::pair<double, std::size_t>> nn_histogram;  // nn distance (1e-6 bins), count
  double min_nn_distance = std::numeric_limits<double>::infinity();
  std::size_t cloud_points = 0;
  bool cloud_truncated = false;
  double slab = tol::hexagon_slab;
  SamplerBudget budget;
  std::vector<std::string> warnings;
};

/// Explores the plane H through P f, P(f * r_AB), P(f * r_AC) with P the
/// barycenter: keeps orbit points within the slab around H and summarizes
/// their nearest-neighbor structure. Makes no claim about tilings.
inline HexReport hexagon_report(const Tetrahedron& t, std::span<const Letter> f, const SamplerBudget& budget,
                                const BfsOptions& opts = {}) {
  HexReport rep;
  rep.budget = budget;
  if (std::abs(t.edge_length() - std::sqrt(6.0)) > tol::geometric) {
    rep.warnings.push_back("edge length is not sqrt(6); hexagon observation assumes sqrt(6)");
  }
  const auto gens = edge_rotations(t).generators();
  const auto p = t.barycenter();
  std::vector<Letter> word(f.begin(), f.end());
  rep.seeds[0] = peripatetic_eval(gens, word).total.apply(p);
  for (std::size_t k = 0; k < 2; ++k) {
    auto extended = word;
    extended.push_back(Letter{k, 1});  // AB is edge 0, AC is edge 1
    rep.seeds[k + 1] = peripatetic_eval(gens, std::span<const Letter>{extended}).total.apply(p);
  }
  const auto n = cross(rep.seeds[1] - rep.seeds[0], rep.seeds[2] - rep.seeds[0]);
  if (norm(n) <= tol::geometric) {
    rep.degenerate = true;
    rep.warnings.push_back("seed triple is collinear; no plane");
    return rep;
  }
  rep.plane_point = rep.seeds[0];
  rep.plane_normal = n / norm(n);

  const auto cloud = bfs_orbit(gens, p, Mode::Peripatetic, budget, opts);
  rep.cloud_points = cloud.size();
  rep.cloud_truncated = cloud.truncated();
  for (const auto& q : cloud.points()) {
    if (std::abs(dot(q - rep.plane_point, rep.plane_normal)) < rep.slab) rep.in_plane.push_back(q);
  }
  if (rep.in_plane.size() >= 2) {
    const NearestIndex<3> index{std::span<const Vec3>{rep.in_plane}};
    std::map<long long, std::size_t> bins;
    for (std::size_t i = 0; i < rep.in_plane.size(); ++i) {
      const double d = index.nearest_distance(rep.in_plane[i], i);
      rep.min_nn_distance = std::min(rep.min_nn_distance, d);
      ++bins[std::llround(d / 1e-6)];
    }
    for (const auto& [bin, count] : bins) rep.nn_histogram.emplace_back(static_cast<double>(bin) * 1e-6, count);
  }
  return rep;
}

}  // namespace rotorb
