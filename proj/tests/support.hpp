#pragma once

// Random generators shared by the property-style tests.

#include <cmath>
#include <numbers>
#include <random>

#include "rotorb/geometry.hpp"
#include "rotorb/words.hpp"

namespace rotorb::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <int D>
Vec<D> random_point(std::mt19937_64& rng, double scale = 2.0) {
  Vec<D> p;
  for (int i = 0; i < D; ++i) p[i] = uniform(rng, -scale, scale);
  return p;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  while (true) {
    const auto v = random_point<3>(rng, 1.0);
    const double n = norm(v);
    if (n > 0.1 && n <= 1.0) return v / n;
  }
}

template <int D>
Axis<D> random_axis(std::mt19937_64& rng) {
  if constexpr (D == 2) {
    return Axis<2>{random_point<2>(rng)};
  } else {
    return Axis<3>{random_point<3>(rng), random_unit(rng)};
  }
}

template <int D>
Isometry<D> random_rotation(std::mt19937_64& rng) {
  return make_rotation(random_axis<D>(rng), uniform(rng, -std::numbers::pi, std::numbers::pi));
}

/// Two generators with raw (generic, irrational-looking) angles. In 3D the
/// axes are made skew by offsetting the second base point.
template <int D>
GeneratorSet<D> random_pair(std::mt19937_64& rng) {
  const auto a1 = Angle::raw(uniform(rng, 0.3, 3.0));
  const auto a2 = Angle::raw(-uniform(rng, 0.3, 3.0));
  if constexpr (D == 2) {
    return make_generators<2>({{random_axis<2>(rng), a1}, {random_axis<2>(rng), a2}});
  } else {
    const Line3 l1{random_point<3>(rng), random_unit(rng)};
    Vec3 d2 = random_unit(rng);
    while (norm(cross(d2, l1.dir())) < 0.2) d2 = random_unit(rng);
    const auto offset = cross(l1.dir(), d2) / norm(cross(l1.dir(), d2)) * uniform(rng, 0.2, 1.5);
    const Line3 l2{l1.base() + offset, d2};
    return make_generators<3>({{l1, a1}, {l2, a2}});
  }
}

}  // namespace rotorb::testing
