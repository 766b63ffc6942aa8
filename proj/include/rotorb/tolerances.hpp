#pragma once

#include <cstdint>

namespace rotorb::tol {

// Geometric predicates: parallelism, incidence, orthogonality of stored matrices.
inline constexpr double geometric = 1e-9;
// Algebraic identities: inverse cancellation, exact-tag numeric cross-checks.
inline constexpr double algebraic = 1e-12;
// Line3 directions must already be unit length to this tolerance.
inline constexpr double unit_direction = 1e-12;

// Raw radians are matched against k*pi/n for n up to this denominator.
inline constexpr double raw_angle_match = 1e-12;
inline constexpr std::int64_t raw_angle_max_denominator = 360;

// A floating cosine is accepted as rational when within this distance of p/q, q <= bound.
inline constexpr double rational_cosine_match = 1e-12;
inline constexpr std::int64_t rational_cosine_max_denominator = 1000;

// Compositions between forced re-orthonormalizations of the linear part.
inline constexpr int renormalize_every = 64;

// Default orbit snapping resolution (Chebyshev).
inline constexpr double dedup_cell = 1e-6;

// 1/rho within this of an integer makes k = floor(1/rho) ill-conditioned.
inline constexpr double ladder_integer_guard = 1e-12;

inline constexpr double sphere_confinement = 1e-9;
inline constexpr double hexagon_slab = 1e-6;

}  // namespace rotorb::tol
