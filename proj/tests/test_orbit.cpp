#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "oracles.hpp"
#include "rotorb/orbit.hpp"
#include "support.hpp"

using namespace rotorb;

namespace {

constexpr double kPi = std::numbers::pi;
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

GeneratorSet<3> order4_pair() {
  return make_generators<3>({{Line3{Vec3{0, 0, 0}, Vec3{1, 0, 0}}, Angle::pi_multiple(1, 2)},
                             {Line3{Vec3{0, 0, 1}, Vec3{0, 1, 0}}, Angle::pi_multiple(1, 2)}});
}

GeneratorSet<2> golden_planar() {
  const auto a = Angle::raw(kPi * kGolden);
  return make_generators<2>({{Axis<2>{Vec2{0, 0}}, a}, {Axis<2>{Vec2{1, 0}}, a}});
}

const Vec3 kOrder4Seed{0.5, 1.0 / 3.0, 0.25};

}  // namespace

// ============================================
// OrbitCloud
// ============================================

TEST(OrbitCloud, DedupWithinCell) {
  OrbitCloud<2> c{1e-3};
  EXPECT_TRUE(c.insert(Vec2{0, 0}, 0));
  EXPECT_FALSE(c.insert(Vec2{0.0009, -0.0009}, 1));
  EXPECT_TRUE(c.insert(Vec2{0.0011, 0}, 1));
  EXPECT_EQ(c.size(), 2u);
}

// ============================================
// bfs_orbit
// ============================================

TEST(BfsOrbit, ZeroLengthIsSeed) {
  const auto cloud = bfs_orbit(golden_planar(), Vec2{0.5, 0.5}, Mode::Peripatetic, SamplerBudget{0, 3, 100});
  ASSERT_EQ(cloud.size(), 1u);
  EXPECT_EQ(cloud.points()[0], (Vec2{0.5, 0.5}));
  EXPECT_FALSE(cloud.truncated());
}

TEST(BfsOrbit, SingleGeneratorCircle) {
  const auto gens = make_generators<3>({{Line3{Vec3{0, 0, 0}, Vec3{0, 0, 1}}, Angle::acos_of(Rational(1, 3))}});
  for (std::int64_t k : {1, 4, 17}) {
    for (auto mode : {Mode::Stationary, Mode::Peripatetic}) {
      const auto cloud = bfs_orbit(gens, Vec3{1, 0, 0.5}, mode, SamplerBudget{1, k, 1000});
      EXPECT_EQ(cloud.size(), static_cast<std::size_t>(2 * k + 1));
      for (const auto& q : cloud.points()) {
        EXPECT_NEAR(std::hypot(q[0], q[1]), 1.0, 1e-12);
        EXPECT_NEAR(q[2], 0.5, 1e-12);
      }
    }
  }
}

TEST(BfsOrbit, Order4MatchesBruteForce) {
  const auto oracle = oracle::order4_lattice_orbit(3);
  for (auto mode : {Mode::Stationary, Mode::Peripatetic}) {
    const auto cloud = bfs_orbit(order4_pair(), kOrder4Seed, mode, SamplerBudget{3, 1, 1'000'000});
    EXPECT_EQ(cloud.size(), oracle.size()) << mode_name(mode);
    for (const auto& q : cloud.points()) {
      const oracle::Lattice3 key{std::llround(q[0] * 12), std::llround(q[1] * 12), std::llround(q[2] * 12)};
      EXPECT_TRUE(oracle.count(key)) << q[0] << "," << q[1] << "," << q[2];
    }
  }
}

TEST(BfsOrbit, StationaryAndPeripateticSetsCoincide) {
  // Word balls are closed under reversal, so the duality forces equal point sets.
  std::mt19937_64 rng{31};
  for (int trial = 0; trial < 4; ++trial) {
    const auto gens = rotorb::testing::random_pair<3>(rng);
    const auto p = rotorb::testing::random_point<3>(rng);
    const SamplerBudget budget{3, 2, 1'000'000};
    const auto s = bfs_orbit(gens, p, Mode::Stationary, budget);
    const auto w = bfs_orbit(gens, p, Mode::Peripatetic, budget);
    ASSERT_EQ(s.size(), w.size());
    std::size_t matched = 0;
    OrbitCloud<3> wi{s.dedup_cell() * 10};
    for (const auto& r : w.points()) wi.insert(r, 0);
    for (const auto& q : s.points()) matched += wi.contains(q) ? 1 : 0;
    EXPECT_EQ(matched, s.size());
  }
}

TEST(BfsOrbit, TraceAudit) {
  std::mt19937_64 rng{32};
  const auto gens = rotorb::testing::random_pair<3>(rng);
  const Vec3 p{0.3, -0.2, 0.7};
  for (auto mode : {Mode::Stationary, Mode::Peripatetic}) {
    const auto cloud = bfs_orbit(gens, p, mode, SamplerBudget{4, 3, 1'000'000}, BfsOptions{1e-6, true});
    ASSERT_EQ(cloud.words().size(), cloud.size());
    for (std::size_t i = 0; i < cloud.size(); i += 100) {
      const auto& w = cloud.words()[i];
      EXPECT_EQ(static_cast<int>(w.size()), cloud.word_len()[i]);
      const auto f = mode == Mode::Stationary ? stationary_eval(gens, std::span<const Letter>{w})
                                              : peripatetic_eval(gens, std::span<const Letter>{w}).total;
      EXPECT_LT(distance(f.apply(p), cloud.points()[i]), 1e-8);
    }
  }
}

TEST(BfsOrbit, BudgetTruncation) {
  const auto cloud = bfs_orbit(golden_planar(), Vec2{0.5, 0.5}, Mode::Stationary, SamplerBudget{6, 5, 500});
  EXPECT_EQ(cloud.size(), 500u);
  EXPECT_TRUE(cloud.truncated());
  EXPECT_THROW(bfs_orbit(golden_planar(), Vec2{0, 0}, Mode::Stationary, SamplerBudget{1, 0, 10}),
               std::invalid_argument);
  EXPECT_THROW(parse_mode("sideways"), std::invalid_argument);
}

TEST(BfsOrbit, DepthOrderAndDeterminism) {
  const auto a = bfs_orbit(golden_planar(), Vec2{0.5, 0.5}, Mode::Peripatetic, SamplerBudget{3, 2, 100000});
  const auto b = bfs_orbit(golden_planar(), Vec2{0.5, 0.5}, Mode::Peripatetic, SamplerBudget{3, 2, 100000});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.points()[i], b.points()[i]);
  EXPECT_TRUE(std::is_sorted(a.word_len().begin(), a.word_len().end()));
}

// ============================================
// circle_gap_stats
// ============================================

TEST(CircleGaps, QuarterTurn) {
  const auto rep = circle_gap_stats(Angle::pi_multiple(1, 2), 4);
  ASSERT_EQ(rep.gaps.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.gaps[0].first, 0.25);
  EXPECT_EQ(rep.gaps[0].second, 4u);
  EXPECT_TRUE(rep.exact);
  // beyond the order the points repeat
  EXPECT_EQ(circle_gap_stats(Angle::pi_multiple(1, 2), 10).distinct_points, 4u);
}

TEST(CircleGaps, ThreeDistanceAgainstDirectSort) {
  const double x = std::sqrt(2.0) - 1.0;
  const auto rep = circle_gap_stats_turns(x, 1000);
  const auto oracle = oracle::distinct_lengths(oracle::direct_gaps(static_cast<long double>(x), 1000), 1e-12L);
  EXPECT_LE(rep.distinct_gap_count(), 3u);
  ASSERT_EQ(rep.distinct_gap_count(), oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    EXPECT_NEAR(rep.gaps[i].first, static_cast<double>(oracle[i]), 1e-12 * static_cast<double>(oracle[i]));
  }
  EXPECT_NEAR(rep.total(), 1.0, 1e-9);
}

TEST(CircleGaps, MaxGapShrinks) {
  const double x = std::sqrt(2.0) - 1.0;
  const auto small = circle_gap_stats_turns(x, 1000);
  const auto large = circle_gap_stats_turns(x, 10000);
  EXPECT_LT(large.max_gap, small.max_gap);
  // direct oracle agrees on the maxima
  const auto direct = oracle::direct_gaps(x, 10000);
  EXPECT_NEAR(large.max_gap, static_cast<double>(*std::max_element(direct.begin(), direct.end())), 1e-12);
}

TEST(CircleGaps, AngleAndTurnsAgree) {
  const auto via_angle = circle_gap_stats(Angle::raw(2 * kPi * (std::sqrt(2.0) - 1.0)), 500);
  const auto via_turns = circle_gap_stats_turns(std::sqrt(2.0) - 1.0, 500);
  ASSERT_EQ(via_angle.gaps.size(), via_turns.gaps.size());
  EXPECT_NEAR(via_angle.max_gap, via_turns.max_gap, 1e-12);
}

TEST(CircleGaps, PropertySumAndThreeGaps) {
  std::mt19937_64 rng{33};
  for (int i = 0; i < 50; ++i) {
    const double x = rotorb::testing::uniform(rng, 0.0, 1.0);
    const auto n = std::uniform_int_distribution<std::size_t>(1, 3000)(rng);
    const auto rep = circle_gap_stats_turns(x, n);
    EXPECT_NEAR(rep.total(), 1.0, 1e-9);
    EXPECT_LE(rep.distinct_gap_count(), 3u);
  }
  for (std::int64_t q = 1; q < 30; ++q) {
    const auto rep = circle_gap_stats(Angle::pi_multiple(1, q), 100);
    EXPECT_NEAR(rep.total(), 1.0, 1e-9);
  }
}

// ============================================
// ladder_orbit
// ============================================

TEST(Ladder, FirstStageCounts) {
  const auto a1 = Angle::raw(kPi / std::sqrt(2.0));
  const auto a2 = Angle::raw(1.0);  // rho = 1/pi
  const auto gens = make_generators<2>({{Axis<2>{Vec2{0, 0}}, a1}, {Axis<2>{Vec2{1, 0}}, a2}});
  const auto lad = ladder_orbit(gens, Vec2{0.5, 0.5}, 1);
  EXPECT_EQ(lad.k[0], 1);
  EXPECT_EQ(lad.stages[0].points.size(), 3u);
  EXPECT_EQ(lad.stages[0].exp_bound, 2);

  const auto swapped = make_generators<2>({{Axis<2>{Vec2{0, 0}}, a2}, {Axis<2>{Vec2{1, 0}}, a1}});
  const auto lad2 = ladder_orbit(swapped, Vec2{0.5, 0.5}, 1);
  EXPECT_EQ(lad2.k[0], 3);
  EXPECT_EQ(lad2.stages[0].points.size(), 7u);
}

TEST(Ladder, KSatisfiesStrictInequality) {
  std::mt19937_64 rng{34};
  for (int i = 0; i < 1000; ++i) {
    const double rho = rotorb::testing::uniform(rng, 0.01, 0.99);
    std::int64_t k = 0;
    try {
      k = ladder_k(rho);
    } catch (const std::invalid_argument&) {
      continue;
    }
    EXPECT_LT(k * rho, 1.0);
    EXPECT_GT((k + 1) * rho, 1.0);
  }
  EXPECT_THROW(ladder_k(0.5), std::invalid_argument);
  EXPECT_THROW(ladder_k(1.0), std::invalid_argument);
}

TEST(Ladder, NestedAndMeshNonincreasing) {
  const auto gens = golden_planar();
  const auto lad = ladder_orbit(gens, Vec2{0.5, 0.5}, 4);
  ASSERT_EQ(lad.stages.size(), 4u);
  const Ball<2> probe{Vec2{0.5, 0.0}, 0.5};
  double prev_mesh = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < lad.stages.size(); ++b) {
    const auto& st = lad.stages[b];
    EXPECT_EQ(st.axis_used, b % 2);
    EXPECT_EQ(st.exp_bound, (std::int64_t{1} << (b + 1)) * lad.k[b % 2]);
    if (b > 0) {
      const auto& before = lad.stages[b - 1].points;
      for (const auto& q : before.points()) ASSERT_TRUE(st.points.contains(q));
    }
    const double m = mesh_estimate(st.points, probe, 24);
    EXPECT_LE(m, prev_mesh);
    prev_mesh = m;
  }
}

TEST(Ladder, Errors) {
  const auto rational = make_generators<2>(
      {{Axis<2>{Vec2{0, 0}}, Angle::pi_multiple(1, 3)}, {Axis<2>{Vec2{1, 0}}, Angle::raw(1.0)}});
  EXPECT_THROW(ladder_orbit(rational, Vec2{0, 0}, 2), std::invalid_argument);
  const auto single = make_generators<2>({{Axis<2>{Vec2{0, 0}}, Angle::raw(1.0)}});
  EXPECT_THROW(ladder_orbit(single, Vec2{0, 0}, 2), std::invalid_argument);
}

// ============================================
// mesh_estimate / coverage
// ============================================

TEST(MeshEstimate, SinglePointAtCenter) {
  OrbitCloud<2> cloud;
  cloud.insert(Vec2{1, 1}, 0);
  const Ball<2> probe{Vec2{1, 1}, 2.0};
  for (int res : {8, 32, 128}) {
    const double m = mesh_estimate(cloud, probe, res);
    const double cell_diag = 2.0 * probe.radius / res * std::sqrt(2.0);
    EXPECT_LE(m, probe.radius);
    EXPECT_GE(m, probe.radius - cell_diag);
  }
}

TEST(MeshEstimate, RegularGrid) {
  const double h = 0.1;
  OrbitCloud<2> cloud;
  for (int i = -15; i <= 15; ++i)
    for (int j = -15; j <= 15; ++j) cloud.insert(Vec2{i * h, j * h}, 0);
  const Ball<2> probe{Vec2{0, 0}, 1.0};
  const int res = 50;
  const double m = mesh_estimate(cloud, probe, res);
  EXPECT_LE(m, h * std::sqrt(2.0) / 2.0 + 1e-12);
  EXPECT_GE(m, h * std::sqrt(2.0) / 2.0 - 2.0 * probe.radius / res * std::sqrt(2.0));
}

TEST(MeshEstimate, AgreesWithBruteForce) {
  std::mt19937_64 rng{35};
  OrbitCloud<3> cloud;
  for (int i = 0; i < 3000; ++i) cloud.insert(rotorb::testing::random_point<3>(rng, 1.0), 0);
  const Ball<3> probe{Vec3{0.1, 0, -0.1}, 0.8};
  const int res = 12;
  double brute = 0.0;
  const double step = 2 * probe.radius / res;
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j)
      for (int k = 0; k < res; ++k) {
        const Vec3 q{probe.center[0] - probe.radius + (i + 0.5) * step, probe.center[1] - probe.radius + (j + 0.5) * step,
                     probe.center[2] - probe.radius + (k + 0.5) * step};
        if (distance(q, probe.center) > probe.radius) continue;
        double best = 1e9;
        for (const auto& p : cloud.points()) best = std::min(best, distance(p, q));
        brute = std::max(brute, best);
      }
  EXPECT_DOUBLE_EQ(mesh_estimate(cloud, probe, res), brute);
}

TEST(MeshEstimate, Errors) {
  OrbitCloud<2> empty;
  EXPECT_THROW(mesh_estimate(empty, Ball<2>{Vec2{0, 0}, 1.0}, 10), std::invalid_argument);
  OrbitCloud<2> one;
  one.insert(Vec2{0, 0}, 0);
  EXPECT_THROW(mesh_estimate(one, Ball<2>{Vec2{0, 0}, 0.0}, 10), std::invalid_argument);
}

TEST(Coverage, Basics) {
  const Ball<2> ball{Vec2{0, 0}, 1.0};
  const int n = 20;
  OrbitCloud<2> full;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) full.insert(Vec2{-1 + (i + 0.5) * 0.1, -1 + (j + 0.5) * 0.1}, 0);
  EXPECT_DOUBLE_EQ(coverage(full, ball, n), 1.0);
  EXPECT_DOUBLE_EQ(coverage(OrbitCloud<2>{}, ball, n), 0.0);
  OrbitCloud<2> center;
  center.insert(Vec2{0.01, 0.01}, 0);
  EXPECT_GT(coverage(center, ball, n), 0.0);
}

TEST(Coverage, NondecreasingInBudget) {
  const auto gens = golden_planar();
  const Ball<2> ball{Vec2{0.5, 0.0}, 1.0};
  double prev = 0.0;
  for (std::size_t len = 0; len <= 4; ++len) {
    const auto cloud = bfs_orbit(gens, Vec2{0.5, 0.5}, Mode::Peripatetic, SamplerBudget{len, 4, 1'000'000});
    const double c = coverage(cloud, ball, 20);
    EXPECT_GE(c, prev);
    prev = c;
  }
  EXPECT_GT(prev, 0.3);
}

// ============================================
// sphere confinement / discreteness
// ============================================

TEST(SphereConfinement, Basics) {
  OrbitCloud<3> one;
  const Vec3 p{1, 2, 2};
  one.insert(p, 0);
  const auto r = sphere_confinement_check(one, Vec3{0, 0, 0}, 3.0);
  EXPECT_DOUBLE_EQ(r.max_abs_deviation, 0.0);
  EXPECT_TRUE(r.pass);
}

TEST(SphereConfinement, IntersectingVersusSkew) {
  const Vec3 v{0.2, -0.1, 0.3};
  const Vec3 d1 = Vec3{1, 2, 2} / 3.0;
  const Vec3 d2{0, 0.6, 0.8};
  const auto a1 = Angle::raw(kPi * kGolden);
  const auto a2 = Angle::raw(std::sqrt(2.0));
  const Vec3 p{1.0, 0.5, -0.7};
  const auto meet = make_generators<3>({{Line3{v, d1}, a1}, {Line3{v, d2}, a2}});
  const auto cloud = bfs_orbit(meet, p, Mode::Peripatetic, SamplerBudget{6, 3, 10000});
  EXPECT_EQ(cloud.size(), 10000u);
  EXPECT_TRUE(sphere_confinement_check(cloud, v, distance(p, v)).pass);

  const auto offset = cross(d1, d2) / norm(cross(d1, d2)) * 0.1;
  const auto skew = make_generators<3>({{Line3{v, d1}, a1}, {Line3{v + offset, d2}, a2}});
  ASSERT_EQ(line_relation(skew[0].axis, skew[1].axis).kind, LineRelation::Kind::Skew);
  const auto loose = bfs_orbit(skew, p, Mode::Peripatetic, SamplerBudget{6, 3, 10000});
  EXPECT_GT(sphere_confinement_check(loose, v, distance(p, v)).max_abs_deviation, 0.01);
}

TEST(Discreteness, Basics) {
  OrbitCloud<3> one;
  one.insert(Vec3{0, 0, 0}, 0);
  EXPECT_TRUE(std::isinf(discreteness_report(one).min_distance));
  one.insert(Vec3{0, 0.75, 0}, 1);
  const auto two = discreteness_report(one);
  EXPECT_EQ(two.distinct_count, 2u);
  EXPECT_DOUBLE_EQ(two.min_distance, 0.75);
  EXPECT_THROW(discreteness_report(OrbitCloud<3>{}), std::invalid_argument);
}

TEST(Discreteness, MatchesBruteForceMinimum) {
  std::mt19937_64 rng{36};
  OrbitCloud<2> cloud;
  for (int i = 0; i < 2000; ++i) cloud.insert(rotorb::testing::random_point<2>(rng, 3.0), 0);
  double brute = 1e9;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (std::size_t j = i + 1; j < cloud.size(); ++j)
      brute = std::min(brute, distance(cloud.points()[i], cloud.points()[j]));
  EXPECT_DOUBLE_EQ(discreteness_report(cloud).min_distance, brute);
}

TEST(Discreteness, Order4Lattice) {
  const auto cloud = bfs_orbit(order4_pair(), kOrder4Seed, Mode::Peripatetic, SamplerBudget{6, 1, 1'000'000});
  const auto rep = discreteness_report(cloud);
  EXPECT_GE(rep.min_distance, 1.0 / 12.0 - 1e-9);
  EXPECT_EQ(rep.distinct_count, oracle::order4_lattice_orbit(6).size());
}
