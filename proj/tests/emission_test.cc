// Copyright 2026 The repsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "repsim/emission.h"

#include <cmath>

#include <gtest/gtest.h>

using namespace repsim;
using namespace repsim::emission;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLambda = 780e-9;

AtomGeometry single_atom() {
  AtomGeometry g;
  g.lambda = kLambda;
  g.positions = {{0, 0, 0}};
  return g;
}

// Closed-form full-sphere integral of the pattern:
//   (4 pi / N) sum_{j,l} cos(k z_jl) sinc(k r_jl).
double analytic_total(const AtomGeometry& g) {
  const double k = 2 * kPi / g.lambda;
  double sum = 0;
  for (const Vec3& a : g.positions) {
    for (const Vec3& b : g.positions) {
      const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
      const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
      const double sinc = r == 0 ? 1.0 : std::sin(k * r) / (k * r);
      sum += std::cos(k * dz) * sinc;
    }
  }
  return 4 * kPi * sum / static_cast<double>(g.size());
}

double max_pair_distance(const AtomGeometry& g) {
  double best = 0;
  for (const Vec3& a : g.positions) {
    for (const Vec3& b : g.positions) {
      const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
      best = std::max(best, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
  }
  return best;
}

}  // namespace

TEST(build_cubic_lattice, geometry) {
  const AtomGeometry g = build_cubic_lattice(7, 7, 15, 0.37e-6, kLambda);
  EXPECT_EQ(g.size(), 735u);
  EXPECT_NEAR(max_pair_distance(g), 6.057e-6, 1e-8);
  Vec3 centroid{0, 0, 0};
  for (const Vec3& r : g.positions)
    for (int i = 0; i < 3; ++i) centroid[i] += r[i];
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(centroid[i] / 735, 0.0, 1e-20);
  EXPECT_EQ(g.axis, (Vec3{0, 0, 1}));
}

TEST(sample_sphere, points_fill_ball_uniformly) {
  const double D = 6e-6, R = D / 2;
  const AtomGeometry g = sample_sphere(5000, D, 3, kLambda);
  ASSERT_EQ(g.size(), 5000u);
  double mean_r = 0;
  for (const Vec3& p : g.positions) {
    const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    ASSERT_LE(r, R);
    mean_r += r;
  }
  mean_r /= 5000;
  // |r| for a uniform ball: mean 3R/4, sd sqrt(3/80) R.
  EXPECT_NEAR(mean_r, 0.75 * R, 5 * std::sqrt(3.0 / 80) * R / std::sqrt(5000.0));
}

TEST(sample_sphere, deterministic_in_seed) {
  const AtomGeometry a = sample_sphere(200, 6e-6, 9, kLambda);
  const AtomGeometry b = sample_sphere(200, 6e-6, 9, kLambda);
  const AtomGeometry c = sample_sphere(200, 6e-6, 10, kLambda);
  EXPECT_EQ(a.positions, b.positions);
  EXPECT_NE(a.positions, c.positions);
}

TEST(pattern_value, single_atom_is_isotropic) {
  const AtomGeometry g = single_atom();
  for (double theta : {0.0, 0.4, 1.7, kPi}) {
    EXPECT_DOUBLE_EQ(pattern_value(g, direction(g, theta, 0.3)), 1.0);
  }
}

TEST(pattern_value, equals_atom_count_on_axis) {
  const AtomGeometry g = build_cubic_lattice(7, 7, 15, 0.37e-6, kLambda);
  EXPECT_NEAR(pattern_value(g, g.axis), 735.0, 1e-9);
  const AtomGeometry s = sample_sphere(200, 6e-6, 1, kLambda);
  EXPECT_NEAR(pattern_value(s, s.axis), 200.0, 1e-10);
}

TEST(pattern_value, two_atom_interference) {
  AtomGeometry g;
  g.lambda = kLambda;
  // Separation lambda/4 along the axis: backward emission picks up q.d = pi.
  g.positions = {{0, 0, 0}, {0, 0, kLambda / 4}};
  EXPECT_NEAR(pattern_value(g, {0, 0, 1}), 2.0, 1e-12);
  EXPECT_NEAR(pattern_value(g, {0, 0, -1}), 0.0, 1e-12);
  // Sideways: q.d = k lambda/4 = pi/2, intensity 1 + cos(pi/2) = 1.
  EXPECT_NEAR(pattern_value(g, {1, 0, 0}), 1.0, 1e-12);
}

TEST(pattern_value, translation_invariant) {
  AtomGeometry a = sample_sphere(50, 4e-6, 2, kLambda);
  AtomGeometry b = a;
  for (Vec3& r : b.positions) {
    r[0] += 1.3e-6;
    r[1] -= 0.2e-6;
    r[2] += 7.7e-6;
  }
  for (double theta : {0.05, 0.3, 1.2, 2.9}) {
    const Vec3 k = direction(a, theta, 0.8);
    EXPECT_NEAR(pattern_value(a, k), pattern_value(b, k), 1e-9 * pattern_value(a, k) + 1e-11);
  }
}

TEST(pattern_value, square_lattice_has_quarter_turn_symmetry) {
  const AtomGeometry g = build_cubic_lattice(7, 7, 15, 0.37e-6, kLambda);
  for (double theta : {0.1, 0.6, 2.0}) {
    const double s = std::sin(theta), c = std::cos(theta);
    const Vec3 k1{s * std::cos(0.4), s * std::sin(0.4), c};
    const Vec3 k2{-k1[1], k1[0], c};
    EXPECT_NEAR(pattern_value(g, k1), pattern_value(g, k2), 1e-9 * pattern_value(g, k1));
  }
}

TEST(integrate_band, total_matches_closed_form) {
  const AtomGeometry small = build_cubic_lattice(3, 3, 5, 0.37e-6, kLambda);
  const double want = analytic_total(small);
  const double got = integrate_band(small, 0, kPi, 32, 16, 64, 1);
  EXPECT_NEAR(got / want, 1.0, 1e-9);
  EXPECT_NEAR(integrate_band(single_atom(), 0, kPi, 1, 16, 4, 1), 4 * kPi, 1e-12);
}

TEST(collection_fraction, single_atom_solid_angle) {
  const CollectionReport r = collection_fraction(single_atom(), 0.3);
  EXPECT_NEAR(r.fraction, (1 - std::cos(0.3)) / 2, 1e-6);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(collection_fraction(single_atom(), kPi).fraction, 1.0, 1e-12);
}

TEST(collection_fraction, lattice_reference) {
  const AtomGeometry g = build_cubic_lattice(7, 7, 15, 0.37e-6, kLambda);
  const CollectionReport r = collection_fraction(g, 0.3);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.atoms, 735u);
  EXPECT_NEAR(r.total_integral / analytic_total(g), 1.0, 1e-6);
  EXPECT_NEAR(r.fraction, 0.93669249879936, 1e-6);
  EXPECT_LT(r.last_change, 1e-3);
}

TEST(collection_fraction, monotone_in_angle) {
  const AtomGeometry g = sample_sphere(60, 3e-6, 4, kLambda);
  double previous = 0;
  for (double a : {0.05, 0.1, 0.3, 0.7, 1.5, 3.0}) {
    const double f = collection_fraction(g, a).fraction;
    EXPECT_GE(f, previous - 1e-6) << a;
    EXPECT_LE(f, 1.0 + 1e-9);
    previous = f;
  }
}

TEST(collection_fraction, independent_of_worker_count) {
  const AtomGeometry g = sample_sphere(100, 6e-6, 5, kLambda);
  QuadratureSettings one, three;
  one.workers = 1;
  three.workers = 3;
  const CollectionReport a = collection_fraction(g, 0.3, one);
  const CollectionReport b = collection_fraction(g, 0.3, three);
  EXPECT_EQ(a.fraction, b.fraction);
  EXPECT_EQ(a.total_integral, b.total_integral);
}

TEST(EmissionPattern, normalization_is_sphere_integral) {
  const AtomGeometry g = build_cubic_lattice(3, 3, 5, 0.37e-6, kLambda);
  const EmissionPattern p(g);
  EXPECT_NEAR(p.normalization() / analytic_total(g), 1.0, 1e-6);
  EXPECT_DOUBLE_EQ(p(g.axis), 45.0);
}

TEST(pattern_grid, layout) {
  const auto grid = pattern_grid(single_atom(), 91, 36);
  ASSERT_EQ(grid.size(), 91u * 36u);
  EXPECT_EQ(grid.front().theta, 0.0);
  EXPECT_NEAR(grid.back().theta, kPi, 1e-15);
  EXPECT_NEAR(grid[35].phi, 2 * kPi * 35 / 36, 1e-15);
  for (const auto& s : grid) EXPECT_DOUBLE_EQ(s.value, 1.0);
}
