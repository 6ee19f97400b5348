#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "settler/grid.hpp"

using namespace settler;

TEST(Grid, LayerDepthAndFeedLayer) {
  const auto g = build_grid(AreaProfile::constant(1.0, 3.0, 400.0), 1.0, 3.0, 16);
  EXPECT_DOUBLE_EQ(g.dz, 0.25);
  EXPECT_EQ(g.feed_cell, 4);
  const auto g2 = build_grid(AreaProfile::v7like(), 1.0, 4.0, 100);
  EXPECT_DOUBLE_EQ(g2.dz, 0.05);
  EXPECT_EQ(g2.feed_cell, 20);
  EXPECT_NEAR(g2.dz * g2.N, 5.0, 1e-14);
}

TEST(Grid, FeedLayerRoundsUp) {
  EXPECT_EQ(feed_layer_index(1.0, 0.3), 4);
  EXPECT_EQ(feed_layer_index(1.0, 4.0 / 128.0), 32);
  EXPECT_EQ(feed_layer_index(1.0, 5.0 / 100.0), 20);
}

TEST(Grid, IndexContract) {
  const auto g = build_grid(AreaProfile::constant(1.0, 3.0, 400.0), 1.0, 3.0, 8);
  EXPECT_EQ(g.num_cells(), 10u);
  EXPECT_EQ(g.num_faces(), 11u);
  EXPECT_EQ(g.z_cell.size(), 10u);
  EXPECT_EQ(g.z_face.size(), 11u);
  EXPECT_DOUBLE_EQ(g.z_face[1], -1.0);
  EXPECT_DOUBLE_EQ(g.z_face[9], 3.0);
  EXPECT_EQ(g.gamma_face[1], 0);
  EXPECT_EQ(g.gamma_face[9], 0);
  EXPECT_EQ(g.gamma_face[2], 1);
  EXPECT_EQ(g.gamma_cell[0], 0);
  EXPECT_EQ(g.gamma_cell[9], 0);
  for (int j = 1; j <= 8; ++j) EXPECT_EQ(g.gamma_cell[j], 1);
}

TEST(Grid, ConstantArea) {
  const auto g = build_grid(AreaProfile::constant(1.0, 3.0, 400.0), 1.0, 3.0, 32);
  for (double a : g.A_cell) EXPECT_EQ(a, 400.0);
  for (double a : g.A_face) EXPECT_EQ(a, 400.0);
  EXPECT_EQ(g.M1, 1.0);
  EXPECT_EQ(g.M2, 2.0);
  EXPECT_EQ(g.A_min, 400.0);
  EXPECT_TRUE(g.constant_area);
}

TEST(Grid, StepAreaConstantsMatchEnumeration) {
  const AreaProfile p({AreaSegment::step(-1.0, 3.0, 1.0, 500.0, 100.0)});
  for (auto mode : {FaceAreaMode::average, FaceAreaMode::point}) {
    const auto g = build_grid(p, 1.0, 3.0, 16, mode);
    double m1 = 0.0, m2 = 0.0;
    for (int j = 1; j <= g.N; ++j) {
      m1 = std::max({m1, g.A_face[j] / g.A_cell[j], g.A_face[j + 1] / g.A_cell[j]});
      m2 = std::max(m2, (g.A_face[j] + g.A_face[j + 1]) / g.A_cell[j]);
    }
    EXPECT_DOUBLE_EQ(g.M1, m1);
    EXPECT_DOUBLE_EQ(g.M2, m2);
    EXPECT_LE(g.M2, 2.0 * g.M1);
    EXPECT_FALSE(g.constant_area);
  }
  // the step sits on a face: face average is the mean of both sides
  const auto g = build_grid(p, 1.0, 3.0, 16);
  EXPECT_DOUBLE_EQ(g.A_face[9], 300.0);
  EXPECT_DOUBLE_EQ(g.M1, 3.0);
}

TEST(Grid, ConeAreaIntegralExact) {
  const auto cone = AreaSegment::cone(0.0, 2.0, 400.0, 100.0);
  // radius halves: integral of pi r(z)^2 by 2-point Gauss-Legendre is exact for quadratics
  const double r0 = std::sqrt(400.0 / std::numbers::pi);
  const double r1 = std::sqrt(100.0 / std::numbers::pi);
  auto area = [&](double z) {
    const double r = r0 + (r1 - r0) * z / 2.0;
    return std::numbers::pi * r * r;
  };
  const double x = 1.0 / std::sqrt(3.0);
  const double gauss = area(1.0 - x) + area(1.0 + x);
  EXPECT_NEAR(cone.integrate(0.0, 2.0), gauss, 1e-10);
  EXPECT_NEAR(cone.area(0.0), 400.0, 1e-10);
  EXPECT_NEAR(cone.area(2.0), 100.0, 1e-10);
}

TEST(Grid, ConeAreaConstantsMatchEnumeration) {
  const AreaProfile p({AreaSegment::cone(-1.0, 3.0, 400.0, 100.0)});
  const auto g = build_grid(p, 1.0, 3.0, 32);
  double m1 = 0.0, m2 = 0.0;
  for (int j = 1; j <= g.N; ++j) {
    m1 = std::max({m1, g.A_face[j] / g.A_cell[j], g.A_face[j + 1] / g.A_cell[j]});
    m2 = std::max(m2, (g.A_face[j] + g.A_face[j + 1]) / g.A_cell[j]);
  }
  EXPECT_DOUBLE_EQ(g.M1, m1);
  EXPECT_DOUBLE_EQ(g.M2, m2);
  EXPECT_GT(g.M1, 1.0);
}

TEST(Grid, RefinementConsistencyOnCone) {
  const AreaProfile p({AreaSegment::cone(-1.0, 3.0, 400.0, 100.0)});
  double prev = 0.0;
  for (int N : {16, 32, 64, 128}) {
    const auto g = build_grid(p, 1.0, 3.0, N);
    double err = 0.0;
    for (int j = 1; j <= N; ++j) err = std::max(err, std::abs(g.A_cell[j] - p.area(g.z_cell[j])));
    if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.05);
    prev = err;
  }
}

TEST(Grid, OuterCellsUseConstantExtension) {
  const auto g = build_grid(AreaProfile::v7like(), 1.0, 4.0, 100);
  EXPECT_NEAR(g.A_cell.front(), 450.0, 1e-9);
  EXPECT_NEAR(g.A_cell.back(), 120.0, 1e-9);
  EXPECT_NEAR(g.A_face.front(), 450.0, 1e-9);
  EXPECT_NEAR(g.A_face.back(), 120.0, 1e-9);
  EXPECT_NEAR(g.A_min, 120.0, 1e-9);
}

TEST(Grid, ProfileValidation) {
  const AreaProfile gap({AreaSegment::cylinder(-1.0, 0.0, 10.0), AreaSegment::cylinder(0.5, 3.0, 10.0)});
  EXPECT_THROW(build_grid(gap, 1.0, 3.0, 8), std::invalid_argument);
  const AreaProfile short_profile({AreaSegment::cylinder(-1.0, 2.0, 10.0)});
  EXPECT_THROW(build_grid(short_profile, 1.0, 3.0, 8), std::invalid_argument);
  EXPECT_THROW(build_grid(AreaProfile::constant(1.0, 3.0, 1.0), 1.0, 3.0, 1), std::invalid_argument);
  const AreaProfile zero({AreaSegment::cylinder(-1.0, 3.0, 0.0)});
  EXPECT_THROW(build_grid(zero, 1.0, 3.0, 8), std::invalid_argument);
}
