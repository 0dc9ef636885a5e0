// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "trajlabel/geometry.hpp"

namespace trajlabel
{
namespace
{

void expect_corner_set(const BevPolygon & p, std::vector<Vec2> want)
{
  ASSERT_EQ(p.vertices.size(), want.size());
  for (const Vec2 & v : p.vertices) {
    auto it = std::find_if(want.begin(), want.end(), [&](const Vec2 & w) {
      return std::abs(w.x - v.x) < 1e-12 && std::abs(w.y - v.y) < 1e-12;
    });
    ASSERT_NE(it, want.end()) << v.x << "," << v.y;
    want.erase(it);
  }
}

BevPolygon square(double x0, double y0, double side)
{
  return {{{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}}};
}

Box3D random_box(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> ext(1.0, 6.0), off(-6.0, 6.0),
    yaw(-std::numbers::pi, std::numbers::pi);
  return make_box(off(rng), off(rng), 0, ext(rng), ext(rng), 1, normalize_yaw(yaw(rng)), kCar, 1);
}

TEST(BevCorners, AxisAligned)
{
  expect_corner_set(bev_corners(make_box(0, 0, 0, 4, 2, 1, 0, kCar, 1)),
                    {{2, 1}, {-2, 1}, {-2, -1}, {2, -1}});
}

TEST(BevCorners, QuarterTurn)
{
  expect_corner_set(bev_corners(make_box(0, 0, 0, 4, 2, 1, std::numbers::pi / 2, kCar, 1)),
                    {{1, 2}, {-1, 2}, {-1, -2}, {1, -2}});
}

TEST(BevCorners, RotatedSquare)
{
  const double s = std::sqrt(2.0);
  expect_corner_set(bev_corners(make_box(0, 0, 0, s, s, 1, std::numbers::pi / 4, kCar, 1)),
                    {{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
}

TEST(BevCorners, CounterClockwiseAndValid)
{
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const BevPolygon p = bev_corners(random_box(rng));
    EXPECT_TRUE(is_valid_polygon(p));
    EXPECT_GT(polygon_area(p), 0.0);
  }
  BevPolygon cw = square(0, 0, 1);
  std::reverse(cw.vertices.begin(), cw.vertices.end());
  EXPECT_FALSE(is_valid_polygon(cw));
}

TEST(ConvexIntersection, UnitSquares)
{
  EXPECT_NEAR(convex_intersection_area(square(0, 0, 1), square(0, 0, 1)), 1.0, 1e-12);
  EXPECT_NEAR(convex_intersection_area(square(0, 0, 1), square(0.5, 0, 1)), 0.5, 1e-12);
}

TEST(ConvexIntersection, EdgeTouchingIsZero)
{
  EXPECT_NEAR(convex_intersection_area(square(0, 0, 1), square(1, 0, 1)), 0.0, 1e-12);
  EXPECT_NEAR(convex_intersection_area(square(0, 0, 1), square(1, 1, 1)), 0.0, 1e-12);
}

TEST(ConvexIntersection, RandomPairMatchesMonteCarlo)
{
  std::mt19937_64 rng(7);
  const Box3D a = random_box(rng);
  const Box3D b = random_box(rng);
  const double inter = convex_intersection_area(bev_corners(a), bev_corners(b));
  // Oracle area = IoU * union, recovered from the sampled IoU and the exact box areas.
  const double iou = oracle::monte_carlo_iou(a, b, 100000, 70);
  const double mc_inter = iou * (a.l * a.w + b.l * b.w) / (1.0 + iou);
  EXPECT_NEAR(inter, mc_inter, 0.02 * std::max(1.0, mc_inter));
}

TEST(ConvexIntersection, BoundedByEitherArea)
{
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const BevPolygon p = bev_corners(random_box(rng));
    const BevPolygon q = bev_corners(random_box(rng));
    const double inter = convex_intersection_area(p, q);
    EXPECT_GE(inter, 0.0);
    EXPECT_LE(inter, std::min(polygon_area(p), polygon_area(q)) + 1e-9);
  }
}

TEST(BevIou, ClosedFormCases)
{
  const Box3D a = make_box(0, 0, 0, 4, 2, 1, 0, kCar, 1);
  EXPECT_NEAR(bev_iou(a, a), 1.0, 1e-12);
  EXPECT_NEAR(bev_iou(a, make_box(2, 0, 0, 4, 2, 1, 0, kCar, 1)), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(bev_iou(a, make_box(100, 0, 0, 5, 5, 1, 0.3, kCar, 1)), 0.0);
}

TEST(BevIou, SymmetricInUnitIntervalAndMatchesOracle)
{
  std::mt19937_64 rng(19);
  for (int i = 0; i < 60; ++i) {
    const Box3D a = random_box(rng);
    const Box3D b = random_box(rng);
    const double iou = bev_iou(a, b);
    EXPECT_EQ(iou, bev_iou(b, a));
    EXPECT_GE(iou, 0.0);
    EXPECT_LE(iou, 1.0);
    EXPECT_NEAR(iou, oracle::monte_carlo_iou(a, b, 100000, 1000 + i), 0.02);
  }
}

TEST(CenterDistance, IgnoresHeight)
{
  EXPECT_DOUBLE_EQ(
    center_distance(make_box(0, 0, 0, 1, 1, 1, 0, kCar, 1), make_box(3, 4, 9, 1, 1, 1, 0, kCar, 1)),
    5.0);
}

}  // namespace
}  // namespace trajlabel
