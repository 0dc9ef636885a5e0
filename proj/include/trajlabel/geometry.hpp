// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "trajlabel/types.hpp"

namespace trajlabel
{

struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2 &) const = default;
};

/// Convex polygon in the BEV plane, vertices counter-clockwise.
struct BevPolygon
{
  std::vector<Vec2> vertices;
};

/// The four footprint corners of `box`, counter-clockwise.
BevPolygon bev_corners(const Box3D & box);

/// Signed shoelace area; positive for CCW polygons.
double polygon_area(const BevPolygon & poly);

/// True when the polygon has >= 3 vertices, is CCW and strictly convex.
bool is_valid_polygon(const BevPolygon & poly, double eps = 1e-12);

/// Area of p ∩ q for convex CCW polygons, by half-plane clipping of p against q's edges.
double convex_intersection_area(const BevPolygon & p, const BevPolygon & q);

/// Footprint intersection-over-union, in [0, 1]. Class is ignored here.
double bev_iou(const Box3D & a, const Box3D & b);

double center_distance(const Box3D & a, const Box3D & b);

}  // namespace trajlabel
