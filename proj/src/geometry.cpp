// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include "trajlabel/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace trajlabel
{

namespace
{

constexpr double kOrientEps = 1e-12;

double cross(const Vec2 & o, const Vec2 & a, const Vec2 & b)
{
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Point where segment (s, e) crosses the line through (a, b).
Vec2 line_intersection(const Vec2 & s, const Vec2 & e, const Vec2 & a, const Vec2 & b)
{
  const double ds = cross(a, b, s);
  const double de = cross(a, b, e);
  const double t = ds / (ds - de);
  return {s.x + t * (e.x - s.x), s.y + t * (e.y - s.y)};
}

}  // namespace

BevPolygon bev_corners(const Box3D & box)
{
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = 0.5 * box.l;
  const double hw = 0.5 * box.w;
  // Local corners in CCW order: front-left, rear-left, rear-right, front-right.
  const double local[4][2] = {{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}};
  BevPolygon poly;
  poly.vertices.reserve(4);
  for (const auto & p : local) {
    poly.vertices.push_back({box.x + c * p[0] - s * p[1], box.y + s * p[0] + c * p[1]});
  }
  return poly;
}

double polygon_area(const BevPolygon & poly)
{
  const auto & v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) {
    return 0.0;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 & a = v[i];
    const Vec2 & b = v[(i + 1) % n];
    acc += a.x * b.y - b.x * a.y;
  }
  return 0.5 * acc;
}

bool is_valid_polygon(const BevPolygon & poly, double eps)
{
  const auto & v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) {
    return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (cross(v[i], v[(i + 1) % n], v[(i + 2) % n]) <= eps) {
      return false;
    }
  }
  return true;
}

double convex_intersection_area(const BevPolygon & p, const BevPolygon & q)
{
  std::vector<Vec2> subject = p.vertices;
  std::vector<Vec2> next;
  const auto & clip = q.vertices;
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && subject.size() >= 3; ++e) {
    const Vec2 & a = clip[e];
    const Vec2 & b = clip[(e + 1) % m];
    next.clear();
    const std::size_t n = subject.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 & cur = subject[i];
      const Vec2 & prv = subject[(i + n - 1) % n];
      const double dc = cross(a, b, cur);
      const double dp = cross(a, b, prv);
      const bool cur_in = dc > kOrientEps;
      const bool prv_in = dp > kOrientEps;
      if (cur_in) {
        if (!prv_in && dp < -kOrientEps) {
          next.push_back(line_intersection(prv, cur, a, b));
        } else if (!prv_in) {
          next.push_back(prv);
        }
        next.push_back(cur);
      } else if (prv_in) {
        if (dc < -kOrientEps) {
          next.push_back(line_intersection(prv, cur, a, b));
        } else {
          next.push_back(cur);
        }
      }
    }
    subject.swap(next);
  }
  if (subject.size() < 3) {
    return 0.0;
  }
  return std::max(0.0, polygon_area(BevPolygon{std::move(subject)}));
}

double center_distance(const Box3D & a, const Box3D & b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

double bev_iou(const Box3D & a, const Box3D & b)
{
  // Circumscribed circles disjoint => no overlap.
  const double ra = 0.5 * std::hypot(a.l, a.w);
  const double rb = 0.5 * std::hypot(b.l, b.w);
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  if (dx * dx + dy * dy >= (ra + rb) * (ra + rb)) {
    return 0.0;
  }
  const double area_a = a.l * a.w;
  const double area_b = b.l * b.w;
  // Intersection is symmetric in exact arithmetic; fix the clip order so iou(a,b) == iou(b,a)
  // bit for bit.
  const bool swap = std::tie(a.x, a.y, a.l, a.w, a.yaw) > std::tie(b.x, b.y, b.l, b.w, b.yaw);
  const double inter = swap ? convex_intersection_area(bev_corners(b), bev_corners(a))
                            : convex_intersection_area(bev_corners(a), bev_corners(b));
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) {
    return 0.0;
  }
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace trajlabel
