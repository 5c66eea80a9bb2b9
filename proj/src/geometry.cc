/* Copyright 2026 The Trajeval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "trajeval/geometry.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_set>

#include "trajeval/error.h"

namespace trajeval {
namespace {

double PolygonArea(std::span<const Vec2> polygon) {
  double twice_area = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = polygon[i];
    const Vec2& q = polygon[(i + 1) % n];
    twice_area += p.Cross(q);
  }
  return 0.5 * std::abs(twice_area);
}

// Clips a convex polygon against the half-plane on the left of edge a->b
// (Sutherland-Hodgman step).
std::vector<Vec2> ClipAgainstEdge(const std::vector<Vec2>& polygon,
                                  const Vec2& a, const Vec2& b) {
  std::vector<Vec2> result;
  result.reserve(polygon.size() + 1);
  const Vec2 edge = b - a;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& current = polygon[i];
    const Vec2& next = polygon[(i + 1) % n];
    const double side_current = edge.Cross(current - a);
    const double side_next = edge.Cross(next - a);
    if (side_current >= 0.0) {
      result.push_back(current);
    }
    if ((side_current > 0.0 && side_next < 0.0) ||
        (side_current < 0.0 && side_next > 0.0)) {
      const double t = side_current / (side_current - side_next);
      result.push_back(current + (next - current) * t);
    }
  }
  return result;
}

void CheckBox(const Box5& box) {
  if (!(box.length > 0.0) || !(box.width > 0.0) ||
      box.length * box.width < kAreaEpsilon) {
    throw Error(ErrorCode::kDegenerateBox, "box has degenerate extents");
  }
}

template <typename Point>
std::vector<Point> ResampleImpl(std::span<const Point> points,
                                double spacing) {
  if (spacing <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "spacing must be positive");
  }
  if (points.size() < 2) {
    throw Error(ErrorCode::kTooFewPoints,
                "polyline resampling needs at least two points");
  }

  const std::size_t n = points.size();
  std::vector<double> cumulative(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double dx = points[i].x - points[i - 1].x;
    double dy = points[i].y - points[i - 1].y;
    double segment;
    if constexpr (requires { points[i].z; }) {
      double dz = points[i].z - points[i - 1].z;
      segment = std::sqrt(dx * dx + dy * dy + dz * dz);
    } else {
      segment = std::hypot(dx, dy);
    }
    cumulative[i] = cumulative[i - 1] + segment;
  }
  const double total = cumulative.back();
  if (total <= 0.0) {
    // Degenerate polyline; keep the endpoints.
    return {points.front(), points.back()};
  }

  const std::size_t segments =
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::ceil(total / spacing - 1e-12)));
  std::vector<Point> result;
  result.reserve(segments + 1);
  result.push_back(points.front());
  std::size_t cursor = 1;
  for (std::size_t i = 1; i < segments; ++i) {
    const double target = total * static_cast<double>(i) /
                          static_cast<double>(segments);
    while (cursor < n - 1 && cumulative[cursor] < target) {
      ++cursor;
    }
    const double seg_start = cumulative[cursor - 1];
    const double seg_len = cumulative[cursor] - seg_start;
    const double t = seg_len > 0.0 ? (target - seg_start) / seg_len : 0.0;
    const Point& p = points[cursor - 1];
    const Point& q = points[cursor];
    Point sample = p;
    sample.x = p.x + (q.x - p.x) * t;
    sample.y = p.y + (q.y - p.y) * t;
    if constexpr (requires { sample.z; }) {
      sample.z = p.z + (q.z - p.z) * t;
    }
    result.push_back(sample);
  }
  result.push_back(points.back());
  return result;
}

}  // namespace

double NormalizeAngle(double angle) {
  double wrapped = std::fmod(angle, 2.0 * kPi);
  if (wrapped <= -kPi) {
    wrapped += 2.0 * kPi;
  } else if (wrapped > kPi) {
    wrapped -= 2.0 * kPi;
  }
  return wrapped;
}

Vec2 Rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {v.x * c - v.y * s, v.x * s + v.y * c};
}

Vec2 ToAgentFrame(const Vec2& point, const Pose2& ref) {
  return Rotate(point, -ref.heading);
}

std::array<Vec2, 4> BoxCorners(const Box5& box) {
  const double hl = 0.5 * box.length;
  const double hw = 0.5 * box.width;
  const std::array<Vec2, 4> local = {
      Vec2{hl, hw}, Vec2{-hl, hw}, Vec2{-hl, -hw}, Vec2{hl, -hw}};
  std::array<Vec2, 4> corners;
  for (std::size_t i = 0; i < 4; ++i) {
    corners[i] = box.center + Rotate(local[i], box.heading);
  }
  return corners;
}

double BoxIou(const Box5& a, const Box5& b) {
  CheckBox(a);
  CheckBox(b);

  // Cheap separation gate on circumscribed circles.
  const double reach = 0.5 * (std::hypot(a.length, a.width) +
                              std::hypot(b.length, b.width));
  if ((a.center - b.center).SquaredNorm() > reach * reach) {
    return 0.0;
  }

  const std::array<Vec2, 4> corners_a = BoxCorners(a);
  const std::array<Vec2, 4> corners_b = BoxCorners(b);
  std::vector<Vec2> clipped(corners_a.begin(), corners_a.end());
  for (std::size_t i = 0; i < 4 && !clipped.empty(); ++i) {
    clipped = ClipAgainstEdge(clipped, corners_b[i], corners_b[(i + 1) % 4]);
  }
  if (clipped.size() < 3) {
    return 0.0;
  }
  const double intersection = PolygonArea(clipped);
  const double area_a = a.length * a.width;
  const double area_b = b.length * b.width;
  const double iou = intersection / (area_a + area_b - intersection);
  return std::clamp(iou, 0.0, 1.0);
}

std::vector<double> InferHeadings(std::span<const Vec2> waypoints,
                                  double fallback) {
  if (waypoints.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no waypoints to infer headings from");
  }
  const std::size_t n = waypoints.size();
  std::vector<double> headings(n, fallback);
  if (n == 1) {
    return headings;
  }

  const Vec2 first_step = waypoints[1] - waypoints[0];
  headings[0] = first_step.Norm() > kMotionEpsilon
                    ? std::atan2(first_step.y, first_step.x)
                    : fallback;
  for (std::size_t t = 1; t < n; ++t) {
    const Vec2 step = waypoints[t] - waypoints[t - 1];
    headings[t] = step.Norm() > kMotionEpsilon
                      ? std::atan2(step.y, step.x)
                      : headings[t - 1];
  }
  return headings;
}

std::vector<Vec3> ResamplePolyline(std::span<const Vec3> points,
                                   double spacing) {
  return ResampleImpl(points, spacing);
}

std::vector<Vec2> ResamplePolyline(std::span<const Vec2> points,
                                   double spacing) {
  return ResampleImpl(points, spacing);
}

std::size_t CountUniqueVoxels(std::span<const Vec2> poses, double voxel) {
  if (voxel <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "voxel size must be positive");
  }
  std::unordered_set<std::uint64_t> cells;
  cells.reserve(poses.size());
  for (const Vec2& pose : poses) {
    const auto ix = static_cast<std::int64_t>(std::floor(pose.x / voxel));
    const auto iy = static_cast<std::int64_t>(std::floor(pose.y / voxel));
    const std::uint64_t key = (static_cast<std::uint64_t>(ix) << 32) ^
                              (static_cast<std::uint64_t>(iy) & 0xffffffffull);
    cells.insert(key);
  }
  return cells.size();
}

}  // namespace trajeval
