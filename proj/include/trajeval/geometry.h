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

// 2-D rigid-frame transforms, heading inference, oriented-box IOU, polyline
// resampling, and pose voxelization.

#ifndef TRAJEVAL_GEOMETRY_H_
#define TRAJEVAL_GEOMETRY_H_

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace trajeval {

inline constexpr double kPi = 3.14159265358979323846;

// Displacements at or below this magnitude are treated as stationary when
// inferring headings from consecutive waypoints.
inline constexpr double kMotionEpsilon = 1e-3;  // meters

// Boxes whose area falls below this are rejected as degenerate.
inline constexpr double kAreaEpsilon = 1e-12;  // square meters

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double Dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double Cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double Norm() const { return std::hypot(x, y); }
  double SquaredNorm() const { return x * x + y * y; }
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec2 xy() const { return {x, y}; }
};

// Normalizes an angle to (-pi, pi].
double NormalizeAngle(double angle);

// Rotates a vector counterclockwise by the given angle.
Vec2 Rotate(const Vec2& v, double angle);

struct Pose2 {
  Vec2 position;
  double heading = 0.0;  // radians, normalized to (-pi, pi]
};

// Rotates a displacement into the frame whose x axis points along
// ref.heading. The caller is responsible for subtracting the frame origin.
Vec2 ToAgentFrame(const Vec2& point, const Pose2& ref);

// 5-dof oriented rectangle. `length` is the extent along `heading`, `width`
// the perpendicular extent.
struct Box5 {
  Vec2 center;
  double length = 0.0;
  double width = 0.0;
  double heading = 0.0;
};

// Corner positions in counterclockwise order.
std::array<Vec2, 4> BoxCorners(const Box5& box);

// Intersection-over-union of two oriented rectangles via convex polygon
// clipping. Throws Error(kDegenerateBox) if either box has non-positive
// extents or area below kAreaEpsilon.
double BoxIou(const Box5& a, const Box5& b);

// Per-waypoint headings from consecutive position differences. heading[t] for
// t >= 1 is the direction of waypoint[t] - waypoint[t-1]; steps that move at
// most kMotionEpsilon inherit the previous heading. heading[0] uses the first
// displacement when it exceeds kMotionEpsilon, else `fallback`. Throws
// Error(kEmptyInput) for an empty sequence.
std::vector<double> InferHeadings(std::span<const Vec2> waypoints,
                                  double fallback);

// Arc-length-uniform resampling with both endpoints preserved. The output
// spacing is total_length / ceil(total_length / spacing) <= spacing. Throws
// Error(kTooFewPoints) for fewer than two input points and
// Error(kInvalidArgument) for non-positive spacing.
std::vector<Vec3> ResamplePolyline(std::span<const Vec3> points,
                                   double spacing);
std::vector<Vec2> ResamplePolyline(std::span<const Vec2> points,
                                   double spacing);

// Number of distinct (floor(x / voxel), floor(y / voxel)) cells covered by
// the given poses. Throws Error(kInvalidArgument) for non-positive voxel.
std::size_t CountUniqueVoxels(std::span<const Vec2> poses, double voxel);

}  // namespace trajeval

#endif  // TRAJEVAL_GEOMETRY_H_
