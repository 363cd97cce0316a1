// Copyright 2026 The critic-bench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CRITIC_BENCH__GEOMETRY_HPP_
#define CRITIC_BENCH__GEOMETRY_HPP_

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace critic_bench
{

struct Vec2
{
  double x{0.0};
  double y{0.0};

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Signed smallest rotation taking `from` to `to`, in (-pi, pi].
double angle_diff(double to, double from);

struct Pose2D
{
  double x{0.0};
  double y{0.0};
  double heading{0.0};

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose2D &, const Pose2D &) = default;
};

/// Rigid transform composition: `local` expressed in the frame of `frame`.
Pose2D compose(const Pose2D & frame, const Pose2D & local);
/// Inverse of compose: expresses a world pose in the frame of `frame`.
Pose2D relative_to(const Pose2D & frame, const Pose2D & world);
Vec2 transform_point(const Pose2D & frame, Vec2 local);
Vec2 inverse_transform_point(const Pose2D & frame, Vec2 world);

using Polygon = std::vector<Vec2>;
using Polyline = std::vector<Vec2>;

struct OrientedBox
{
  Pose2D center;
  double length{0.0};
  double width{0.0};

  /// Corners counter-clockwise starting front-left.
  std::array<Vec2, 4> corners() const;
  double circumradius() const { return 0.5 * std::hypot(length, width); }
};

/// Separating-axis test. Touching boxes count as overlapping.
bool boxes_overlap(const OrientedBox & a, const OrientedBox & b);

/// Euclidean distance between two boxes, 0 when they overlap.
double box_distance(const OrientedBox & a, const OrientedBox & b);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

struct PolylineProjection
{
  double distance{0.0};     ///< unsigned distance to the nearest point
  double arc_length{0.0};   ///< arc length of the nearest point from the first vertex
  Vec2 tangent{1.0, 0.0};   ///< unit direction of the nearest segment
  double signed_offset{0.0};  ///< positive to the left of the direction of travel
};

/// Nearest-point projection onto a polyline with at least two vertices.
PolylineProjection project_onto_polyline(Vec2 p, std::span<const Vec2> line);

double polyline_length(std::span<const Vec2> line);

/// Point in polygon, points on the boundary count as inside.
bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon);

/// Distance from a point to the polygon boundary.
double distance_to_boundary(Vec2 p, std::span<const Vec2> polygon);

/// True when no two non-adjacent edges intersect.
bool polygon_is_simple(std::span<const Vec2> polygon);

/// Closed-segment intersection test.
bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2);

}  // namespace critic_bench

#endif  // CRITIC_BENCH__GEOMETRY_HPP_
