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

#include "critic_bench/geometry.hpp"

#include <algorithm>
#include <limits>

namespace critic_bench
{

double normalize_angle(double angle)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) {
    a += two_pi;
  } else if (a > std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

double angle_diff(double to, double from) { return normalize_angle(to - from); }

Pose2D compose(const Pose2D & frame, const Pose2D & local)
{
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  return {
    frame.x + c * local.x - s * local.y, frame.y + s * local.x + c * local.y,
    normalize_angle(frame.heading + local.heading)};
}

Pose2D relative_to(const Pose2D & frame, const Pose2D & world)
{
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  const double dx = world.x - frame.x;
  const double dy = world.y - frame.y;
  return {c * dx + s * dy, -s * dx + c * dy, normalize_angle(world.heading - frame.heading)};
}

Vec2 transform_point(const Pose2D & frame, Vec2 local)
{
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  return {frame.x + c * local.x - s * local.y, frame.y + s * local.x + c * local.y};
}

Vec2 inverse_transform_point(const Pose2D & frame, Vec2 world)
{
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  const double dx = world.x - frame.x;
  const double dy = world.y - frame.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

std::array<Vec2, 4> OrientedBox::corners() const
{
  const Vec2 f{std::cos(center.heading), std::sin(center.heading)};
  const Vec2 l{-f.y, f.x};
  const Vec2 c = center.position();
  const Vec2 hf = 0.5 * length * f;
  const Vec2 hl = 0.5 * width * l;
  return {c + hf + hl, c - hf + hl, c - hf - hl, c + hf - hl};
}

namespace
{

// Projection interval of a box onto an axis.
std::pair<double, double> project(const std::array<Vec2, 4> & corners, Vec2 axis)
{
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto & p : corners) {
    const double d = dot(p, axis);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

}  // namespace

bool boxes_overlap(const OrientedBox & a, const OrientedBox & b)
{
  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::array<Vec2, 4> axes{
    Vec2{std::cos(a.center.heading), std::sin(a.center.heading)},
    Vec2{-std::sin(a.center.heading), std::cos(a.center.heading)},
    Vec2{std::cos(b.center.heading), std::sin(b.center.heading)},
    Vec2{-std::sin(b.center.heading), std::cos(b.center.heading)}};
  for (const auto & axis : axes) {
    const auto [alo, ahi] = project(ca, axis);
    const auto [blo, bhi] = project(cb, axis);
    if (ahi < blo || bhi < alo) {
      return false;
    }
  }
  return true;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b)
{
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) {
    return norm(p - a);
  }
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

double box_distance(const OrientedBox & a, const OrientedBox & b)
{
  if (boxes_overlap(a, b)) {
    return 0.0;
  }
  const auto ca = a.corners();
  const auto cb = b.corners();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 a0 = ca[i];
    const Vec2 a1 = ca[(i + 1) % 4];
    const Vec2 b0 = cb[i];
    const Vec2 b1 = cb[(i + 1) % 4];
    for (std::size_t j = 0; j < 4; ++j) {
      best = std::min(best, point_segment_distance(cb[j], a0, a1));
      best = std::min(best, point_segment_distance(ca[j], b0, b1));
    }
  }
  return best;
}

PolylineProjection project_onto_polyline(Vec2 p, std::span<const Vec2> line)
{
  PolylineProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  double accumulated = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const Vec2 a = line[i];
    const Vec2 b = line[i + 1];
    const Vec2 ab = b - a;
    const double len = norm(ab);
    if (len <= 0.0) {
      continue;
    }
    const Vec2 dir = (1.0 / len) * ab;
    const double t = std::clamp(dot(p - a, dir), 0.0, len);
    const Vec2 q = a + t * dir;
    const double d = norm(p - q);
    if (d < best.distance) {
      best.distance = d;
      best.arc_length = accumulated + t;
      best.tangent = dir;
      best.signed_offset = cross(dir, p - q) >= 0.0 ? d : -d;
    }
    accumulated += len;
  }
  return best;
}

double polyline_length(std::span<const Vec2> line)
{
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    total += norm(line[i + 1] - line[i]);
  }
  return total;
}

namespace
{

bool on_segment(Vec2 p, Vec2 a, Vec2 b)
{
  if (cross(b - a, p - a) != 0.0) {
    return false;
  }
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

int orientation(Vec2 a, Vec2 b, Vec2 c)
{
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

}  // namespace

bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon)
{
  const std::size_t n = polygon.size();
  if (n < 3) {
    return false;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = polygon[j];
    const Vec2 b = polygon[i];
    if (on_segment(p, a, b)) {
      return true;
    }
    if ((b.y > p.y) != (a.y > p.y)) {
      // Sign of the crossing test decided by an orientation predicate, no division.
      const int o = orientation(a, b, p);
      if ((b.y > a.y) ? o > 0 : o < 0) {
        inside = !inside;
      }
    }
  }
  return inside;
}

double distance_to_boundary(Vec2 p, std::span<const Vec2> polygon)
{
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    best = std::min(best, point_segment_distance(p, polygon[j], polygon[i]));
  }
  return best;
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2)
{
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) {
    return true;
  }
  return (o1 == 0 && on_segment(q1, p1, p2)) || (o2 == 0 && on_segment(q2, p1, p2)) ||
         (o3 == 0 && on_segment(p1, q1, q2)) || (o4 == 0 && on_segment(p2, q1, q2));
}

bool polygon_is_simple(std::span<const Vec2> polygon)
{
  const std::size_t n = polygon.size();
  if (n < 3) {
    return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a0 = polygon[i];
    const Vec2 a1 = polygon[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        continue;
      }
      if (segments_intersect(a0, a1, polygon[j], polygon[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace critic_bench
