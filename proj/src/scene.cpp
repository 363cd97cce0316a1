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

#include "critic_bench/scene.hpp"

#include "critic_bench/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace critic_bench
{

Trajectory make_trajectory(const std::vector<Pose2D> & poses)
{
  Trajectory traj;
  traj.waypoints.reserve(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    traj.waypoints.push_back({kWaypointSpacing * static_cast<double>(i + 1), poses[i]});
  }
  return traj;
}

namespace
{

// Knot i is the origin for i == 0, waypoint i-1 otherwise.
double knot_time(const Trajectory & traj, std::size_t i)
{
  return i == 0 ? 0.0 : traj.waypoints[i - 1].t;
}

Pose2D knot_pose(const Trajectory & traj, std::size_t i)
{
  return i == 0 ? Pose2D{} : traj.waypoints[i - 1].pose;
}

// Index of the segment [knot k, knot k+1] containing t, preferring the right
// segment at interior knots.
std::size_t segment_index(const Trajectory & traj, double t)
{
  const std::size_t n_seg = traj.waypoints.size();
  for (std::size_t k = 0; k + 1 < n_seg; ++k) {
    if (t < knot_time(traj, k + 1)) {
      return k;
    }
  }
  return n_seg - 1;
}

}  // namespace

Pose2D interpolate_pose(const Trajectory & traj, double t)
{
  if (traj.waypoints.empty()) {
    throw std::out_of_range("interpolate_pose: trajectory has no waypoints");
  }
  const double end = traj.waypoints.back().t;
  if (!(t >= 0.0) || t > end + 1e-9) {
    throw std::out_of_range(fmt::format("interpolate_pose: t = {} outside [0, {}]", t, end));
  }
  const std::size_t k = segment_index(traj, t);
  const double t0 = knot_time(traj, k);
  const double t1 = knot_time(traj, k + 1);
  const Pose2D p0 = knot_pose(traj, k);
  const Pose2D p1 = knot_pose(traj, k + 1);
  if (t == t0) {
    return p0;
  }
  if (t >= t1) {
    return p1;
  }
  const double s = (t - t0) / (t1 - t0);
  return {
    p0.x + s * (p1.x - p0.x), p0.y + s * (p1.y - p0.y),
    normalize_angle(p0.heading + s * angle_diff(p1.heading, p0.heading))};
}

Vec2 velocity_at(const Trajectory & traj, double t)
{
  const std::size_t k = segment_index(traj, t);
  const double dt = knot_time(traj, k + 1) - knot_time(traj, k);
  const Pose2D p0 = knot_pose(traj, k);
  const Pose2D p1 = knot_pose(traj, k + 1);
  return {(p1.x - p0.x) / dt, (p1.y - p0.y) / dt};
}

double yaw_rate_at(const Trajectory & traj, double t)
{
  const std::size_t k = segment_index(traj, t);
  const double dt = knot_time(traj, k + 1) - knot_time(traj, k);
  return angle_diff(knot_pose(traj, k + 1).heading, knot_pose(traj, k).heading) / dt;
}

std::vector<Pose2D> knot_poses(const Trajectory & traj)
{
  std::vector<Pose2D> out;
  out.reserve(traj.waypoints.size() + 1);
  out.push_back(Pose2D{});
  for (const auto & w : traj.waypoints) {
    out.push_back(w.pose);
  }
  return out;
}

OrientedBox Agent::box_at(double t) const
{
  OrientedBox b = box;
  b.center.x += velocity.x * t;
  b.center.y += velocity.y * t;
  return b;
}

const Lane * MapLayers::find_lane(std::string_view id) const
{
  const auto it = std::find_if(lanes.begin(), lanes.end(), [&](const Lane & l) { return l.id == id; });
  return it == lanes.end() ? nullptr : &*it;
}

namespace
{

bool finite_pose(const Pose2D & p)
{
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.heading);
}

bool heading_normalized(double h) { return h > -std::numbers::pi && h <= std::numbers::pi; }

void check_pose(const Pose2D & p, std::string_view field, std::vector<std::string> & out)
{
  if (!finite_pose(p)) {
    out.push_back(fmt::format("{}: coordinates must be finite", field));
  } else if (!heading_normalized(p.heading)) {
    out.push_back(fmt::format("{}.heading: {} not in (-pi, pi]", field, p.heading));
  }
}

void check_polygon(
  const Polygon & poly, std::string_view field, std::vector<std::string> & out)
{
  if (poly.size() < 3) {
    out.push_back(fmt::format("{}: polygon needs at least 3 vertices, got {}", field, poly.size()));
    return;
  }
  for (const auto & v : poly) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      out.push_back(fmt::format("{}: coordinates must be finite", field));
      return;
    }
  }
  if (!polygon_is_simple(poly)) {
    out.push_back(fmt::format("{}: polygon is self-intersecting", field));
  }
}

}  // namespace

std::vector<std::string> validate_trajectory(const Trajectory & traj, std::string_view field)
{
  std::vector<std::string> out;
  if (traj.waypoints.size() != kWaypointCount) {
    out.push_back(
      fmt::format("{}.waypoints: expected {}, got {}", field, kWaypointCount, traj.waypoints.size()));
  }
  if (std::abs(traj.horizon - kHorizon) > 1e-9) {
    out.push_back(fmt::format("{}.horizon: expected {}, got {}", field, kHorizon, traj.horizon));
  }
  for (std::size_t i = 0; i < traj.waypoints.size(); ++i) {
    const double expected = kWaypointSpacing * static_cast<double>(i + 1);
    if (std::abs(traj.waypoints[i].t - expected) > 1e-9) {
      out.push_back(fmt::format(
        "{}.waypoints[{}].t: expected {}, got {}", field, i, expected, traj.waypoints[i].t));
    }
    check_pose(traj.waypoints[i].pose, fmt::format("{}.waypoints[{}].pose", field, i), out);
  }
  return out;
}

std::vector<std::string> validate_scene(const Scene & scene)
{
  std::vector<std::string> out;
  if (scene.scene_id.empty()) {
    out.emplace_back("Scene.scene_id: must be non-empty");
  }
  check_pose(scene.ego_pose, "Scene.ego_pose", out);
  if (!std::isfinite(scene.ego.velocity) || scene.ego.velocity < 0.0) {
    out.push_back(fmt::format("EgoStatus.velocity: must be >= 0, got {}", scene.ego.velocity));
  }
  if (!std::isfinite(scene.ego.acceleration)) {
    out.emplace_back("EgoStatus.acceleration: must be finite");
  }
  if (!(scene.ego_box_dims.length > 0.0) || !(scene.ego_box_dims.width > 0.0)) {
    out.emplace_back("Scene.ego_box_dims: length and width must be > 0");
  }

  std::set<std::string> agent_ids;
  for (std::size_t i = 0; i < scene.agents.size(); ++i) {
    const auto & a = scene.agents[i];
    if (!agent_ids.insert(a.id).second) {
      out.push_back(fmt::format("Agent.id: duplicate id '{}'", a.id));
    }
    check_pose(a.box.center, fmt::format("Agent[{}].box.center", a.id), out);
    if (!(a.box.length > 0.0) || !(a.box.width > 0.0)) {
      out.push_back(fmt::format("OrientedBox[{}]: length and width must be > 0", a.id));
    }
    if (!std::isfinite(a.velocity.x) || !std::isfinite(a.velocity.y)) {
      out.push_back(fmt::format("Agent[{}].velocity: must be finite", a.id));
    }
  }

  const auto & map = scene.map;
  for (std::size_t i = 0; i < map.drivable_area.size(); ++i) {
    check_polygon(map.drivable_area[i], fmt::format("MapLayers.drivable_area[{}]", i), out);
  }
  for (std::size_t i = 0; i < map.crosswalks.size(); ++i) {
    check_polygon(map.crosswalks[i], fmt::format("MapLayers.crosswalks[{}]", i), out);
  }
  std::set<std::string> lane_ids;
  for (const auto & lane : map.lanes) {
    if (!lane_ids.insert(lane.id).second) {
      out.push_back(fmt::format("Lane.id: duplicate id '{}'", lane.id));
    }
    if (lane.centerline.size() < 2) {
      out.push_back(fmt::format(
        "Lane[{}].centerline: needs at least 2 points, got {}", lane.id, lane.centerline.size()));
    } else if (polyline_length(lane.centerline) <= 0.0) {
      out.push_back(fmt::format("Lane[{}].centerline: degenerate (zero length)", lane.id));
    }
    if (!(lane.width > 0.0)) {
      out.push_back(fmt::format("Lane[{}].width: must be > 0", lane.id));
    }
    if (lane.speed_limit && !(*lane.speed_limit >= 0.0)) {
      out.push_back(fmt::format("Lane[{}].speed_limit: must be >= 0", lane.id));
    }
  }
  if (map.route_lane_ids.empty()) {
    out.emplace_back("MapLayers.route_lane_ids: must be non-empty");
  }
  for (const auto & id : map.route_lane_ids) {
    if (!lane_ids.contains(id)) {
      out.push_back(fmt::format("MapLayers.route_lane_ids: unknown lane '{}'", id));
    }
  }
  for (const auto & light : map.traffic_lights) {
    if (!lane_ids.contains(light.lane_id)) {
      out.push_back(fmt::format("MapLayers.traffic_lights: unknown lane '{}'", light.lane_id));
    }
  }

  for (auto & v : validate_trajectory(scene.human_trajectory, "Trajectory")) {
    out.push_back(std::move(v));
  }
  if (scene.previous_human_trajectory) {
    for (auto & v : validate_trajectory(*scene.previous_human_trajectory, "Trajectory(previous)")) {
      out.push_back(std::move(v));
    }
  }
  if (scene.camera_refs && scene.camera_refs->size() != 3) {
    out.push_back(
      fmt::format("Scene.camera_refs: expected 3 references, got {}", scene.camera_refs->size()));
  }
  return out;
}

double lateral_offset(const Pose2D & pose, const Lane & lane)
{
  return project_onto_polyline(pose.position(), lane.centerline).distance;
}

std::string_view to_string(AgentCategory c)
{
  switch (c) {
    case AgentCategory::kVehicle:
      return "vehicle";
    case AgentCategory::kPedestrian:
      return "pedestrian";
    case AgentCategory::kCyclist:
      return "cyclist";
    case AgentCategory::kStaticObject:
      return "static_object";
  }
  return "vehicle";
}

std::string_view to_string(LightState s)
{
  switch (s) {
    case LightState::kRed:
      return "red";
    case LightState::kGreen:
      return "green";
    case LightState::kUnknown:
      return "unknown";
  }
  return "unknown";
}

std::string_view to_string(DrivingCommand c)
{
  switch (c) {
    case DrivingCommand::kLeft:
      return "left";
    case DrivingCommand::kStraight:
      return "straight";
    case DrivingCommand::kRight:
      return "right";
    case DrivingCommand::kUnknown:
      return "unknown";
  }
  return "unknown";
}

AgentCategory agent_category_from_string(std::string_view s)
{
  if (s == "vehicle") return AgentCategory::kVehicle;
  if (s == "pedestrian") return AgentCategory::kPedestrian;
  if (s == "cyclist") return AgentCategory::kCyclist;
  if (s == "static_object") return AgentCategory::kStaticObject;
  throw DataError(fmt::format("unknown agent category '{}'", s));
}

LightState light_state_from_string(std::string_view s)
{
  if (s == "red") return LightState::kRed;
  if (s == "green") return LightState::kGreen;
  if (s == "unknown") return LightState::kUnknown;
  throw DataError(fmt::format("unknown traffic light state '{}'", s));
}

DrivingCommand driving_command_from_string(std::string_view s)
{
  if (s == "left") return DrivingCommand::kLeft;
  if (s == "straight") return DrivingCommand::kStraight;
  if (s == "right") return DrivingCommand::kRight;
  if (s == "unknown") return DrivingCommand::kUnknown;
  throw DataError(fmt::format("unknown driving command '{}'", s));
}

}  // namespace critic_bench
