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

#ifndef CRITIC_BENCH__SCENE_HPP_
#define CRITIC_BENCH__SCENE_HPP_

#include "critic_bench/geometry.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace critic_bench
{

inline constexpr std::string_view kSceneSchema = "critic-bench/scene/v1";

inline constexpr std::size_t kWaypointCount = 8;
inline constexpr double kWaypointSpacing = 0.5;
inline constexpr double kHorizon = 4.0;

struct Waypoint
{
  double t{0.0};
  Pose2D pose;
  friend bool operator==(const Waypoint &, const Waypoint &) = default;
};

/// Eight ego-frame poses at t = 0.5, 1.0, ..., 4.0 s. The pose at t = 0 is the
/// ego origin and is not stored.
struct Trajectory
{
  std::vector<Waypoint> waypoints;
  double horizon{kHorizon};

  friend bool operator==(const Trajectory &, const Trajectory &) = default;
};

/// Builds a trajectory from eight poses placed at the canonical knot times.
Trajectory make_trajectory(const std::vector<Pose2D> & poses);

/// Pose at time t in [0, horizon]. Linear in position, shortest arc in heading.
/// Throws std::out_of_range outside the horizon.
Pose2D interpolate_pose(const Trajectory & traj, double t);

/// Planar velocity of the knot segment active at t (right derivative; the last
/// segment at t = horizon).
Vec2 velocity_at(const Trajectory & traj, double t);

/// Heading rate of the knot segment active at t.
double yaw_rate_at(const Trajectory & traj, double t);

/// Origin pose followed by the eight waypoint poses.
std::vector<Pose2D> knot_poses(const Trajectory & traj);

enum class AgentCategory { kVehicle, kPedestrian, kCyclist, kStaticObject };

struct Agent
{
  std::string id;
  OrientedBox box;
  Vec2 velocity;
  AgentCategory category{AgentCategory::kVehicle};

  /// Constant-velocity box at time t; heading is held.
  OrientedBox box_at(double t) const;
};

struct Lane
{
  std::string id;
  Polyline centerline;
  double width{3.5};
  std::optional<double> speed_limit;
};

enum class LightState { kRed, kGreen, kUnknown };

struct TrafficLight
{
  std::string lane_id;
  LightState state{LightState::kUnknown};
};

struct MapLayers
{
  std::vector<Polygon> drivable_area;
  std::vector<Lane> lanes;
  std::vector<Polygon> crosswalks;
  std::vector<std::string> route_lane_ids;
  std::vector<TrafficLight> traffic_lights;

  const Lane * find_lane(std::string_view id) const;
};

enum class DrivingCommand { kLeft, kStraight, kRight, kUnknown };

struct EgoStatus
{
  double velocity{0.0};
  double acceleration{0.0};
  DrivingCommand driving_command{DrivingCommand::kUnknown};
};

struct BoxDims
{
  double length{4.6};
  double width{1.9};
};

struct Scene
{
  std::string scene_id;
  /// Ego pose at t = 0 in the map frame; the single map-to-ego transform.
  Pose2D ego_pose;
  EgoStatus ego;
  BoxDims ego_box_dims;
  std::vector<Agent> agents;
  MapLayers map;
  Trajectory human_trajectory;
  /// Left-front, front, right-front image references. Never decoded.
  std::optional<std::vector<std::string>> camera_refs;
  /// Human plan from the previous replanning frame, used by extended comfort.
  std::optional<Trajectory> previous_human_trajectory;
};

/// Every broken invariant as "Field.path: rule" strings; empty when valid.
std::vector<std::string> validate_scene(const Scene & scene);

/// Invariant check for a single trajectory, prefixed with `field`.
std::vector<std::string> validate_trajectory(const Trajectory & traj, std::string_view field);

/// Unsigned distance from the pose position to the lane centerline.
double lateral_offset(const Pose2D & pose, const Lane & lane);

std::string_view to_string(AgentCategory c);
std::string_view to_string(LightState s);
std::string_view to_string(DrivingCommand c);
AgentCategory agent_category_from_string(std::string_view s);
LightState light_state_from_string(std::string_view s);
DrivingCommand driving_command_from_string(std::string_view s);

}  // namespace critic_bench

#endif  // CRITIC_BENCH__SCENE_HPP_
