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

#include "critic_bench/fixtures.hpp"

#include <fmt/format.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace critic_bench
{

std::string_view to_string(FixtureLayout l)
{
  switch (l) {
    case FixtureLayout::kBypass: return "bypass";
    case FixtureLayout::kYield: return "yield";
    case FixtureLayout::kFollow: return "follow";
    case FixtureLayout::kCruise: return "cruise";
  }
  return "?";
}

namespace
{

constexpr double kLaneWidth = 3.5;

class Builder
{
public:
  Builder(std::uint64_t seed, std::string scene_id) : rng_(seed)
  {
    scene_.scene_id = std::move(scene_id);
    scene_.ego_pose = {uniform(-500.0, 500.0), uniform(-500.0, 500.0),
                       normalize_angle(uniform(-std::numbers::pi, std::numbers::pi))};
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Vec2 to_map(Vec2 p) const { return transform_point(scene_.ego_pose, p); }

  void road(double speed_limit)
  {
    const double hw = 0.5 * kLaneWidth;
    const double x0 = -40.0;
    const double x1 = 120.0;
    auto & m = scene_.map;
    m.drivable_area = {
      {to_map({x0, -hw}), to_map({x1, -hw}), to_map({x1, kLaneWidth + hw}),
       to_map({x0, kLaneWidth + hw})}};
    m.lanes = {
      {"lane_ego", {to_map({x0, 0.0}), to_map({40.0, 0.0}), to_map({x1, 0.0})}, kLaneWidth,
       speed_limit},
      {"lane_left", {to_map({x0, kLaneWidth}), to_map({x1, kLaneWidth})}, kLaneWidth, speed_limit}};
    m.route_lane_ids = {"lane_ego"};
    m.crosswalks = {
      {to_map({70.0, -hw}), to_map({74.0, -hw}), to_map({74.0, kLaneWidth + hw}),
       to_map({70.0, kLaneWidth + hw})}};
  }

  void agent(std::string id, Pose2D local, double length, double width, Vec2 local_vel,
             AgentCategory cat)
  {
    Agent a;
    a.id = std::move(id);
    a.box = {compose(scene_.ego_pose, local), length, width};
    const double c = std::cos(scene_.ego_pose.heading);
    const double s = std::sin(scene_.ego_pose.heading);
    a.velocity = {c * local_vel.x - s * local_vel.y, s * local_vel.x + c * local_vel.y};
    a.category = cat;
    scene_.agents.push_back(std::move(a));
  }

  static Trajectory sample(const std::function<Vec2(double)> & path)
  {
    std::vector<Pose2D> poses;
    for (std::size_t k = 1; k <= kWaypointCount; ++k) {
      const double t = kWaypointSpacing * static_cast<double>(k);
      const Vec2 p = path(t);
      const Vec2 ahead = path(t + 1e-4);
      const Vec2 behind = path(t - 1e-4);
      poses.push_back({p.x, p.y, std::atan2(ahead.y - behind.y, ahead.x - behind.x)});
    }
    return make_trajectory(poses);
  }

  void ego(double speed, Trajectory human)
  {
    scene_.ego.velocity = speed;
    scene_.ego.acceleration = 0.0;
    scene_.ego.driving_command = DrivingCommand::kStraight;
    scene_.human_trajectory = std::move(human);
  }

  void background_traffic()
  {
    const int n = integer(0, 2);
    for (int i = 0; i < n; ++i) {
      const double v = uniform(4.0, 12.0);
      agent(fmt::format("veh_left_{}", i), {uniform(-30.0, 60.0), kLaneWidth, 0.0},
            uniform(4.2, 5.0), uniform(1.8, 2.0), {v, 0.0}, AgentCategory::kVehicle);
    }
  }

  std::mt19937_64 & rng() { return rng_; }
  Scene & scene() { return scene_; }

private:
  std::mt19937_64 rng_;
  Scene scene_;
};

double smoothstep(double u)
{
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

}  // namespace

Scene make_fixture_scene(FixtureLayout layout, std::uint64_t seed, std::string scene_id)
{
  Builder b(seed, std::move(scene_id));
  const double v = b.integer(6, 10);
  b.road(v);
  switch (layout) {
    case FixtureLayout::kBypass: {
      const double shift = b.uniform(0.7, 0.9);
      const double ramp = b.uniform(1.2, 1.6);
      const double car_x = b.uniform(4.0 * v - 6.0, 4.0 * v + 2.0);
      b.agent("parked_car", {car_x, -1.5, b.uniform(-0.05, 0.05)}, 4.6, 1.8, {0.0, 0.0},
              AgentCategory::kVehicle);
      b.ego(v, Builder::sample([=](double t) {
        return Vec2{v * t, shift * smoothstep(t / ramp)};
      }));
      break;
    }
    case FixtureLayout::kYield: {
      const double decel = b.integer(2, 3);
      b.agent("pedestrian", {b.uniform(15.0, 25.0), -2.6, std::numbers::pi / 2.0}, 0.6, 0.6,
              {0.0, 0.0}, AgentCategory::kPedestrian);
      b.ego(v, Builder::sample([=](double t) {
        const double stop = v / decel;
        const double tt = std::min(t, stop);
        return Vec2{v * tt - 0.5 * decel * tt * tt, 0.0};
      }));
      break;
    }
    case FixtureLayout::kFollow: {
      const double lead_v = b.uniform(0.35 * v, 0.5 * v);
      const double gap = b.uniform(12.0, 18.0);
      b.agent("lead_car", {2.3 + gap + 2.3, 0.0, 0.0}, 4.6, 1.9, {lead_v, 0.0},
              AgentCategory::kVehicle);
      const double decel = 1.0;
      b.ego(v, Builder::sample([=](double t) {
        const double t_match = (v - lead_v) / decel;
        const double tt = std::min(t, t_match);
        const double x = v * tt - 0.5 * decel * tt * tt + lead_v * (t - tt);
        return Vec2{x, 0.0};
      }));
      break;
    }
    case FixtureLayout::kCruise: {
      b.ego(v, Builder::sample([=](double t) { return Vec2{v * t, 0.0}; }));
      std::vector<Pose2D> prev;
      for (std::size_t k = 1; k <= kWaypointCount; ++k) {
        // Plan made half a second earlier, in the ego frame of that moment.
        prev.push_back({v * kWaypointSpacing * static_cast<double>(k), 0.0, 0.0});
      }
      b.scene().previous_human_trajectory = make_trajectory(prev);
      break;
    }
  }
  b.background_traffic();
  return b.scene();
}

FixtureCorpus generate_fixtures(const FixtureOptions & options)
{
  FixtureCorpus corpus;
  std::mt19937_64 rng(options.seed);
  const std::array<FixtureLayout, 4> layouts{
    FixtureLayout::kBypass, FixtureLayout::kYield, FixtureLayout::kFollow, FixtureLayout::kCruise};
  const std::array<double, 4> weights{0.35, 0.25, 0.25, 0.15};
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  for (std::size_t i = 0; i < options.scenes; ++i) {
    const auto layout = layouts[pick(rng)];
    const std::uint64_t scene_seed = rng();
    auto id = fmt::format("fx-{:04d}", i);
    corpus.scenes.push_back(make_fixture_scene(layout, scene_seed, id));
    corpus.layouts.push_back(layout);
    const bool test = static_cast<double>(i % 10) < options.test_fraction * 10.0;
    (test ? corpus.splits.test : corpus.splits.train).push_back(std::move(id));
  }
  return corpus;
}

VocabParams fixture_vocab_params()
{
  VocabParams p;
  for (int v = 6; v <= 10; ++v) {
    p.speeds.push_back(v);
  }
  for (int k = -4; k <= 4; ++k) {
    p.curvatures.push_back(0.005 * k);
  }
  p.accel_profiles = {
    {{0.0}}, {{-0.5}}, {{-1.0}}, {{-2.0}}, {{-3.0}}, {{0.5}}, {{0.0, -2.0}}, {{-1.0, 0.0}}};
  return p;
}

}  // namespace critic_bench
