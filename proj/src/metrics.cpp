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

#include "critic_bench/metrics.hpp"

#include "critic_bench/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace critic_bench
{

namespace
{

// Continuous checks advance conservatively but never by less than this.
constexpr double kMinAdvance = 1e-5;
// Distances at or below this count as contact.
constexpr double kContactEps = 1e-9;
// Speeds at or below this count as standing still.
constexpr double kStillSpeed = 1e-6;

std::size_t sample_count(double horizon, double step)
{
  return static_cast<std::size_t>(std::floor(horizon / step + 1e-9)) + 1;
}

double sample_time(std::size_t i, double step, double horizon)
{
  return std::min(static_cast<double>(i) * step, horizon);
}

Vec2 rotate(Vec2 v, double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

void require_route(const PreparedScene & scene, std::string_view op)
{
  if (scene.route().size() < 2) {
    throw ConfigError(fmt::format("{}: scene '{}' has an empty route", op, scene.scene().scene_id));
  }
}

// Knot segment k of a trajectory, on which ego motion is linear in x, y and heading.
struct Segment
{
  double t0;
  double t1;
  Pose2D p0;
  Pose2D p1;

  Vec2 velocity() const { return {(p1.x - p0.x) / (t1 - t0), (p1.y - p0.y) / (t1 - t0)}; }
  double yaw_rate() const { return angle_diff(p1.heading, p0.heading) / (t1 - t0); }
  Pose2D at(double t) const
  {
    const double s = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
    return {
      p0.x + s * (p1.x - p0.x), p0.y + s * (p1.y - p0.y),
      normalize_angle(p0.heading + s * angle_diff(p1.heading, p0.heading))};
  }
};

std::vector<Segment> segments(const Trajectory & traj)
{
  const auto knots = knot_poses(traj);
  std::vector<Segment> out;
  out.reserve(traj.waypoints.size());
  double t_prev = 0.0;
  for (std::size_t k = 0; k < traj.waypoints.size(); ++k) {
    out.push_back({t_prev, traj.waypoints[k].t, knots[k], knots[k + 1]});
    t_prev = traj.waypoints[k].t;
  }
  return out;
}

// Lower bound on the distance between two boxes; exact when close.
double box_gap_lower_bound(const OrientedBox & a, const OrientedBox & b)
{
  const double centers = norm(a.center.position() - b.center.position());
  const double bound = centers - a.circumradius() - b.circumradius();
  if (bound > 0.0) {
    return bound;
  }
  return box_distance(a, b);
}

}  // namespace

std::string_view to_string(AvgMetric m)
{
  switch (m) {
    case AvgMetric::kTtc:
      return "ttc";
    case AvgMetric::kEp:
      return "ep";
    case AvgMetric::kLk:
      return "lk";
    case AvgMetric::kHc:
      return "hc";
    case AvgMetric::kEc:
      return "ec";
  }
  return "ttc";
}

AvgMetric avg_metric_from_string(std::string_view s)
{
  for (const auto m : kAvgMetrics) {
    if (to_string(m) == s) {
      return m;
    }
  }
  throw ConfigError(fmt::format("unknown averaged metric '{}'", s));
}

const std::optional<double> & SubScores::averaged(AvgMetric m) const
{
  switch (m) {
    case AvgMetric::kTtc:
      return ttc;
    case AvgMetric::kEp:
      return ep;
    case AvgMetric::kLk:
      return lk;
    case AvgMetric::kHc:
      return hc;
    case AvgMetric::kEc:
      return ec;
  }
  return ttc;
}

std::optional<double> & SubScores::averaged(AvgMetric m)
{
  return const_cast<std::optional<double> &>(std::as_const(*this).averaged(m));
}

void MetricConfig::validate() const
{
  double total = 0.0;
  for (const auto m : kAvgMetrics) {
    const double w = weight(m);
    if (!std::isfinite(w) || w < 0.0) {
      throw ConfigError(fmt::format("weights.{} must be a nonnegative number", to_string(m)));
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw ConfigError("weights must sum to a positive value");
  }
  const std::pair<const char *, double> positive[] = {
    {"lk_offset_threshold", lk_offset_threshold},
    {"lk_duration_threshold", lk_duration_threshold},
    {"ep_min_ref", ep_min_ref},
    {"ttc_horizon", ttc_horizon},
    {"ttc_threshold", ttc_threshold},
    {"comfort.max_abs_accel", comfort.max_abs_accel},
    {"comfort.max_abs_jerk", comfort.max_abs_jerk},
    {"comfort.max_abs_yaw_rate", comfort.max_abs_yaw_rate},
    {"sim_step", sim_step},
    {"ref_accel", ref_accel},
    {"ref_decel", ref_decel},
    {"ec_frame_dt", ec_frame_dt},
    {"ec_max_accel_delta", ec_max_accel_delta},
    {"ec_max_yaw_rate_delta", ec_max_yaw_rate_delta},
  };
  for (const auto & [key, value] : positive) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw ConfigError(fmt::format("{} must be > 0, got {}", key, value));
    }
  }
  if (safety_gap < 0.0 || default_speed_limit < 0.0 || (target_speed && *target_speed < 0.0)) {
    throw ConfigError("safety_gap, default_speed_limit and target_speed must be >= 0");
  }
  const double shift = ec_frame_dt / kWaypointSpacing;
  if (std::abs(shift - std::round(shift)) > 1e-9) {
    throw ConfigError("ec_frame_dt must be a multiple of the 0.5 s waypoint spacing");
  }
}

// ---------------------------------------------------------------------------

PreparedScene::PreparedScene(const Scene & scene) : scene_(&scene)
{
  const Pose2D & frame = scene.ego_pose;
  agents_.reserve(scene.agents.size());
  for (const auto & a : scene.agents) {
    Agent local = a;
    local.box.center = relative_to(frame, a.box.center);
    local.velocity = rotate(a.velocity, -frame.heading);
    agents_.push_back(std::move(local));
  }
  for (const auto & poly : scene.map.drivable_area) {
    Polygon local;
    local.reserve(poly.size());
    for (const auto & p : poly) {
      local.push_back(inverse_transform_point(frame, p));
    }
    drivable_.push_back(std::move(local));
  }
  for (const auto & id : scene.map.route_lane_ids) {
    const Lane * lane = scene.map.find_lane(id);
    if (lane == nullptr) {
      continue;
    }
    Lane local = *lane;
    for (auto & p : local.centerline) {
      p = inverse_transform_point(frame, p);
    }
    for (const auto & p : local.centerline) {
      if (route_.empty() || norm(p - route_.back()) > 1e-9) {
        route_.push_back(p);
      }
    }
    for (const auto & light : scene.map.traffic_lights) {
      if (light.lane_id != id || local.centerline.size() < 2) {
        continue;
      }
      const Vec2 end = local.centerline.back();
      const Vec2 before = local.centerline[local.centerline.size() - 2];
      const Vec2 dir = (1.0 / norm(end - before)) * (end - before);
      const Vec2 left{-dir.y, dir.x};
      stop_lines_.push_back(
        {end + 0.5 * local.width * left, end - 0.5 * local.width * left, light.state});
    }
    route_lanes_.push_back(std::move(local));
  }
}

OrientedBox PreparedScene::ego_box(const Pose2D & pose) const
{
  return {pose, scene_->ego_box_dims.length, scene_->ego_box_dims.width};
}

double PreparedScene::route_station(Vec2 p) const
{
  return project_onto_polyline(p, route_).arc_length;
}

// ---------------------------------------------------------------------------

double compute_lk(const PreparedScene & scene, const Trajectory & traj, const MetricConfig & config)
{
  require_route(scene, "compute_lk");
  const std::size_t n = sample_count(kHorizon, config.sim_step);
  std::size_t run = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Pose2D pose = interpolate_pose(traj, sample_time(i, config.sim_step, kHorizon));
    double offset = std::numeric_limits<double>::infinity();
    for (const auto & lane : scene.route_lanes()) {
      offset = std::min(offset, lateral_offset(pose, lane));
    }
    run = offset > config.lk_offset_threshold ? run + 1 : 0;
    if (static_cast<double>(run) * config.sim_step > config.lk_duration_threshold + 1e-9) {
      return 0.0;
    }
  }
  return 1.0;
}

namespace
{

// Distance covered in `horizon` seconds moving from v0 toward `target` at the
// given acceleration / deceleration magnitudes.
double kinematic_reach(double v0, double target, double accel, double decel, double horizon)
{
  if (v0 == target) {
    return v0 * horizon;
  }
  const double a = v0 < target ? accel : -decel;
  const double t_reach = (target - v0) / a;
  if (t_reach >= horizon) {
    return v0 * horizon + 0.5 * a * horizon * horizon;
  }
  return v0 * t_reach + 0.5 * a * t_reach * t_reach + target * (horizon - t_reach);
}

}  // namespace

ProgressReference compute_progress_reference(const PreparedScene & scene, const MetricConfig & config)
{
  require_route(scene, "compute_progress_reference");
  const Scene & s = scene.scene();

  double target = config.default_speed_limit;
  if (config.target_speed) {
    target = *config.target_speed;
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (const auto & lane : scene.route_lanes()) {
      const double d = lateral_offset(Pose2D{}, lane);
      if (d < best && lane.speed_limit) {
        best = d;
        target = *lane.speed_limit;
      }
    }
  }
  double d_ref =
    kinematic_reach(s.ego.velocity, target, config.ref_accel, config.ref_decel, kHorizon);

  const double s0 = scene.route_station({0.0, 0.0});
  const double ego_half_len = 0.5 * s.ego_box_dims.length;
  const double ego_half_width = 0.5 * s.ego_box_dims.width;
  for (const auto & agent : scene.agents()) {
    const auto proj = project_onto_polyline(agent.box.center.position(), scene.route());
    if (proj.arc_length <= s0) {
      continue;
    }
    const double rel = agent.box.center.heading - std::atan2(proj.tangent.y, proj.tangent.x);
    const double c = std::abs(std::cos(rel));
    const double sn = std::abs(std::sin(rel));
    const double half_par = 0.5 * agent.box.length * c + 0.5 * agent.box.width * sn;
    const double half_perp = 0.5 * agent.box.length * sn + 0.5 * agent.box.width * c;
    if (proj.distance - half_perp >= ego_half_width) {
      continue;  // clear of the ego's in-lane corridor
    }
    const double gap = proj.arc_length - half_par - s0 - ego_half_len;
    const double along = std::max(0.0, dot(agent.velocity, proj.tangent));
    d_ref = std::min(d_ref, gap + along * kHorizon - config.safety_gap);
  }
  return {std::max(0.0, d_ref)};
}

std::optional<double> ego_progress_ratio(double d_ego, double d_ref, const MetricConfig & config)
{
  if (d_ref < config.ep_min_ref) {
    return std::nullopt;
  }
  return std::clamp(d_ego / d_ref, 0.0, 1.0);
}

double ego_progress_distance(const PreparedScene & scene, const Trajectory & traj)
{
  require_route(scene, "ego_progress_distance");
  const Pose2D end = traj.waypoints.back().pose;
  return scene.route_station(end.position()) - scene.route_station({0.0, 0.0});
}

std::optional<double> compute_ep(
  const PreparedScene & scene, const Trajectory & traj, const ProgressReference & ref,
  const MetricConfig & config)
{
  return ego_progress_ratio(ego_progress_distance(scene, traj), ref.d_ref, config);
}

// ---------------------------------------------------------------------------

double compute_nc(const PreparedScene & scene, const Trajectory & traj, const MetricConfig &)
{
  const auto segs = segments(traj);
  const double r_ego = scene.ego_box(Pose2D{}).circumradius();
  for (const auto & agent : scene.agents()) {
    bool contact = false;
    for (const auto & seg : segs) {
      const Vec2 v_ego = seg.velocity();
      const double rel_speed =
        norm(v_ego - agent.velocity) + std::abs(seg.yaw_rate()) * r_ego;
      double t = seg.t0;
      while (true) {
        const OrientedBox ego = scene.ego_box(seg.at(t));
        const OrientedBox other = agent.box_at(t);
        const double gap = box_gap_lower_bound(ego, other);
        if (gap <= kContactEps) {
          contact = true;
          // At fault iff ego moves toward the agent at the moment of contact.
          const Vec2 to_agent = other.center.position() - ego.center.position();
          const double dist = norm(to_agent);
          const double closing = dist > 0.0 ? dot(v_ego, (1.0 / dist) * to_agent) : norm(v_ego);
          if (closing > kStillSpeed) {
            return 0.0;
          }
          break;
        }
        if (t >= seg.t1 || rel_speed <= 0.0) {
          break;
        }
        t = std::min(seg.t1, t + std::max(gap / rel_speed, kMinAdvance));
      }
      if (contact) {
        break;
      }
    }
  }
  return 1.0;
}

namespace
{

// Largest distance to a boundary among drivable polygons containing p, or -1
// when p lies outside all of them.
double drivable_margin(const std::vector<Polygon> & area, Vec2 p)
{
  double best = -1.0;
  for (const auto & poly : area) {
    if (point_in_polygon(p, poly)) {
      best = std::max(best, distance_to_boundary(p, poly));
    }
  }
  return best;
}

}  // namespace

double compute_dac(const PreparedScene & scene, const Trajectory & traj)
{
  const auto segs = segments(traj);
  const auto & area = scene.drivable_area();
  const auto & dims = scene.scene().ego_box_dims;
  const std::array<Vec2, 4> offsets{
    Vec2{0.5 * dims.length, 0.5 * dims.width}, Vec2{-0.5 * dims.length, 0.5 * dims.width},
    Vec2{-0.5 * dims.length, -0.5 * dims.width}, Vec2{0.5 * dims.length, -0.5 * dims.width}};
  const double arm = norm(offsets[0]);
  for (const auto & seg : segs) {
    const double corner_speed = norm(seg.velocity()) + std::abs(seg.yaw_rate()) * arm;
    for (const auto & off : offsets) {
      double t = seg.t0;
      while (true) {
        const Pose2D pose = seg.at(t);
        const Vec2 corner = transform_point(pose, off);
        const double margin = drivable_margin(area, corner);
        if (margin < 0.0) {
          return 0.0;
        }
        if (t >= seg.t1 || corner_speed <= 0.0) {
          break;
        }
        t = std::min(seg.t1, t + std::max(margin / corner_speed, kMinAdvance));
      }
    }
  }
  return 1.0;
}

double compute_ddc(const PreparedScene & scene, const Trajectory & traj, const MetricConfig & config)
{
  require_route(scene, "compute_ddc");
  const std::size_t n = sample_count(kHorizon, config.sim_step);
  double counter = 0.0;
  Vec2 prev = interpolate_pose(traj, 0.0).position();
  for (std::size_t i = 1; i < n; ++i) {
    const Vec2 cur = interpolate_pose(traj, sample_time(i, config.sim_step, kHorizon)).position();
    const Vec2 step = cur - prev;
    const auto proj = project_onto_polyline(0.5 * (prev + cur), scene.route());
    if (dot(step, proj.tangent) < 0.0) {
      counter += norm(step);
    }
    prev = cur;
  }
  if (counter <= 1e-6) {
    return 1.0;
  }
  return counter < config.ddc_short_distance ? 0.5 : 0.0;
}

double compute_tlc(const PreparedScene & scene, const Trajectory & traj)
{
  const auto knots = knot_poses(traj);
  for (const auto & line : scene.stop_lines()) {
    if (line.state != LightState::kRed) {
      continue;
    }
    const Vec2 mid = 0.5 * (line.a + line.b);
    const Vec2 across = line.a - line.b;
    const Vec2 forward{across.y, -across.x};  // lane direction at the stop line
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
      const Vec2 p = knots[k].position();
      const Vec2 q = knots[k + 1].position();
      if (dot(p - mid, forward) < 0.0 && dot(q - mid, forward) >= 0.0 &&
          segments_intersect(p, q, line.a, line.b)) {
        return 0.0;
      }
    }
  }
  return 1.0;
}

namespace
{

// Earliest interval of tau in [0, tau_max] where two translating boxes overlap,
// by intersecting the per-axis overlap intervals of the separating-axis test.
bool translating_boxes_meet(
  const OrientedBox & a, Vec2 va, const OrientedBox & b, Vec2 vb, double tau_max)
{
  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::array<Vec2, 4> axes{
    Vec2{std::cos(a.center.heading), std::sin(a.center.heading)},
    Vec2{-std::sin(a.center.heading), std::cos(a.center.heading)},
    Vec2{std::cos(b.center.heading), std::sin(b.center.heading)},
    Vec2{-std::sin(b.center.heading), std::cos(b.center.heading)}};
  double lo = 0.0;
  double hi = tau_max;
  for (const auto & axis : axes) {
    double alo = std::numeric_limits<double>::infinity();
    double ahi = -alo;
    double blo = alo;
    double bhi = -alo;
    for (std::size_t i = 0; i < 4; ++i) {
      alo = std::min(alo, dot(ca[i], axis));
      ahi = std::max(ahi, dot(ca[i], axis));
      blo = std::min(blo, dot(cb[i], axis));
      bhi = std::max(bhi, dot(cb[i], axis));
    }
    // Overlap on this axis: alo - bhi + tau * rate <= 0 and blo - ahi - tau * rate <= 0.
    const double rate = dot(va - vb, axis);
    const auto constrain = [&](double c0, double c1) {
      // c0 + c1 * tau <= 0
      if (c1 == 0.0) {
        if (c0 > 0.0) {
          hi = -1.0;
        }
      } else if (c1 > 0.0) {
        hi = std::min(hi, -c0 / c1);
      } else {
        lo = std::max(lo, -c0 / c1);
      }
    };
    constrain(alo - bhi, rate);
    constrain(blo - ahi, -rate);
    if (lo > hi) {
      return false;
    }
  }
  return lo <= hi;
}

}  // namespace

double compute_ttc(const PreparedScene & scene, const Trajectory & traj, const MetricConfig & config)
{
  const std::size_t n = sample_count(kHorizon, config.sim_step);
  const double tau_max = std::min(config.ttc_horizon, config.ttc_threshold);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = sample_time(i, config.sim_step, kHorizon);
    const Vec2 v = velocity_at(traj, t);
    if (norm(v) <= kStillSpeed) {
      continue;
    }
    const OrientedBox ego = scene.ego_box(interpolate_pose(traj, t));
    for (const auto & agent : scene.agents()) {
      if (translating_boxes_meet(ego, v, agent.box_at(t), agent.velocity, tau_max)) {
        return 0.0;
      }
    }
  }
  return 1.0;
}

// ---------------------------------------------------------------------------

DynamicsProfile dynamics_profile(const Trajectory & traj, double seed_speed)
{
  DynamicsProfile out;
  const auto knots = knot_poses(traj);
  std::vector<double> speed_times{0.0};
  std::vector<double> speeds{seed_speed};
  double t_prev = 0.0;
  for (std::size_t k = 1; k < knots.size(); ++k) {
    const double t = traj.waypoints[k - 1].t;
    const double dt = t - t_prev;
    const Pose2D & a = knots[k - 1];
    const Pose2D & b = knots[k];
    const double mid_heading = a.heading + 0.5 * angle_diff(b.heading, a.heading);
    const Vec2 dir{std::cos(mid_heading), std::sin(mid_heading)};
    const double u = dot(b.position() - a.position(), dir) / dt;
    out.speed.push_back(u);
    out.yaw_rate.push_back(angle_diff(b.heading, a.heading) / dt);
    speed_times.push_back(0.5 * (t + t_prev));
    speeds.push_back(u);
    t_prev = t;
  }
  for (std::size_t k = 1; k < speeds.size(); ++k) {
    out.accel.push_back((speeds[k] - speeds[k - 1]) / (speed_times[k] - speed_times[k - 1]));
    out.times.push_back(0.5 * (speed_times[k] + speed_times[k - 1]));
  }
  for (std::size_t k = 1; k < out.accel.size(); ++k) {
    out.jerk.push_back((out.accel[k] - out.accel[k - 1]) / (out.times[k] - out.times[k - 1]));
  }
  return out;
}

namespace
{

double max_abs(const std::vector<double> & v)
{
  double m = 0.0;
  for (const double x : v) {
    m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace

double compute_hc(const Trajectory & traj, const EgoStatus & ego, const MetricConfig & config)
{
  const auto dyn = dynamics_profile(traj, ego.velocity);
  const auto & b = config.comfort;
  const bool ok = max_abs(dyn.accel) <= b.max_abs_accel && max_abs(dyn.jerk) <= b.max_abs_jerk &&
                  max_abs(dyn.yaw_rate) <= b.max_abs_yaw_rate;
  return ok ? 1.0 : 0.0;
}

double compute_ec(const PlanPairContext & context, const MetricConfig & config)
{
  if (context.current == nullptr || context.previous == nullptr) {
    return 1.0;
  }
  const auto shift =
    static_cast<std::size_t>(std::llround(config.ec_frame_dt / kWaypointSpacing));
  // Segment accelerations without a seed: speeds are frame independent.
  const auto segment_accel = [](const DynamicsProfile & d) {
    std::vector<double> a;
    for (std::size_t k = 1; k < d.speed.size(); ++k) {
      a.push_back((d.speed[k] - d.speed[k - 1]) / kWaypointSpacing);
    }
    return a;
  };
  const auto cur = dynamics_profile(*context.current, 0.0);
  const auto prev = dynamics_profile(*context.previous, 0.0);
  const auto cur_acc = segment_accel(cur);
  const auto prev_acc = segment_accel(prev);
  for (std::size_t k = 0; k + shift < prev.yaw_rate.size() && k < cur.yaw_rate.size(); ++k) {
    if (std::abs(cur.yaw_rate[k] - prev.yaw_rate[k + shift]) > config.ec_max_yaw_rate_delta) {
      return 0.0;
    }
  }
  for (std::size_t k = 0; k + shift < prev_acc.size() && k < cur_acc.size(); ++k) {
    if (std::abs(cur_acc[k] - prev_acc[k + shift]) > config.ec_max_accel_delta) {
      return 0.0;
    }
  }
  return 1.0;
}

// ---------------------------------------------------------------------------

double aggregate_epdms(const SubScores & sub, const MetricConfig & config)
{
  const double penalty = sub.nc * sub.dac * sub.ddc * sub.tlc;
  double num = 0.0;
  double den = 0.0;
  for (const auto m : kAvgMetrics) {
    const auto & v = sub.averaged(m);
    if (v) {
      num += config.weight(m) * *v;
      den += config.weight(m);
    }
  }
  if (!(den > 0.0)) {
    throw UndefinedScoreError("aggregate_epdms: no averaged sub-metric is present");
  }
  return penalty * (num / den);
}

SubScores score_trajectory(
  const PreparedScene & scene, const Trajectory & traj, const MetricConfig & config,
  const Trajectory * previous_plan)
{
  SubScores s;
  s.nc = compute_nc(scene, traj, config);
  s.dac = compute_dac(scene, traj);
  s.ddc = compute_ddc(scene, traj, config);
  s.tlc = compute_tlc(scene, traj);
  s.ttc = compute_ttc(scene, traj, config);
  s.ep = compute_ep(scene, traj, compute_progress_reference(scene, config), config);
  s.lk = compute_lk(scene, traj, config);
  s.hc = compute_hc(traj, scene.scene().ego, config);
  s.ec = compute_ec({&traj, previous_plan}, config);
  for (const auto m : config.disabled) {
    s.averaged(m).reset();
  }
  s.epdms = aggregate_epdms(s, config);
  return s;
}

SubScores score_trajectory(
  const Scene & scene, const Trajectory & traj, const MetricConfig & config,
  const Trajectory * previous_plan)
{
  const PreparedScene prepared(scene);
  return score_trajectory(prepared, traj, config, previous_plan);
}

SubScores score_human(const PreparedScene & scene, const MetricConfig & config)
{
  const auto & prev = scene.scene().previous_human_trajectory;
  return score_trajectory(
    scene, scene.scene().human_trajectory, config, prev ? &*prev : nullptr);
}

}  // namespace critic_bench
