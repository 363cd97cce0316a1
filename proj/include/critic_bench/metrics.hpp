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

#ifndef CRITIC_BENCH__METRICS_HPP_
#define CRITIC_BENCH__METRICS_HPP_

#include "critic_bench/geometry.hpp"
#include "critic_bench/scene.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace critic_bench
{

/// Averaged (weighted) sub-metrics. Penalty metrics are nc, dac, ddc, tlc.
enum class AvgMetric { kTtc, kEp, kLk, kHc, kEc };
inline constexpr std::array<AvgMetric, 5> kAvgMetrics{
  AvgMetric::kTtc, AvgMetric::kEp, AvgMetric::kLk, AvgMetric::kHc, AvgMetric::kEc};
std::string_view to_string(AvgMetric m);
AvgMetric avg_metric_from_string(std::string_view s);

struct SubScores
{
  double nc{1.0};
  double dac{1.0};
  double ddc{1.0};
  double tlc{1.0};
  std::optional<double> ttc{1.0};
  std::optional<double> ep{1.0};
  std::optional<double> lk{1.0};
  std::optional<double> hc{1.0};
  std::optional<double> ec{1.0};
  double epdms{1.0};

  const std::optional<double> & averaged(AvgMetric m) const;
  std::optional<double> & averaged(AvgMetric m);

  friend bool operator==(const SubScores &, const SubScores &) = default;
};

struct ComfortBounds
{
  double max_abs_accel{4.0};     ///< m/s^2
  double max_abs_jerk{8.0};      ///< m/s^3
  double max_abs_yaw_rate{0.95};  ///< rad/s
};

struct MetricConfig
{
  std::array<double, 5> weights{5.0, 5.0, 2.0, 2.0, 2.0};  ///< indexed by AvgMetric
  double lk_offset_threshold{0.5};
  double lk_duration_threshold{2.0};
  double ep_min_ref{5.0};
  double ttc_horizon{1.0};
  double ttc_threshold{1.0};
  ComfortBounds comfort;
  double sim_step{0.1};

  // Progress-reference surrogate.
  std::optional<double> target_speed;  ///< overrides lane speed limits when set
  double default_speed_limit{13.9};
  double ref_accel{1.5};
  double ref_decel{3.0};
  double safety_gap{4.0};
  double ddc_short_distance{2.0};  ///< counter-direction travel below this scores 0.5

  // Extended comfort between consecutive plans.
  double ec_frame_dt{0.5};
  double ec_max_accel_delta{1.5};
  double ec_max_yaw_rate_delta{0.2};

  /// Averaged metrics forced ABSENT.
  std::set<AvgMetric> disabled;

  double weight(AvgMetric m) const { return weights[static_cast<std::size_t>(m)]; }
  double & weight(AvgMetric m) { return weights[static_cast<std::size_t>(m)]; }

  /// Throws ConfigError when a threshold is non-positive or weights are invalid.
  void validate() const;
};

/// Parses `key = value` lines (`#` comments). Unknown keys are a ConfigError.
MetricConfig parse_metric_config(std::string_view text);
MetricConfig load_metric_config(const std::filesystem::path & path);
std::string format_metric_config(const MetricConfig & config);

struct ProgressReference
{
  double d_ref{0.0};
};

/// A scene with its map and agents expressed in the ego frame at t = 0, and
/// the route concatenated into one polyline. Built once, reused for every
/// trajectory scored against the scene.
class PreparedScene
{
public:
  explicit PreparedScene(const Scene & scene);

  const Scene & scene() const { return *scene_; }
  const std::vector<Agent> & agents() const { return agents_; }
  const std::vector<Polygon> & drivable_area() const { return drivable_; }
  const std::vector<Lane> & route_lanes() const { return route_lanes_; }
  const Polyline & route() const { return route_; }
  OrientedBox ego_box(const Pose2D & pose) const;

  struct StopLine
  {
    Vec2 a;
    Vec2 b;
    LightState state;
  };
  const std::vector<StopLine> & stop_lines() const { return stop_lines_; }

  /// Route arc-length coordinate of a point.
  double route_station(Vec2 p) const;

private:
  const Scene * scene_;
  std::vector<Agent> agents_;
  std::vector<Polygon> drivable_;
  std::vector<Lane> route_lanes_;
  Polyline route_;
  std::vector<StopLine> stop_lines_;
};

/// Lane keeping: 0 iff a contiguous run of samples with lateral offset above
/// the threshold lasts longer than the duration threshold. Sample i covers
/// sim_step seconds, so a run of k samples lasts k * sim_step.
double compute_lk(const PreparedScene & scene, const Trajectory & traj, const MetricConfig & config);

ProgressReference compute_progress_reference(const PreparedScene & scene, const MetricConfig & config);

/// min(1, d_ego / d_ref) clipped to [0, 1]; ABSENT when d_ref < ep_min_ref.
std::optional<double> ego_progress_ratio(double d_ego, double d_ref, const MetricConfig & config);

/// Route-projected progress of the trajectory end relative to the origin.
double ego_progress_distance(const PreparedScene & scene, const Trajectory & traj);

std::optional<double> compute_ep(
  const PreparedScene & scene, const Trajectory & traj, const ProgressReference & ref,
  const MetricConfig & config);

double compute_nc(const PreparedScene & scene, const Trajectory & traj, const MetricConfig & config);
double compute_dac(const PreparedScene & scene, const Trajectory & traj);
double compute_ddc(const PreparedScene & scene, const Trajectory & traj, const MetricConfig & config);
double compute_tlc(const PreparedScene & scene, const Trajectory & traj);
double compute_ttc(const PreparedScene & scene, const Trajectory & traj, const MetricConfig & config);
double compute_hc(const Trajectory & traj, const EgoStatus & ego, const MetricConfig & config);

/// Replan consistency between the current plan and the plan of the previous
/// frame (ec_frame_dt earlier). Vacuously 1 without a previous plan.
struct PlanPairContext
{
  const Trajectory * current{nullptr};
  const Trajectory * previous{nullptr};
};
double compute_ec(const PlanPairContext & context, const MetricConfig & config);

/// Finite-difference dynamics of a trajectory, shared by comfort checks and features.
struct DynamicsProfile
{
  std::vector<double> times;         ///< timestamps of `accel`
  std::vector<double> speed;         ///< longitudinal speed per knot segment
  std::vector<double> accel;         ///< first entry seeded from the ego speed
  std::vector<double> jerk;
  std::vector<double> yaw_rate;      ///< per knot segment
};
DynamicsProfile dynamics_profile(const Trajectory & traj, double seed_speed);

/// Penalty product times the weighted average over present averaged metrics.
/// Throws UndefinedScoreError if no averaged metric is present (or all present
/// ones carry zero weight).
double aggregate_epdms(const SubScores & sub, const MetricConfig & config);

SubScores score_trajectory(
  const PreparedScene & scene, const Trajectory & traj, const MetricConfig & config,
  const Trajectory * previous_plan = nullptr);

/// Convenience overload; scores against an unprepared scene.
SubScores score_trajectory(
  const Scene & scene, const Trajectory & traj, const MetricConfig & config,
  const Trajectory * previous_plan = nullptr);

/// Scores the scene's human trajectory, feeding its previous plan to EC.
SubScores score_human(const PreparedScene & scene, const MetricConfig & config);

}  // namespace critic_bench

#endif  // CRITIC_BENCH__METRICS_HPP_
