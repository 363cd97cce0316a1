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

#ifndef CRITIC_BENCH__VOCABULARY_HPP_
#define CRITIC_BENCH__VOCABULARY_HPP_

#include "critic_bench/metrics.hpp"
#include "critic_bench/scene.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace critic_bench
{

/// Piecewise-constant acceleration: the 4 s horizon is split into
/// phases.size() equal phases.
struct AccelProfile
{
  std::vector<double> phases;  ///< m/s^2
  friend bool operator==(const AccelProfile &, const AccelProfile &) = default;
};

struct VocabParams
{
  std::vector<double> speeds;      ///< initial speed, m/s
  std::vector<double> curvatures;  ///< 1/m
  std::vector<AccelProfile> accel_profiles;
  double dedup_distance{0.05};     ///< max waypoint distance treated as duplicate

  /// 16 speeds x 21 curvatures x 12 profiles before deduplication.
  static VocabParams default_grid();

  friend bool operator==(const VocabParams &, const VocabParams &) = default;
};

struct VocabEntry
{
  Trajectory trajectory;
  double speed{0.0};
  double curvature{0.0};
  std::size_t profile{0};  ///< index into accel_profiles
};

struct Vocabulary
{
  std::vector<VocabEntry> entries;
  VocabParams params;
};

/// Arc length travelled by time t from initial speed v0 under the profile,
/// with speed clamped at zero.
double profile_arc_length(double v0, const AccelProfile & profile, double t);

/// Unicycle pose after arc length s along constant curvature kappa.
Pose2D arc_pose(double kappa, double s);

/// One entry per grid combination, in speed-curvature-profile order; entries
/// within dedup_distance of an earlier entry at every waypoint are dropped.
/// Throws ConfigError when a grid is empty.
Vocabulary build_vocabulary(const VocabParams & params);

struct ScoredEntry
{
  std::size_t index{0};
  std::optional<SubScores> scores;  ///< empty when the entry is unscorable
  std::string error;
};

/// Scores every entry; an entry whose score is undefined is marked and the
/// rest proceed. Order follows the vocabulary.
std::vector<ScoredEntry> score_vocabulary(
  const PreparedScene & scene, const Vocabulary & vocab, const MetricConfig & config,
  std::size_t workers = 1);

/// JSONL: one params header line, then one entry per line.
std::string vocabulary_to_jsonl(const Vocabulary & vocab);
Vocabulary vocabulary_from_jsonl(const std::string & text);
void save_vocabulary(const std::filesystem::path & path, const Vocabulary & vocab);
Vocabulary load_vocabulary(const std::filesystem::path & path);

}  // namespace critic_bench

#endif  // CRITIC_BENCH__VOCABULARY_HPP_
