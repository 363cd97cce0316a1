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

#include "critic_bench/vocabulary.hpp"

#include "critic_bench/errors.hpp"
#include "critic_bench/parallel.hpp"
#include "critic_bench/scene_io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <map>
#include <utility>

namespace critic_bench
{

VocabParams VocabParams::default_grid()
{
  VocabParams p;
  for (int v = 0; v <= 15; ++v) {
    p.speeds.push_back(v);
  }
  for (int k = -10; k <= 10; ++k) {
    p.curvatures.push_back(0.01 * k);
  }
  p.accel_profiles = {
    {{0.0}}, {{0.5}}, {{1.0}}, {{2.0}}, {{-0.5}}, {{-1.0}},
    {{-2.0}}, {{-3.0}}, {{-4.0}}, {{1.0, -1.0}}, {{-1.0, 1.0}}, {{0.0, -2.0}}};
  return p;
}

double profile_arc_length(double v0, const AccelProfile & profile, double t)
{
  const double phase = kHorizon / static_cast<double>(profile.phases.size());
  double s = 0.0;
  double v = v0;
  double start = 0.0;
  for (const double a : profile.phases) {
    if (start >= t) {
      break;
    }
    double d = std::min(phase, t - start);
    if (a < 0.0) {
      d = std::min(d, v / -a);
    }
    s += v * d + 0.5 * a * d * d;
    v = std::max(0.0, v + a * d);
    start += phase;
  }
  return s;
}

Pose2D arc_pose(double kappa, double s)
{
  if (std::abs(kappa) < 1e-12) {
    return {s, 0.0, 0.0};
  }
  const double h = kappa * s;
  return {std::sin(h) / kappa, (1.0 - std::cos(h)) / kappa, normalize_angle(h)};
}

namespace
{

double max_waypoint_distance(const Trajectory & a, const Trajectory & b)
{
  double m = 0.0;
  for (std::size_t k = 0; k < a.waypoints.size(); ++k) {
    m = std::max(m, norm(a.waypoints[k].pose.position() - b.waypoints[k].pose.position()));
  }
  return m;
}

}  // namespace

Vocabulary build_vocabulary(const VocabParams & params)
{
  if (params.speeds.empty() || params.curvatures.empty() || params.accel_profiles.empty()) {
    throw ConfigError("vocabulary grids must be non-empty");
  }
  for (const auto & p : params.accel_profiles) {
    if (p.phases.empty()) {
      throw ConfigError("accel profile must have at least one phase");
    }
  }
  Vocabulary vocab;
  vocab.params = params;
  // Duplicates share their final waypoint to within dedup_distance, so a grid
  // over final positions narrows the comparison set.
  const double cell = std::max(params.dedup_distance, 1e-6);
  std::map<std::pair<long, long>, std::vector<std::size_t>> buckets;
  const auto key = [cell](Vec2 p) {
    return std::pair<long, long>{std::lround(std::floor(p.x / cell)),
                                 std::lround(std::floor(p.y / cell))};
  };
  for (const double v0 : params.speeds) {
    for (const double kappa : params.curvatures) {
      for (std::size_t pi = 0; pi < params.accel_profiles.size(); ++pi) {
        std::vector<Pose2D> poses;
        for (std::size_t k = 1; k <= kWaypointCount; ++k) {
          const double t = kWaypointSpacing * static_cast<double>(k);
          poses.push_back(arc_pose(kappa, profile_arc_length(v0, params.accel_profiles[pi], t)));
        }
        VocabEntry entry{make_trajectory(poses), v0, kappa, pi};
        const auto [cx, cy] = key(poses.back().position());
        bool duplicate = false;
        for (long dx = -1; dx <= 1 && !duplicate; ++dx) {
          for (long dy = -1; dy <= 1 && !duplicate; ++dy) {
            const auto it = buckets.find({cx + dx, cy + dy});
            if (it == buckets.end()) {
              continue;
            }
            for (const std::size_t j : it->second) {
              if (max_waypoint_distance(vocab.entries[j].trajectory, entry.trajectory) <=
                  params.dedup_distance) {
                duplicate = true;
                break;
              }
            }
          }
        }
        if (!duplicate) {
          buckets[{cx, cy}].push_back(vocab.entries.size());
          vocab.entries.push_back(std::move(entry));
        }
      }
    }
  }
  return vocab;
}

std::vector<ScoredEntry> score_vocabulary(
  const PreparedScene & scene, const Vocabulary & vocab, const MetricConfig & config,
  std::size_t workers)
{
  std::vector<ScoredEntry> out(vocab.entries.size());
  parallel_for(vocab.entries.size(), workers, [&](std::size_t i) {
    out[i].index = i;
    try {
      out[i].scores = score_trajectory(scene, vocab.entries[i].trajectory, config);
    } catch (const UndefinedScoreError & e) {
      out[i].error = e.what();
    }
  });
  return out;
}

namespace
{

constexpr std::string_view kVocabSchema = "critic-bench/vocab/v1";

}  // namespace

std::string vocabulary_to_jsonl(const Vocabulary & vocab)
{
  json profiles = json::array();
  for (const auto & p : vocab.params.accel_profiles) {
    profiles.push_back(p.phases);
  }
  std::string out = json{
    {"schema", kVocabSchema},
    {"params",
     {{"speeds", vocab.params.speeds},
      {"curvatures", vocab.params.curvatures},
      {"accel_profiles", profiles},
      {"dedup_distance", vocab.params.dedup_distance}}},
    {"size", vocab.entries.size()}}.dump();
  out += '\n';
  for (const auto & e : vocab.entries) {
    out += json{
      {"speed", e.speed},
      {"curvature", e.curvature},
      {"profile", e.profile},
      {"trajectory", e.trajectory}}.dump();
    out += '\n';
  }
  return out;
}

Vocabulary vocabulary_from_jsonl(const std::string & text)
{
  const auto rows = parse_jsonl(text);
  if (rows.empty() || rows[0].value("schema", std::string{}) != kVocabSchema) {
    throw DataError(fmt::format("vocabulary: missing '{}' header line", kVocabSchema));
  }
  Vocabulary vocab;
  try {
    const auto & p = rows[0].at("params");
    vocab.params.speeds = p.at("speeds").get<std::vector<double>>();
    vocab.params.curvatures = p.at("curvatures").get<std::vector<double>>();
    for (const auto & prof : p.at("accel_profiles")) {
      vocab.params.accel_profiles.push_back({prof.get<std::vector<double>>()});
    }
    vocab.params.dedup_distance = p.value("dedup_distance", 0.05);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto & r = rows[i];
      vocab.entries.push_back(
        {r.at("trajectory").get<Trajectory>(), r.at("speed").get<double>(),
         r.at("curvature").get<double>(), r.at("profile").get<std::size_t>()});
    }
  } catch (const json::exception & e) {
    throw DataError(fmt::format("vocabulary: {}", e.what()));
  }
  for (std::size_t i = 0; i < vocab.entries.size(); ++i) {
    const auto issues = validate_trajectory(vocab.entries[i].trajectory, "Trajectory");
    if (!issues.empty()) {
      throw DataError(fmt::format("vocabulary entry {}: {}", i, issues.front()));
    }
  }
  return vocab;
}

void save_vocabulary(const std::filesystem::path & path, const Vocabulary & vocab)
{
  write_file(path, vocabulary_to_jsonl(vocab));
}

Vocabulary load_vocabulary(const std::filesystem::path & path)
{
  return vocabulary_from_jsonl(read_file(path));
}

}  // namespace critic_bench
