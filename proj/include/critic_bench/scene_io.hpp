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

#ifndef CRITIC_BENCH__SCENE_IO_HPP_
#define CRITIC_BENCH__SCENE_IO_HPP_

#include "critic_bench/metrics.hpp"
#include "critic_bench/scene.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace critic_bench
{

using nlohmann::json;

void to_json(json & j, const Vec2 & v);
void from_json(const json & j, Vec2 & v);
void to_json(json & j, const Pose2D & p);
void from_json(const json & j, Pose2D & p);
void to_json(json & j, const Trajectory & t);
void from_json(const json & j, Trajectory & t);
void to_json(json & j, const OrientedBox & b);
void from_json(const json & j, OrientedBox & b);
void to_json(json & j, const Agent & a);
void from_json(const json & j, Agent & a);
void to_json(json & j, const Lane & l);
void from_json(const json & j, Lane & l);
void to_json(json & j, const MapLayers & m);
void from_json(const json & j, MapLayers & m);
void to_json(json & j, const EgoStatus & e);
void from_json(const json & j, EgoStatus & e);
void to_json(json & j, const SubScores & s);
void from_json(const json & j, SubScores & s);

/// Scene rows carry the schema tag at top level; parsing rejects other tags.
json scene_to_json(const Scene & scene);
Scene scene_from_json(const json & j);

std::vector<Scene> read_scenes_jsonl(const std::filesystem::path & path);
void write_scenes_jsonl(const std::filesystem::path & path, const std::vector<Scene> & scenes);

/// Splits text into non-empty lines and parses each as JSON.
std::vector<json> parse_jsonl(const std::string & text);
std::string read_file(const std::filesystem::path & path);
/// Writes through a temporary file and renames it into place.
void write_file(const std::filesystem::path & path, const std::string & content);

}  // namespace critic_bench

#endif  // CRITIC_BENCH__SCENE_IO_HPP_
