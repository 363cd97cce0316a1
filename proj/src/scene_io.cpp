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

#include "critic_bench/scene_io.hpp"

#include "critic_bench/errors.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace critic_bench
{

void to_json(json & j, const Vec2 & v) { j = json::array({v.x, v.y}); }

void from_json(const json & j, Vec2 & v)
{
  if (!j.is_array() || j.size() != 2) {
    throw DataError("point must be a [x, y] array");
  }
  v = {j[0].get<double>(), j[1].get<double>()};
}

void to_json(json & j, const Pose2D & p) { j = {{"x", p.x}, {"y", p.y}, {"heading", p.heading}}; }

void from_json(const json & j, Pose2D & p)
{
  p = {j.at("x").get<double>(), j.at("y").get<double>(), j.at("heading").get<double>()};
}

void to_json(json & j, const Trajectory & t)
{
  json wps = json::array();
  for (const auto & w : t.waypoints) {
    wps.push_back({{"t", w.t}, {"pose", w.pose}});
  }
  j = {{"waypoints", std::move(wps)}, {"horizon", t.horizon}};
}

void from_json(const json & j, Trajectory & t)
{
  t.waypoints.clear();
  for (const auto & w : j.at("waypoints")) {
    t.waypoints.push_back({w.at("t").get<double>(), w.at("pose").get<Pose2D>()});
  }
  t.horizon = j.value("horizon", kHorizon);
}

void to_json(json & j, const OrientedBox & b)
{
  j = {{"center", b.center}, {"length", b.length}, {"width", b.width}};
}

void from_json(const json & j, OrientedBox & b)
{
  b = {j.at("center").get<Pose2D>(), j.at("length").get<double>(), j.at("width").get<double>()};
}

void to_json(json & j, const Agent & a)
{
  j = {
    {"id", a.id},
    {"box", a.box},
    {"velocity", {{"vx", a.velocity.x}, {"vy", a.velocity.y}}},
    {"category", to_string(a.category)}};
}

void from_json(const json & j, Agent & a)
{
  a.id = j.at("id").get<std::string>();
  a.box = j.at("box").get<OrientedBox>();
  const auto & v = j.at("velocity");
  a.velocity = {v.at("vx").get<double>(), v.at("vy").get<double>()};
  a.category = agent_category_from_string(j.at("category").get<std::string>());
}

void to_json(json & j, const Lane & l)
{
  j = {{"id", l.id}, {"centerline", l.centerline}, {"width", l.width}};
  if (l.speed_limit) {
    j["speed_limit"] = *l.speed_limit;
  }
}

void from_json(const json & j, Lane & l)
{
  l.id = j.at("id").get<std::string>();
  l.centerline = j.at("centerline").get<Polyline>();
  l.width = j.at("width").get<double>();
  l.speed_limit.reset();
  if (j.contains("speed_limit") && !j["speed_limit"].is_null()) {
    l.speed_limit = j["speed_limit"].get<double>();
  }
}

void to_json(json & j, const MapLayers & m)
{
  json lights = json::array();
  for (const auto & l : m.traffic_lights) {
    lights.push_back({{"lane_id", l.lane_id}, {"state", to_string(l.state)}});
  }
  j = {
    {"drivable_area", m.drivable_area},
    {"lanes", m.lanes},
    {"crosswalks", m.crosswalks},
    {"route_lane_ids", m.route_lane_ids},
    {"traffic_lights", std::move(lights)}};
}

void from_json(const json & j, MapLayers & m)
{
  m.drivable_area = j.value("drivable_area", std::vector<Polygon>{});
  m.lanes = j.value("lanes", std::vector<Lane>{});
  m.crosswalks = j.value("crosswalks", std::vector<Polygon>{});
  m.route_lane_ids = j.value("route_lane_ids", std::vector<std::string>{});
  m.traffic_lights.clear();
  for (const auto & l : j.value("traffic_lights", json::array())) {
    m.traffic_lights.push_back(
      {l.at("lane_id").get<std::string>(), light_state_from_string(l.at("state").get<std::string>())});
  }
}

void to_json(json & j, const EgoStatus & e)
{
  j = {
    {"velocity", e.velocity},
    {"acceleration", e.acceleration},
    {"driving_command", to_string(e.driving_command)}};
}

void from_json(const json & j, EgoStatus & e)
{
  e.velocity = j.at("velocity").get<double>();
  e.acceleration = j.at("acceleration").get<double>();
  e.driving_command = driving_command_from_string(j.at("driving_command").get<std::string>());
}

namespace
{

json optional_number(const std::optional<double> & v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json & j, const char * key)
{
  if (!j.contains(key) || j[key].is_null()) {
    return std::nullopt;
  }
  return j[key].get<double>();
}

}  // namespace

void to_json(json & j, const SubScores & s)
{
  j = {
    {"nc", s.nc},
    {"dac", s.dac},
    {"ddc", s.ddc},
    {"tlc", s.tlc},
    {"ttc", optional_number(s.ttc)},
    {"ep", optional_number(s.ep)},
    {"lk", optional_number(s.lk)},
    {"hc", optional_number(s.hc)},
    {"ec", optional_number(s.ec)},
    {"epdms", s.epdms}};
}

void from_json(const json & j, SubScores & s)
{
  s.nc = j.at("nc").get<double>();
  s.dac = j.at("dac").get<double>();
  s.ddc = j.at("ddc").get<double>();
  s.tlc = j.at("tlc").get<double>();
  s.ttc = read_optional(j, "ttc");
  s.ep = read_optional(j, "ep");
  s.lk = read_optional(j, "lk");
  s.hc = read_optional(j, "hc");
  s.ec = read_optional(j, "ec");
  s.epdms = j.at("epdms").get<double>();
}

json scene_to_json(const Scene & scene)
{
  json j = {
    {"schema", kSceneSchema},
    {"scene_id", scene.scene_id},
    {"ego_pose", scene.ego_pose},
    {"ego", scene.ego},
    {"ego_box_dims", {{"length", scene.ego_box_dims.length}, {"width", scene.ego_box_dims.width}}},
    {"agents", scene.agents},
    {"map", scene.map},
    {"human_trajectory", scene.human_trajectory}};
  if (scene.camera_refs) {
    j["camera_refs"] = *scene.camera_refs;
  }
  if (scene.previous_human_trajectory) {
    j["previous_human_trajectory"] = *scene.previous_human_trajectory;
  }
  return j;
}

Scene scene_from_json(const json & j)
{
  const auto schema = j.value("schema", std::string{});
  if (schema != kSceneSchema) {
    throw DataError(fmt::format("scene row: expected schema '{}', got '{}'", kSceneSchema, schema));
  }
  try {
    Scene s;
    s.scene_id = j.at("scene_id").get<std::string>();
    s.ego_pose = j.value("ego_pose", Pose2D{});
    s.ego = j.at("ego").get<EgoStatus>();
    if (j.contains("ego_box_dims")) {
      const auto & d = j["ego_box_dims"];
      s.ego_box_dims = {d.at("length").get<double>(), d.at("width").get<double>()};
    }
    s.agents = j.value("agents", std::vector<Agent>{});
    s.map = j.at("map").get<MapLayers>();
    s.human_trajectory = j.at("human_trajectory").get<Trajectory>();
    if (j.contains("camera_refs") && !j["camera_refs"].is_null()) {
      s.camera_refs = j["camera_refs"].get<std::vector<std::string>>();
    }
    if (j.contains("previous_human_trajectory") && !j["previous_human_trajectory"].is_null()) {
      s.previous_human_trajectory = j["previous_human_trajectory"].get<Trajectory>();
    }
    return s;
  } catch (const json::exception & e) {
    throw DataError(fmt::format("scene row: {}", e.what()));
  }
}

std::vector<json> parse_jsonl(const std::string & text)
{
  std::vector<json> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      rows.push_back(json::parse(line));
    } catch (const json::parse_error & e) {
      throw DataError(fmt::format("JSONL line {}: {}", line_no, e.what()));
    }
  }
  return rows;
}

std::string read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(fmt::format("cannot open '{}'", path.string()));
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path & path, const std::string & content)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    }
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::vector<Scene> read_scenes_jsonl(const std::filesystem::path & path)
{
  std::vector<Scene> scenes;
  for (const auto & row : parse_jsonl(read_file(path))) {
    scenes.push_back(scene_from_json(row));
  }
  return scenes;
}

void write_scenes_jsonl(const std::filesystem::path & path, const std::vector<Scene> & scenes)
{
  std::string out;
  for (const auto & s : scenes) {
    out += scene_to_json(s).dump();
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace critic_bench
