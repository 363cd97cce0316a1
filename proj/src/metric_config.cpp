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

#include "critic_bench/errors.hpp"
#include "critic_bench/metrics.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace critic_bench
{

namespace
{

std::string_view trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view key, std::string_view value)
{
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, value));
  }
  return out;
}

using Setter = std::function<void(MetricConfig &, std::string_view key, std::string_view value)>;

Setter number(double MetricConfig::*field)
{
  return [field](MetricConfig & c, std::string_view k, std::string_view v) {
    c.*field = parse_number(k, v);
  };
}

Setter comfort(double ComfortBounds::*field)
{
  return [field](MetricConfig & c, std::string_view k, std::string_view v) {
    c.comfort.*field = parse_number(k, v);
  };
}

Setter weight(AvgMetric m)
{
  return [m](MetricConfig & c, std::string_view k, std::string_view v) {
    c.weight(m) = parse_number(k, v);
  };
}

const std::map<std::string, Setter, std::less<>> & setters()
{
  static const std::map<std::string, Setter, std::less<>> table = {
    {"weights.ttc", weight(AvgMetric::kTtc)},
    {"weights.ep", weight(AvgMetric::kEp)},
    {"weights.lk", weight(AvgMetric::kLk)},
    {"weights.hc", weight(AvgMetric::kHc)},
    {"weights.ec", weight(AvgMetric::kEc)},
    {"lk_offset_threshold", number(&MetricConfig::lk_offset_threshold)},
    {"lk_duration_threshold", number(&MetricConfig::lk_duration_threshold)},
    {"ep_min_ref", number(&MetricConfig::ep_min_ref)},
    {"ttc_horizon", number(&MetricConfig::ttc_horizon)},
    {"ttc_threshold", number(&MetricConfig::ttc_threshold)},
    {"comfort.max_abs_accel", comfort(&ComfortBounds::max_abs_accel)},
    {"comfort.max_abs_jerk", comfort(&ComfortBounds::max_abs_jerk)},
    {"comfort.max_abs_yaw_rate", comfort(&ComfortBounds::max_abs_yaw_rate)},
    {"sim_step", number(&MetricConfig::sim_step)},
    {"default_speed_limit", number(&MetricConfig::default_speed_limit)},
    {"ref_accel", number(&MetricConfig::ref_accel)},
    {"ref_decel", number(&MetricConfig::ref_decel)},
    {"safety_gap", number(&MetricConfig::safety_gap)},
    {"ddc_short_distance", number(&MetricConfig::ddc_short_distance)},
    {"ec_frame_dt", number(&MetricConfig::ec_frame_dt)},
    {"ec_max_accel_delta", number(&MetricConfig::ec_max_accel_delta)},
    {"ec_max_yaw_rate_delta", number(&MetricConfig::ec_max_yaw_rate_delta)},
    {"target_speed",
     [](MetricConfig & c, std::string_view k, std::string_view v) {
       if (v == "none" || v.empty()) {
         c.target_speed.reset();
       } else {
         c.target_speed = parse_number(k, v);
       }
     }},
    {"disabled",
     [](MetricConfig & c, std::string_view, std::string_view v) {
       c.disabled.clear();
       std::size_t pos = 0;
       while (pos <= v.size()) {
         const auto comma = v.find(',', pos);
         const auto item = trim(v.substr(pos, comma == std::string_view::npos ? v.npos : comma - pos));
         if (!item.empty()) {
           c.disabled.insert(avg_metric_from_string(item));
         }
         if (comma == std::string_view::npos) {
           break;
         }
         pos = comma + 1;
       }
     }},
  };
  return table;
}

}  // namespace

MetricConfig parse_metric_config(std::string_view text)
{
  MetricConfig config;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("metric config line {}: expected 'key = value'", line_no));
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError(fmt::format("metric config line {}: unknown key '{}'", line_no, key));
    }
    it->second(config, key, value);
  }
  config.validate();
  return config;
}

MetricConfig load_metric_config(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot open metric config '{}'", path.string()));
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_metric_config(buf.str());
}

std::string format_metric_config(const MetricConfig & c)
{
  std::string out;
  for (const auto m : kAvgMetrics) {
    out += fmt::format("weights.{} = {}\n", to_string(m), c.weight(m));
  }
  out += fmt::format("lk_offset_threshold = {}\n", c.lk_offset_threshold);
  out += fmt::format("lk_duration_threshold = {}\n", c.lk_duration_threshold);
  out += fmt::format("ep_min_ref = {}\n", c.ep_min_ref);
  out += fmt::format("ttc_horizon = {}\n", c.ttc_horizon);
  out += fmt::format("ttc_threshold = {}\n", c.ttc_threshold);
  out += fmt::format("comfort.max_abs_accel = {}\n", c.comfort.max_abs_accel);
  out += fmt::format("comfort.max_abs_jerk = {}\n", c.comfort.max_abs_jerk);
  out += fmt::format("comfort.max_abs_yaw_rate = {}\n", c.comfort.max_abs_yaw_rate);
  out += fmt::format("sim_step = {}\n", c.sim_step);
  out += fmt::format("target_speed = {}\n", c.target_speed ? fmt::format("{}", *c.target_speed) : "none");
  out += fmt::format("default_speed_limit = {}\n", c.default_speed_limit);
  out += fmt::format("ref_accel = {}\n", c.ref_accel);
  out += fmt::format("ref_decel = {}\n", c.ref_decel);
  out += fmt::format("safety_gap = {}\n", c.safety_gap);
  out += fmt::format("ddc_short_distance = {}\n", c.ddc_short_distance);
  out += fmt::format("ec_frame_dt = {}\n", c.ec_frame_dt);
  out += fmt::format("ec_max_accel_delta = {}\n", c.ec_max_accel_delta);
  out += fmt::format("ec_max_yaw_rate_delta = {}\n", c.ec_max_yaw_rate_delta);
  std::string disabled;
  for (const auto m : c.disabled) {
    disabled += disabled.empty() ? "" : ",";
    disabled += to_string(m);
  }
  out += fmt::format("disabled = {}\n", disabled);
  return out;
}

}  // namespace critic_bench
