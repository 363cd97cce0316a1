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

#include "critic_bench/judge_vlm.hpp"

#include "critic_bench/errors.hpp"
#include "critic_bench/prompt_template.hpp"
#include "critic_bench/response_reward.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <set>
#include <thread>

namespace critic_bench
{

void EndpointConfig::validate() const
{
  if (base_url.empty()) {
    throw ConfigError("endpoint: base_url is empty");
  }
  if (path.empty() || path.front() != '/') {
    throw ConfigError("endpoint: path must start with '/'");
  }
  if (!(timeout_s > 0.0)) {
    throw ConfigError("endpoint: timeout_s must be positive");
  }
  if (max_retries < 0) {
    throw ConfigError("endpoint: max_retries must be nonnegative");
  }
  if (!(backoff_initial_s >= 0.0) || !(backoff_factor >= 1.0)) {
    throw ConfigError("endpoint: backoff_initial_s must be >= 0 and backoff_factor >= 1");
  }
  if (max_tokens <= 0) {
    throw ConfigError("endpoint: max_tokens must be positive");
  }
  if (concurrency == 0) {
    throw ConfigError("endpoint: concurrency must be positive");
  }
}

void to_json(json & j, const EndpointConfig & c)
{
  j = {
    {"base_url", c.base_url},
    {"path", c.path},
    {"model", c.model},
    {"api_key_env", c.api_key_env},
    {"timeout_s", c.timeout_s},
    {"max_retries", c.max_retries},
    {"backoff_initial_s", c.backoff_initial_s},
    {"backoff_factor", c.backoff_factor},
    {"temperature", c.temperature},
    {"max_tokens", c.max_tokens},
    {"concurrency", c.concurrency},
    {"prompt_template", c.prompt_template ? json(c.prompt_template->string()) : json(nullptr)},
    {"camera_root", c.camera_root.string()},
  };
}

void from_json(const json & j, EndpointConfig & c)
{
  static const std::set<std::string> known = {
    "base_url", "path", "model", "api_key_env", "timeout_s", "max_retries", "backoff_initial_s",
    "backoff_factor", "temperature", "max_tokens", "concurrency", "prompt_template", "camera_root"};
  if (!j.is_object()) {
    throw ConfigError("endpoint config must be a JSON object");
  }
  for (const auto & [key, _] : j.items()) {
    if (!known.count(key)) {
      throw ConfigError(fmt::format("endpoint config: unknown key '{}'", key));
    }
  }
  c = EndpointConfig{};
  try {
    c.base_url = j.value("base_url", c.base_url);
    c.path = j.value("path", c.path);
    c.model = j.value("model", c.model);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.timeout_s = j.value("timeout_s", c.timeout_s);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.backoff_initial_s = j.value("backoff_initial_s", c.backoff_initial_s);
    c.backoff_factor = j.value("backoff_factor", c.backoff_factor);
    c.temperature = j.value("temperature", c.temperature);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.concurrency = j.value("concurrency", c.concurrency);
    if (j.contains("prompt_template") && !j.at("prompt_template").is_null()) {
      c.prompt_template = j.at("prompt_template").get<std::string>();
    }
    c.camera_root = j.value("camera_root", std::string("."));
  } catch (const json::exception & e) {
    throw ConfigError(fmt::format("endpoint config: {}", e.what()));
  }
  c.validate();
}

EndpointConfig load_endpoint_config(const std::filesystem::path & path)
{
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception & e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  auto c = j.get<EndpointConfig>();
  const auto dir = path.parent_path();
  if (c.prompt_template && c.prompt_template->is_relative()) {
    c.prompt_template = dir / *c.prompt_template;
  }
  if (c.camera_root.is_relative()) {
    c.camera_root = dir / c.camera_root;
  }
  return c;
}

std::string base64_encode(std::string_view bytes)
{
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(
    reinterpret_cast<unsigned char *>(out.data()), reinterpret_cast<const unsigned char *>(bytes.data()),
    static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

const char * default_prompt_template() { return kPairwiseJudgePrompt; }

namespace
{

std::string score_text(const std::optional<double> & v)
{
  return v ? fmt::format("{:.2f}", *v) : std::string("n/a");
}

void replace_all(std::string & s, std::string_view key, const std::string & value)
{
  for (std::size_t pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size())) {
    s.replace(pos, key.size(), value);
  }
}

std::string image_part_url(const std::string & mime, std::string_view bytes)
{
  return fmt::format("data:{};base64,{}", mime, base64_encode(bytes));
}

std::string mime_for(const std::filesystem::path & p)
{
  auto ext = p.extension().string();
  for (auto & c : ext) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (ext == ".jpg" || ext == ".jpeg") {
    return "image/jpeg";
  }
  if (ext == ".webp") {
    return "image/webp";
  }
  return "image/png";
}

json image_part(const std::string & url)
{
  return {{"type", "image_url"}, {"image_url", {{"url", url}}}};
}

}  // namespace

std::string render_prompt(const std::string & tmpl, const JudgeInput & input)
{
  if (input.scene == nullptr) {
    throw PreconditionError("render_prompt: judge input has no scene");
  }
  const auto & ego = input.scene->ego;
  const auto [ep_a, lk_a] = input.ep_lk(Slot::kA);
  const auto [ep_b, lk_b] = input.ep_lk(Slot::kB);
  std::string s = tmpl;
  replace_all(s, "{{ego_velocity}}", fmt::format("{:.2f}", ego.velocity));
  replace_all(s, "{{ego_acceleration}}", fmt::format("{:.2f}", ego.acceleration));
  replace_all(s, "{{driving_command}}", std::string(to_string(ego.driving_command)));
  replace_all(s, "{{ep_a}}", score_text(ep_a));
  replace_all(s, "{{lk_a}}", score_text(lk_a));
  replace_all(s, "{{ep_b}}", score_text(ep_b));
  replace_all(s, "{{lk_b}}", score_text(lk_b));
  return s;
}

json build_vlm_request(const JudgeInput & input, const EndpointConfig & config, const std::string & tmpl)
{
  if (!input.bev_a || !input.bev_b) {
    throw PreconditionError(fmt::format("pair {}: BEV renders are required", input.pair_id));
  }
  json content = json::array();
  content.push_back({{"type", "text"}, {"text", render_prompt(tmpl, input)}});
  if (input.scene->camera_refs) {
    for (const auto & ref : *input.scene->camera_refs) {
      std::filesystem::path p(ref);
      if (p.is_relative()) {
        p = config.camera_root / p;
      }
      std::string bytes;
      try {
        bytes = read_file(p);
      } catch (const ConfigError &) {
        throw DataError(fmt::format("scene {}: camera image {} not readable", input.scene_id, p.string()));
      }
      content.push_back(image_part(image_part_url(mime_for(p), bytes)));
    }
  }
  content.push_back(image_part(image_part_url("image/png", *input.bev_a)));
  content.push_back(image_part(image_part_url("image/png", *input.bev_b)));
  return {
    {"model", config.model},
    {"temperature", config.temperature},
    {"max_tokens", config.max_tokens},
    {"messages", json::array({{{"role", "user"}, {"content", content}}})},
  };
}

std::optional<std::string> extract_completion_text(const json & response)
{
  if (!response.is_object() || !response.contains("choices") || !response["choices"].is_array() ||
      response["choices"].empty()) {
    return std::nullopt;
  }
  const auto & choice = response["choices"][0];
  if (!choice.is_object() || !choice.contains("message") || !choice["message"].is_object()) {
    return std::nullopt;
  }
  const auto & content = choice["message"].value("content", json(nullptr));
  if (content.is_string()) {
    return content.get<std::string>();
  }
  if (content.is_array()) {
    std::string text;
    for (const auto & part : content) {
      if (part.is_object() && part.value("type", "") == "text" && part.contains("text") &&
          part["text"].is_string()) {
        text += part["text"].get<std::string>();
      }
    }
    return text;
  }
  return std::nullopt;
}

VlmJudge::VlmJudge(EndpointConfig config) : config_(std::move(config))
{
  config_.validate();
  template_ = config_.prompt_template ? read_file(*config_.prompt_template) : default_prompt_template();
}

JudgeVerdict VlmJudge::judge(const JudgeInput & input) const
{
  const std::string body = build_vlm_request(input, config_, template_).dump();
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char * token = std::getenv(config_.api_key_env.c_str()); token && *token) {
      headers.emplace("Authorization", fmt::format("Bearer {}", token));
    }
  }
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
    std::chrono::duration<double>(config_.timeout_s));

  JudgeVerdict v;
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double wait = config_.backoff_initial_s * std::pow(config_.backoff_factor, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration<double>(wait));
      v.retries = attempt;
    }
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    const auto res = client.Post(config_.path, headers, body, "application/json");
    if (!res) {
      last_error = fmt::format("request failed: {}", httplib::to_string(res.error()));
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = fmt::format("HTTP {}", res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      v.parse_status = ParseStatus::kTransportError;
      v.error = fmt::format("HTTP {}: {}", res->status, res->body.substr(0, 200));
      return v;
    }
    v.raw_response = res->body;
    const auto parsed_json = json::parse(res->body, nullptr, false);
    const auto text = parsed_json.is_discarded() ? std::nullopt : extract_completion_text(parsed_json);
    if (!text) {
      v.parse_status = ParseStatus::kFormatViolation;
      v.error = "response is not a chat completion";
      return v;
    }
    v.raw_response = *text;
    const auto parsed = parse_response(*text);
    v.reasoning_text = parsed.think_block;
    if (parsed.well_formed) {
      v.choice = parsed.decision;
      v.parse_status = ParseStatus::kOk;
    } else {
      v.parse_status = ParseStatus::kFormatViolation;
      v.error = "response violates the think-then-decision format";
    }
    return v;
  }
  v.parse_status = ParseStatus::kTransportError;
  v.error = fmt::format("{} after {} retries", last_error, config_.max_retries);
  return v;
}

}  // namespace critic_bench
