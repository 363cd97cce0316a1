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

#ifndef CRITIC_BENCH__JUDGE_VLM_HPP_
#define CRITIC_BENCH__JUDGE_VLM_HPP_

#include "critic_bench/judges.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace critic_bench
{

/// Chat-completion endpoint settings. The auth token is read from the
/// environment variable named by api_key_env at request time; no header is
/// sent when it is unset.
struct EndpointConfig
{
  std::string base_url{"http://127.0.0.1:8000"};
  std::string path{"/v1/chat/completions"};
  std::string model{"default"};
  std::string api_key_env{"CRITIC_BENCH_API_KEY"};
  double timeout_s{60.0};
  int max_retries{3};
  double backoff_initial_s{1.0};
  double backoff_factor{2.0};
  double temperature{0.0};
  int max_tokens{1024};
  std::size_t concurrency{4};
  /// Replaces the built-in prompt template when set.
  std::optional<std::filesystem::path> prompt_template;
  /// Base directory for relative camera image references.
  std::filesystem::path camera_root{"."};

  void validate() const;
};

void to_json(json & j, const EndpointConfig & c);
void from_json(const json & j, EndpointConfig & c);
EndpointConfig load_endpoint_config(const std::filesystem::path & path);

std::string base64_encode(std::string_view bytes);

/// Built-in prompt template text.
const char * default_prompt_template();

/// Substitutes {{ego_velocity}}, {{ego_acceleration}}, {{driving_command}},
/// {{ep_a}}, {{lk_a}}, {{ep_b}}, {{lk_b}}. ABSENT scores render as "n/a".
std::string render_prompt(const std::string & tmpl, const JudgeInput & input);

/// Request body: one user message whose content is the prompt text followed
/// by camera images (when the scene has them) and the A and B renders as
/// base64 data URLs. Throws PreconditionError without both renders.
json build_vlm_request(const JudgeInput & input, const EndpointConfig & config, const std::string & tmpl);

/// Assistant text of a chat-completion response (string content or the
/// concatenated text parts); empty when the shape does not match.
std::optional<std::string> extract_completion_text(const json & response);

/// Transport failures (no response, 429, 5xx) are retried with exponential
/// backoff; other HTTP errors fail immediately. Exhausted retries give a
/// transport_error verdict, an unparseable reply a format_violation verdict.
class VlmJudge : public Judge
{
public:
  explicit VlmJudge(EndpointConfig config);
  std::string name() const override { return "vlm:" + config_.model; }
  JudgeVerdict judge(const JudgeInput & input) const override;
  bool needs_renders() const override { return true; }
  std::size_t max_concurrency() const override { return config_.concurrency; }
  const EndpointConfig & config() const { return config_; }

private:
  EndpointConfig config_;
  std::string template_;
};

}  // namespace critic_bench

#endif  // CRITIC_BENCH__JUDGE_VLM_HPP_
