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
#include "critic_bench/judge_vlm.hpp"
#include "stub_chat_server.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace cb = critic_bench;
using test_support::StubChatServer;
using test_support::StubReply;

namespace
{

struct Fixture
{
  cb::Scene scene = test_support::straight_road();
  cb::JudgeInput input;

  Fixture()
  {
    input.pair_id = "road:case1";
    input.scene_id = scene.scene_id;
    input.scene = &scene;
    input.a.trajectory = test_support::straight(10);
    input.a.sub_scores.ep = 0.9;
    input.a.sub_scores.lk = 0.0;
    input.b.trajectory = test_support::straight(8);
    input.b.sub_scores.ep = 0.65;
    input.b.sub_scores.lk = 1.0;
    input.bev_a = std::string("PNG-A");
    input.bev_b = std::string("PNG-B");
  }
};

cb::EndpointConfig config_for(const StubChatServer & server)
{
  cb::EndpointConfig c;
  c.base_url = server.base_url();
  c.model = "stub-model";
  c.api_key_env = "CRITIC_BENCH_TEST_TOKEN";
  c.timeout_s = 0.3;
  c.max_retries = 3;
  c.backoff_initial_s = 0.01;
  c.concurrency = 2;
  return c;
}

}  // namespace

TEST(Base64, KnownVectors)
{
  EXPECT_EQ(cb::base64_encode(""), "");
  EXPECT_EQ(cb::base64_encode("f"), "Zg==");
  EXPECT_EQ(cb::base64_encode("fo"), "Zm8=");
  EXPECT_EQ(cb::base64_encode("foo"), "Zm9v");
  EXPECT_EQ(cb::base64_encode("foobar"), "Zm9vYmFy");
  EXPECT_EQ(cb::base64_encode(std::string("\x00\xff", 2)), "AP8=");
}

TEST(VlmPrompt, CarriesInputsAndContract)
{
  Fixture f;
  const std::string prompt = cb::render_prompt(cb::default_prompt_template(), f.input);
  EXPECT_NE(prompt.find("expert driving evaluator"), std::string::npos);
  EXPECT_NE(prompt.find("with emphasis on EP and LK given current context"), std::string::npos);
  EXPECT_NE(prompt.find("Ego Progress (EP) = 0.90, Lane Keeping (LK) = 0.00"), std::string::npos);
  EXPECT_NE(prompt.find("Ego Progress (EP) = 0.65, Lane Keeping (LK) = 1.00"), std::string::npos);
  EXPECT_NE(prompt.find("speed 10.00 m/s"), std::string::npos);
  EXPECT_NE(prompt.find("driving command straight"), std::string::npos);
  EXPECT_NE(prompt.find("<think></think>"), std::string::npos);
  EXPECT_NE(prompt.find("Decision: A"), std::string::npos);
  EXPECT_EQ(prompt.find("{{"), std::string::npos);
}

TEST(VlmPrompt, AbsentScoresRenderAsNa)
{
  Fixture f;
  f.input.b.sub_scores.ep.reset();
  EXPECT_NE(cb::render_prompt("{{ep_b}}/{{lk_b}}", f.input).find("n/a/1.00"), std::string::npos);
}

TEST(VlmRequest, ShapeAndImages)
{
  Fixture f;
  cb::EndpointConfig c;
  c.model = "m";
  const auto req = cb::build_vlm_request(f.input, c, "T");
  EXPECT_EQ(req["model"], "m");
  const auto & content = req["messages"][0]["content"];
  EXPECT_EQ(req["messages"][0]["role"], "user");
  ASSERT_EQ(content.size(), 3u);
  EXPECT_EQ(content[0]["text"], "T");
  EXPECT_EQ(content[1]["image_url"]["url"], "data:image/png;base64," + cb::base64_encode("PNG-A"));
  EXPECT_EQ(content[2]["image_url"]["url"], "data:image/png;base64," + cb::base64_encode("PNG-B"));

  f.input.bev_b.reset();
  EXPECT_THROW(cb::build_vlm_request(f.input, c, "T"), cb::PreconditionError);
}

TEST(VlmRequest, CameraImagesPrecedeRenders)
{
  Fixture f;
  const auto dir = std::filesystem::temp_directory_path() / "critic_bench_cam_test";
  std::filesystem::create_directories(dir);
  for (const char * name : {"l.jpg", "f.jpg", "r.jpg"}) {
    std::ofstream(dir / name) << name;
  }
  f.scene.camera_refs = std::vector<std::string>{"l.jpg", "f.jpg", "r.jpg"};
  cb::EndpointConfig c;
  c.camera_root = dir;
  const auto content = cb::build_vlm_request(f.input, c, "T")["messages"][0]["content"];
  ASSERT_EQ(content.size(), 6u);
  EXPECT_EQ(content[1]["image_url"]["url"], "data:image/jpeg;base64," + cb::base64_encode("l.jpg"));
  EXPECT_EQ(content[4]["image_url"]["url"], "data:image/png;base64," + cb::base64_encode("PNG-A"));
  f.scene.camera_refs = std::vector<std::string>{"missing.jpg"};
  EXPECT_THROW(cb::build_vlm_request(f.input, c, "T"), cb::DataError);
  std::filesystem::remove_all(dir);
}

TEST(VlmJudge, WellFormedReply)
{
  StubChatServer server({{.content = "<think>reason</think>\nDecision: A"}});
  ::setenv("CRITIC_BENCH_TEST_TOKEN", "secret", 1);
  Fixture f;
  const cb::VlmJudge judge(config_for(server));
  const auto v = judge.judge(f.input);
  ::unsetenv("CRITIC_BENCH_TEST_TOKEN");
  EXPECT_EQ(v.parse_status, cb::ParseStatus::kOk);
  EXPECT_EQ(v.choice, cb::Slot::kA);
  EXPECT_EQ(v.reasoning_text, "reason");
  EXPECT_EQ(v.raw_response, "<think>reason</think>\nDecision: A");
  EXPECT_EQ(v.retries, 0);
  ASSERT_EQ(server.requests().size(), 1u);
  EXPECT_EQ(server.auth_headers()[0], "Bearer secret");
  const auto body = cb::json::parse(server.requests()[0]);
  EXPECT_EQ(body["model"], "stub-model");
  EXPECT_EQ(body["messages"][0]["content"].size(), 3u);
}

TEST(VlmJudge, FreeTextIsFormatViolation)
{
  StubChatServer server({{.content = "I would pick the first one."}});
  Fixture f;
  const auto v = cb::VlmJudge(config_for(server)).judge(f.input);
  EXPECT_EQ(v.parse_status, cb::ParseStatus::kFormatViolation);
  EXPECT_FALSE(v.choice.has_value());
  EXPECT_EQ(v.raw_response, "I would pick the first one.");
  EXPECT_EQ(server.auth_headers()[0], "");
}

TEST(VlmJudge, RecoveredDecisionStillFormatViolation)
{
  StubChatServer server({{.content = "Decision: B"}});
  Fixture f;
  const auto v = cb::VlmJudge(config_for(server)).judge(f.input);
  EXPECT_EQ(v.parse_status, cb::ParseStatus::kFormatViolation);
  EXPECT_FALSE(v.choice.has_value());
}

TEST(VlmJudge, NonChatBodyIsFormatViolation)
{
  StubChatServer server({{.raw_body = "{\"unexpected\": true}"}, {.raw_body = "not json"}});
  Fixture f;
  const cb::VlmJudge judge(config_for(server));
  EXPECT_EQ(judge.judge(f.input).parse_status, cb::ParseStatus::kFormatViolation);
  EXPECT_EQ(judge.judge(f.input).parse_status, cb::ParseStatus::kFormatViolation);
}

TEST(VlmJudge, TimeoutsAreRetried)
{
  StubChatServer server(
    {{.content = "<think>slow</think>\nDecision: B", .delay_s = 1.0},
     {.content = "<think>slow</think>\nDecision: B", .delay_s = 1.0},
     {.content = "<think>ok</think>\nDecision: B"}});
  Fixture f;
  const auto v = cb::VlmJudge(config_for(server)).judge(f.input);
  EXPECT_EQ(v.parse_status, cb::ParseStatus::kOk);
  EXPECT_EQ(v.choice, cb::Slot::kB);
  EXPECT_EQ(v.retries, 2);
  EXPECT_EQ(v.reasoning_text, "ok");
}

TEST(VlmJudge, ServerErrorsExhaustRetries)
{
  StubChatServer server({}, {.status = 503, .raw_body = "{}"});
  Fixture f;
  const auto v = cb::VlmJudge(config_for(server)).judge(f.input);
  EXPECT_EQ(v.parse_status, cb::ParseStatus::kTransportError);
  EXPECT_FALSE(v.choice.has_value());
  EXPECT_EQ(v.retries, 3);
  EXPECT_EQ(server.requests().size(), 4u);
}

TEST(VlmJudge, ClientErrorIsNotRetried)
{
  StubChatServer server({}, {.status = 401, .raw_body = "{\"error\":\"auth\"}"});
  Fixture f;
  const auto v = cb::VlmJudge(config_for(server)).judge(f.input);
  EXPECT_EQ(v.parse_status, cb::ParseStatus::kTransportError);
  EXPECT_EQ(v.retries, 0);
  EXPECT_EQ(server.requests().size(), 1u);
}

TEST(VlmJudge, UnreachableEndpoint)
{
  cb::EndpointConfig c;
  c.base_url = "http://127.0.0.1:1";
  c.max_retries = 1;
  c.backoff_initial_s = 0.0;
  c.timeout_s = 0.2;
  Fixture f;
  const auto v = cb::VlmJudge(c).judge(f.input);
  EXPECT_EQ(v.parse_status, cb::ParseStatus::kTransportError);
  EXPECT_EQ(v.retries, 1);
}

TEST(EndpointConfig, JsonRoundTripAndValidation)
{
  cb::EndpointConfig c;
  c.model = "x";
  c.max_retries = 5;
  const auto back = cb::json(c).get<cb::EndpointConfig>();
  EXPECT_EQ(back.model, "x");
  EXPECT_EQ(back.max_retries, 5);
  EXPECT_THROW(cb::json({{"modle", "x"}}).get<cb::EndpointConfig>(), cb::ConfigError);
  EXPECT_THROW(cb::json({{"timeout_s", 0}}).get<cb::EndpointConfig>(), cb::ConfigError);
  EXPECT_THROW(cb::json({{"max_retries", "3"}}).get<cb::EndpointConfig>(), cb::ConfigError);
  EXPECT_THROW(cb::json({{"concurrency", 0}}).get<cb::EndpointConfig>(), cb::ConfigError);
}
