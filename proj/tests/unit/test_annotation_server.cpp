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

#include "critic_bench/annotation_server.hpp"
#include "critic_bench/errors.hpp"
#include "critic_bench/scene_io.hpp"
#include "pair_factory.hpp"
#include "temp_dir.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <mutex>
#include <set>
#include <thread>

namespace cb = critic_bench;

namespace
{

const std::set<std::string> kForbiddenKeys{
  "human_slot", "label", "label_source", "kind", "vocab_index", "pair_case", "case", "rng_seed",
  "epdms", "nc", "dac", "ddc", "tlc", "ttc", "hc", "ec"};

// Every key below the top level must avoid ground-truth and non-EP/LK fields.
void expect_blind(const cb::json & j, const std::string & path)
{
  if (j.is_object()) {
    for (const auto & [k, v] : j.items()) {
      EXPECT_FALSE(kForbiddenKeys.count(k)) << path << "." << k;
      expect_blind(v, path + "." + k);
    }
  } else if (j.is_array()) {
    for (const auto & v : j) {
      expect_blind(v, path + "[]");
    }
  }
}

std::set<std::string> keys(const cb::json & j)
{
  std::set<std::string> out;
  for (const auto & [k, _] : j.items()) {
    out.insert(k);
  }
  return out;
}

struct Fixture
{
  explicit Fixture(int n_test = 5, cb::ServerOptions opts = {}, const test_support::TempDir * dir_override = nullptr)
  : dir_ref(dir_override ? *dir_override : own_dir),
    pairs(make_pairs(n_test)),
    store(pairs, {dir_ref.path(), {}}),
    server(store, scenes, opts)
  {
    port = server.start("127.0.0.1", 0);
  }

  static std::map<cb::Split, std::vector<cb::PreferencePair>> make_pairs(int n)
  {
    auto test = test_support::road_pairs(n);
    for (auto & p : test) {
      p.slot_a.sub_scores.nc = 1.0;
      p.slot_b.sub_scores.ttc = 0.0;
    }
    auto train = std::vector<cb::PreferencePair>{test_support::road_pair(50, cb::Slot::kA)};
    train[0].label = cb::Label::kA;
    train[0].label_source = cb::LabelSource::kPseudoCase1;
    return {{cb::Split::kTest, test}, {cb::Split::kTrain, train}};
  }

  httplib::Client client() const
  {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(10, 0);
    return c;
  }

  std::string open_session(const std::string & annotator = "ann-1", const std::string & split = "test")
  {
    auto res = client().Post("/sessions", cb::json({{"annotator_id", annotator}, {"split", split}}).dump(),
                             "application/json");
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 201);
    return cb::json::parse(res->body).at("session_id").get<std::string>();
  }

  cb::json next(const std::string & sid)
  {
    auto res = client().Get(("/sessions/" + sid + "/next").c_str());
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    return cb::json::parse(res->body);
  }

  httplib::Result label(const std::string & sid, const std::string & pair_id, const std::string & label)
  {
    return client().Post(("/sessions/" + sid + "/labels").c_str(),
                         cb::json({{"pair_id", pair_id}, {"label", label}}).dump(), "application/json");
  }

  test_support::TempDir own_dir;
  const test_support::TempDir & dir_ref;
  std::map<std::string, cb::Scene> scenes{{"road", test_support::straight_road()}};
  std::map<cb::Split, std::vector<cb::PreferencePair>> pairs;
  cb::AnnotationStore store;
  cb::AnnotationServer server;
  int port{0};
};

}  // namespace

TEST(AnnotationServer, HealthAndGuideline)
{
  test_support::TempDir dir;
  const auto guideline = dir.path() / "guideline.md";
  cb::write_file(guideline, "# Guideline\n");
  cb::ServerOptions opts;
  opts.guideline_path = guideline;
  opts.guideline_version = "g-test";
  Fixture f(1, opts);
  auto health = f.client().Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(cb::json::parse(health->body).at("status"), "ok");
  EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"), "*");
  auto g = f.client().Get("/guideline");
  ASSERT_TRUE(g);
  const auto body = cb::json::parse(g->body);
  EXPECT_EQ(body.at("version"), "g-test");
  EXPECT_EQ(body.at("text"), "# Guideline\n");
  // New sessions default to the server's guideline version.
  const auto sid = f.open_session();
  EXPECT_EQ(f.store.session(sid).guideline_version, "g-test");
}

TEST(AnnotationServer, QueueOfThreeThenEndOfQueue)
{
  Fixture f(3);
  const auto sid = f.open_session();
  std::set<std::string> seen;
  for (int i = 0; i < 3; ++i) {
    const auto p = f.next(sid);
    ASSERT_EQ(p.at("kind"), "pair");
    EXPECT_EQ(p.at("position"), i + 1);
    EXPECT_EQ(p.at("total"), 3);
    seen.insert(p.at("pair_id").get<std::string>());
    auto res = f.label(sid, p.at("pair_id"), "A");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 201);
  }
  EXPECT_EQ(seen.size(), 3u);
  const auto end = f.next(sid);
  EXPECT_EQ(end.at("kind"), "end_of_queue");
  EXPECT_EQ(end.at("served"), 3);
}

TEST(AnnotationServer, PayloadIsBlind)
{
  Fixture f(4);
  const auto sid = f.open_session();
  for (int i = 0; i < 4; ++i) {
    const auto p = f.next(sid);
    EXPECT_EQ(p.at("schema"), "critic-bench/api/v1");
    EXPECT_EQ(keys(p), (std::set<std::string>{"schema", "kind", "session_id", "pair_id", "scene_id", "position",
                                              "total", "ego_status", "camera_refs", "slots"}));
    EXPECT_EQ(keys(p.at("slots")), (std::set<std::string>{"A", "B"}));
    for (const auto * s : {"A", "B"}) {
      const auto & slot = p.at("slots").at(s);
      EXPECT_EQ(keys(slot), (std::set<std::string>{"trajectory", "sub_scores", "render_url"}));
      EXPECT_EQ(keys(slot.at("sub_scores")), (std::set<std::string>{"ep", "lk"}));
    }
    EXPECT_EQ(keys(p.at("ego_status")), (std::set<std::string>{"velocity", "acceleration", "driving_command"}));
    for (const auto & [k, v] : p.items()) {
      if (k != "kind") {
        expect_blind(v, k);
      }
    }
    const auto & pair = f.pairs.at(cb::Split::kTest)[static_cast<std::size_t>(i)];
    EXPECT_EQ(p.at("slots").at("A").at("sub_scores").at("ep"), *pair.slot_a.sub_scores.ep);
    EXPECT_EQ(p.at("slots").at("B").at("trajectory"), cb::json(pair.slot_b.trajectory));
    f.label(sid, pair.pair_id, "B");
  }
}

TEST(AnnotationServer, LabelErrorsAndRevisions)
{
  Fixture f(3);
  const auto sid = f.open_session();
  const auto p = f.next(sid).at("pair_id").get<std::string>();
  auto r1 = f.label(sid, p, "A");
  ASSERT_TRUE(r1);
  EXPECT_EQ(r1->status, 201);
  auto b1 = cb::json::parse(r1->body);
  EXPECT_EQ(b1.at("revision"), 1);
  EXPECT_EQ(b1.at("kind"), "label_record");
  auto dup = f.label(sid, p, "A");
  EXPECT_EQ(dup->status, 200);
  EXPECT_EQ(cb::json::parse(dup->body).at("created"), false);
  auto r2 = f.label(sid, p, "discarded");
  EXPECT_EQ(r2->status, 201);
  EXPECT_EQ(cb::json::parse(r2->body).at("revision"), 2);

  EXPECT_EQ(f.label(sid, "road:42", "A")->status, 404);
  EXPECT_EQ(f.label(sid, "road:2", "A")->status, 403);
  EXPECT_EQ(f.label(sid, p, "maybe")->status, 400);
  EXPECT_EQ(f.label("s999999", p, "A")->status, 404);
  auto bad = f.client().Post(("/sessions/" + sid + "/labels").c_str(), "not json", "application/json");
  EXPECT_EQ(bad->status, 400);
  const auto err = cb::json::parse(bad->body);
  EXPECT_EQ(err.at("kind"), "error");
  EXPECT_EQ(err.at("error"), "bad_request");

  httplib::Headers other{{cb::kAnnotatorHeader, "ann-2"}};
  auto c = f.client();
  EXPECT_EQ(c.Get(("/sessions/" + sid + "/next").c_str(), other)->status, 403);
  httplib::Headers same{{cb::kAnnotatorHeader, "ann-1"}};
  EXPECT_EQ(c.Get(("/sessions/" + sid + "/next").c_str(), same)->status, 200);
  EXPECT_EQ(c.Get("/sessions/s999999/next")->status, 404);
  EXPECT_EQ(c.Post("/sessions", R"({"annotator_id":"x","split":"val"})", "application/json")->status, 400);
  EXPECT_EQ(c.Post("/sessions", R"({"split":"test"})", "application/json")->status, 400);
  auto via_header = c.Post("/sessions", same, R"({"split":"test"})", "application/json");
  EXPECT_EQ(via_header->status, 201);
  EXPECT_EQ(cb::json::parse(via_header->body).at("annotator_id"), "ann-1");

  auto closed = c.Post(("/sessions/" + sid + "/close").c_str(), "", "application/json");
  EXPECT_EQ(closed->status, 200);
  EXPECT_EQ(cb::json::parse(closed->body).at("active"), false);
  EXPECT_EQ(c.Get(("/sessions/" + sid + "/next").c_str())->status, 403);
}

TEST(AnnotationServer, RoundTripExportHasLatestRevisions)
{
  Fixture f(5);
  const auto sid = f.open_session();
  const std::vector<std::string> choices{"A", "B", "A", "discarded", "B"};
  std::vector<std::string> ids;
  for (const auto & c : choices) {
    const auto id = f.next(sid).at("pair_id").get<std::string>();
    ids.push_back(id);
    ASSERT_EQ(f.label(sid, id, c)->status, 201);
  }
  ASSERT_EQ(f.label(sid, ids[1], "A")->status, 201);
  EXPECT_EQ(f.next(sid).at("kind"), "end_of_queue");

  auto res = f.client().Get("/export?split=test");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const auto exported = cb::parse_export(res->body);
  EXPECT_EQ(exported.header.labeled, 4u);
  EXPECT_EQ(exported.header.discarded, 1u);
  EXPECT_EQ(exported.header.unlabeled, 0u);
  const std::vector<cb::Label> expected{cb::Label::kA, cb::Label::kA, cb::Label::kA, cb::Label::kDiscarded,
                                        cb::Label::kB};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(exported.pairs[i].pair_id, ids[i]);
    EXPECT_EQ(exported.pairs[i].label, expected[i]) << i;
  }
  EXPECT_EQ(f.client().Get("/export?split=bogus")->status, 400);
  const auto train = cb::parse_export(f.client().Get("/export?split=train")->body);
  ASSERT_EQ(train.pairs.size(), 1u);
  EXPECT_EQ(train.pairs[0].label_source, cb::LabelSource::kPseudoCase1);
}

TEST(AnnotationServer, PseudoLabeledPairsAreNotServed)
{
  Fixture f(1);
  const auto sid = f.open_session("ann-1", "train");
  EXPECT_EQ(f.next(sid).at("kind"), "end_of_queue");
}

TEST(AnnotationServer, RenderEndpointServesSlotPng)
{
  Fixture f(2);
  const auto & pair = f.pairs.at(cb::Split::kTest)[1];
  auto res = f.client().Get("/pairs/road:1/render/B");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "image/png");
  EXPECT_EQ(res->body, cb::render_bev(f.scenes.at("road"), pair.slot_b.trajectory));
  EXPECT_EQ(f.client().Get("/pairs/road:1/render/B")->body, res->body);
  EXPECT_EQ(f.client().Get("/pairs/road:1/render/C")->status, 404);
  EXPECT_EQ(f.client().Get("/pairs/road:9/render/A")->status, 404);
}

TEST(AnnotationServer, FlipModeSwapsPresentationAndMapsLabelsBack)
{
  cb::ServerOptions opts;
  opts.flip = true;
  Fixture f(2, opts);
  const auto & pair = f.pairs.at(cb::Split::kTest)[0];
  const auto sid = f.open_session();
  const auto p = f.next(sid);
  EXPECT_EQ(p.at("slots").at("A").at("trajectory"), cb::json(pair.slot_b.trajectory));
  EXPECT_EQ(p.at("slots").at("B").at("trajectory"), cb::json(pair.slot_a.trajectory));
  EXPECT_EQ(f.client().Get("/pairs/road:0/render/A")->body,
            cb::render_bev(f.scenes.at("road"), pair.slot_b.trajectory));
  auto res = f.label(sid, "road:0", "A");
  EXPECT_EQ(cb::json::parse(res->body).at("label"), "A");
  EXPECT_EQ(f.store.history("road:0").back().label, cb::Label::kB);
}

TEST(AnnotationServer, RestartMidSessionLosesNoCommittedLabel)
{
  test_support::TempDir dir;
  std::string sid;
  std::string outstanding;
  {
    Fixture f(4, {}, &dir);
    sid = f.open_session();
    for (const auto * l : {"A", "discarded"}) {
      f.label(sid, f.next(sid).at("pair_id"), l);
    }
    f.label(sid, "road:0", "B");
    outstanding = f.next(sid).at("pair_id").get<std::string>();
  }
  Fixture f(4, {}, &dir);
  EXPECT_EQ(f.store.history("road:0").size(), 2u);
  EXPECT_EQ(f.store.history("road:0").back().label, cb::Label::kB);
  EXPECT_EQ(f.store.history("road:1").back().label, cb::Label::kDiscarded);
  const auto p = f.next(sid);
  EXPECT_EQ(p.at("pair_id"), outstanding);
  EXPECT_EQ(p.at("position"), 3);
  EXPECT_EQ(cb::json::parse(f.label(sid, "road:0", "A")->body).at("revision"), 3);
}

TEST(AnnotationServer, ConcurrentSessionsGetDisjointPairs)
{
  constexpr int kPairs = 24;
  constexpr int kSessions = 4;
  Fixture f(kPairs);
  std::vector<std::string> sids;
  for (int i = 0; i < kSessions; ++i) {
    sids.push_back(f.open_session("ann-" + std::to_string(i)));
  }
  std::mutex m;
  std::map<std::string, int> count;
  std::vector<std::thread> threads;
  for (const auto & sid : sids) {
    threads.emplace_back([&, sid] {
      auto c = f.client();
      for (;;) {
        auto res = c.Get(("/sessions/" + sid + "/next").c_str());
        ASSERT_TRUE(res);
        const auto p = cb::json::parse(res->body);
        if (p.at("kind") == "end_of_queue") {
          return;
        }
        const std::string id = p.at("pair_id");
        {
          std::lock_guard lock(m);
          ++count[id];
        }
        auto l = c.Post(("/sessions/" + sid + "/labels").c_str(),
                        cb::json({{"pair_id", id}, {"label", "A"}}).dump(), "application/json");
        ASSERT_TRUE(l);
        ASSERT_EQ(l->status, 201);
      }
    });
  }
  for (auto & t : threads) {
    t.join();
  }
  ASSERT_EQ(count.size(), static_cast<std::size_t>(kPairs));
  for (const auto & [id, n] : count) {
    EXPECT_EQ(n, 1) << id;
    EXPECT_EQ(f.store.history(id).size(), 1u) << id;
  }
}
