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
#include "critic_bench/fixtures.hpp"
#include "critic_bench/judges.hpp"
#include "critic_bench/vocabulary.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace cb = critic_bench;
using test_support::straight;

namespace
{

cb::SubScores sub(double ep, double lk)
{
  cb::SubScores s;
  s.ep = ep;
  s.lk = lk;
  return s;
}

cb::JudgeInput input_of(const cb::Scene & scene, cb::SlotView a, cb::SlotView b, std::string id = "p")
{
  cb::JudgeInput in;
  in.pair_id = std::move(id);
  in.scene_id = scene.scene_id;
  in.scene = &scene;
  in.a = std::move(a);
  in.b = std::move(b);
  return in;
}

// Weighted average over present averaged metrics times the penalty product,
// written out for the default weights (ttc 5, ep 5, lk 2, hc 2, ec 2).
double oracle_epdms(const cb::SubScores & s)
{
  const double pen = s.nc * s.dac * s.ddc * s.tlc;
  double num = 0.0;
  double den = 0.0;
  const std::pair<std::optional<double>, double> terms[] = {
    {s.ttc, 5.0}, {s.ep, 5.0}, {s.lk, 2.0}, {s.hc, 2.0}, {s.ec, 2.0}};
  for (const auto & [v, w] : terms) {
    if (v) {
      num += w * *v;
      den += w;
    }
  }
  return pen * num / den;
}

cb::SubScores random_sub(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pick = [&](std::initializer_list<double> v) {
    return *(v.begin() + static_cast<long>(rng() % v.size()));
  };
  cb::SubScores s;
  s.nc = pick({0.0, 0.5, 1.0, 1.0, 1.0});
  s.dac = pick({0.0, 1.0, 1.0, 1.0});
  s.ddc = pick({0.0, 0.5, 1.0, 1.0});
  s.tlc = pick({0.0, 1.0, 1.0, 1.0});
  s.ttc = pick({0.0, 1.0, 1.0});
  s.ep = u(rng);
  s.lk = pick({0.0, 1.0});
  s.hc = pick({0.0, 1.0, 1.0});
  s.ec = u(rng) < 0.2 ? std::optional<double>() : std::optional<double>(pick({0.0, 1.0}));
  return s;
}

}  // namespace

// EPDMS judge

TEST(EpdmsJudge, Examples)
{
  const auto scene = test_support::straight_road();
  const cb::EpdmsJudge judge;
  // Higher aggregate wins; equal goes to A.
  EXPECT_EQ(judge.judge(input_of(scene, {straight(5), sub(0.9, 1)}, {straight(5), sub(0.3, 1)})).choice,
            cb::Slot::kA);
  EXPECT_EQ(judge.judge(input_of(scene, {straight(5), sub(0.3, 1)}, {straight(5), sub(0.9, 1)})).choice,
            cb::Slot::kB);
  EXPECT_EQ(judge.judge(input_of(scene, {straight(5), sub(0.5, 1)}, {straight(6), sub(0.5, 1)})).choice,
            cb::Slot::kA);
  // Case-1 row-1 pair: human (LK 0, EP 0.9) in A, vocabulary (LK 1, EP 0.65) in B.
  const auto v = judge.judge(input_of(scene, {straight(5), sub(0.9, 0)}, {straight(5), sub(0.65, 1)}));
  EXPECT_EQ(v.choice, cb::Slot::kB);
  EXPECT_EQ(v.parse_status, cb::ParseStatus::kOk);
  EXPECT_FALSE(v.confidence.has_value());
}

TEST(EpdmsJudge, MatchesClosedFormAndFlipConsistent)
{
  const auto scene = test_support::straight_road();
  const cb::EpdmsJudge judge;
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    const auto sa = random_sub(rng);
    const auto sb = random_sub(rng);
    const auto in = input_of(scene, {straight(5), sa}, {straight(6), sb});
    const auto v = judge.judge(in);
    const double diff = oracle_epdms(sa) - oracle_epdms(sb);
    if (std::abs(diff) > 1e-12) {
      ASSERT_EQ(v.choice, diff > 0 ? cb::Slot::kA : cb::Slot::kB) << i;
      ASSERT_EQ(judge.judge(in.swapped()).choice, cb::other(*v.choice)) << i;
    }
  }
}

TEST(EpdmsJudge, UnscorableThrows)
{
  const auto scene = test_support::straight_road();
  cb::SubScores empty;
  empty.ttc.reset();
  empty.ep.reset();
  empty.lk.reset();
  empty.hc.reset();
  empty.ec.reset();
  EXPECT_THROW(cb::EpdmsJudge().judge(input_of(scene, {straight(5), empty}, {straight(5), sub(1, 1)})),
               cb::UndefinedScoreError);
}

// Random judge

TEST(RandomJudge, DeterministicAndUnbiased)
{
  const auto scene = test_support::straight_road();
  const cb::RandomJudge judge(17);
  const cb::RandomJudge other_seed(18);
  int agree_a = 0;
  int agree_alt = 0;
  int same_seed_diff = 0;
  int consistent = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto in = input_of(scene, {straight(5), sub(1, 1)}, {straight(6), sub(1, 1)},
                             "fx-" + std::to_string(i) + ":case1");
    const auto v = judge.judge(in);
    ASSERT_TRUE(v.choice.has_value());
    EXPECT_FALSE(v.confidence.has_value());
    EXPECT_EQ(judge.judge(in).choice, v.choice);
    agree_a += *v.choice == cb::Slot::kA ? 1 : 0;
    agree_alt += *v.choice == (i % 2 ? cb::Slot::kA : cb::Slot::kB) ? 1 : 0;
    same_seed_diff += other_seed.judge(in).choice != v.choice ? 1 : 0;
    consistent += judge.judge(in.swapped()).choice == cb::other(*v.choice) ? 1 : 0;
  }
  for (const int k : {agree_a, agree_alt, same_seed_diff, consistent}) {
    EXPECT_GE(k, 4800);
    EXPECT_LE(k, 5200);
  }
}

// Features

TEST(Features, HandComputedFixture)
{
  test_support::RoadOptions opts;
  opts.frame = {12.0, -4.0, 0.7};
  opts.ego_speed = 5.0;
  auto scene = test_support::straight_road(opts);
  test_support::add_agent(scene, "parked", {22.0, 3.5, 0.0}, 4.0, 1.9, {0.0, 0.0});
  const auto b_traj = test_support::lateral_profile(4.0, {0, 0, 0, 0, 0.5, 0.5, 0.5, 0.5});
  const auto f = cb::extract_features(input_of(scene, {straight(5), sub(0.8, 1)}, {b_traj, sub(0.9, 0)}));
  // A passes alongside the parked car with a 3.5 - 1.9 = 1.6 m gap; B stops
  // 1.7 m short of its rear with a 1.1 m lateral gap.
  const double expected[cb::kFeatureDim] = {
    0.8, 1.0, 1.6, 0.0, 20.0, 0.0,
    0.9, 0.0, std::sqrt(1.7 * 1.7 + 1.1 * 1.1), 0.5, 16.0, 4.0,
    -0.1, 1.0, 1.6 - std::sqrt(1.7 * 1.7 + 1.1 * 1.1), -0.5, 4.0, -4.0,
    0.0, 1.0, 0.0, 0.0, 5.0, 0.0};
  for (std::size_t i = 0; i < cb::kFeatureDim; ++i) {
    EXPECT_NEAR(f[i], expected[i], 1e-9) << "feature " << i;
  }
}

TEST(Features, IdenticalAndSwapped)
{
  auto scene = test_support::straight_road();
  test_support::add_agent(scene, "lead", {30.0, 0.0, 0.0}, 4.5, 1.9, {3.0, 0.0});
  const cb::SlotView a{test_support::lateral_profile(8, {0, 0.1, 0.3, 0.6, 0.9, 1.1, 1.2, 1.2}), sub(0.7, 1)};
  const cb::SlotView b{straight(6), sub(0.4, 0)};
  const auto same = cb::extract_features(input_of(scene, a, a));
  for (std::size_t i = 12; i < 18; ++i) {
    EXPECT_EQ(same[i], 0.0);
  }
  const auto f = cb::extract_features(input_of(scene, a, b));
  const auto g = cb::extract_features(input_of(scene, a, b).swapped());
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(f[i], g[6 + i]);
    EXPECT_EQ(f[6 + i], g[i]);
    EXPECT_EQ(f[12 + i], -g[12 + i]);
  }
  for (std::size_t i = 18; i < cb::kFeatureDim; ++i) {
    EXPECT_EQ(f[i], g[i]);
  }
}

TEST(Features, AbsentScoresEncodeAsZero)
{
  const auto scene = test_support::straight_road();
  cb::SubScores s;
  s.ep.reset();
  s.lk.reset();
  const auto f = cb::extract_features(input_of(scene, {straight(5), s}, {straight(5), sub(1, 1)}));
  EXPECT_EQ(f[0], 0.0);
  EXPECT_EQ(f[1], 0.0);
  EXPECT_EQ(f[2], cb::kClearanceCap);
}

// Classifier

namespace
{

std::vector<std::vector<double>> random_rows(std::mt19937_64 & rng, std::size_t n, std::size_t d)
{
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> x(n, std::vector<double>(d));
  for (auto & row : x) {
    for (auto & v : row) {
      v = g(rng);
    }
  }
  return x;
}

std::vector<cb::LabeledExample> separable_examples(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cb::LabeledExample> out;
  while (out.size() < n) {
    cb::FeatureVector f{};
    for (auto & v : f) {
      v = g(rng);
    }
    f[0] = u(rng);
    f[6] = u(rng);
    if (std::abs(f[0] - f[6]) < 0.02) {
      continue;
    }
    for (std::size_t i = 0; i < 6; ++i) {
      f[12 + i] = f[i] - f[6 + i];
    }
    f[22] = 2.0 + 10.0 * u(rng);
    out.push_back({f, f[0] > f[6] ? cb::Slot::kA : cb::Slot::kB});
  }
  return out;
}

}  // namespace

TEST(Classifier, GradientMatchesFiniteDifferences)
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int batch = 0; batch < 20; ++batch) {
    const bool has_bias = batch % 2 == 0;
    const std::size_t d = 3 + rng() % 20;
    const auto x = random_rows(rng, 5 + rng() % 30, d);
    std::vector<double> y(x.size());
    for (auto & v : y) {
      v = static_cast<double>(rng() % 2);
    }
    std::vector<double> w(d + (has_bias ? 1 : 0));
    for (auto & v : w) {
      v = g(rng);
    }
    const double l2 = 0.01 * static_cast<double>(batch);
    const auto lg = cb::logistic_loss_and_gradient(x, y, w, l2, has_bias);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double h = 1e-6;
      auto wp = w;
      auto wm = w;
      wp[i] += h;
      wm[i] -= h;
      const double fd = (cb::logistic_loss_and_gradient(x, y, wp, l2, has_bias).loss -
                         cb::logistic_loss_and_gradient(x, y, wm, l2, has_bias).loss) / (2 * h);
      const double rel = std::abs(fd - lg.gradient[i]) / std::max(1e-8, std::abs(fd) + std::abs(lg.gradient[i]));
      EXPECT_LT(rel, 1e-5) << "batch " << batch << " weight " << i;
    }
  }
}

TEST(Classifier, LossMatchesDirectFormula)
{
  const std::vector<std::vector<double>> x = {{1.0, 2.0}, {-1.0, 0.5}};
  const std::vector<double> y = {1.0, 0.0};
  const std::vector<double> w = {0.3, -0.2, 0.1};
  const auto lg = cb::logistic_loss_and_gradient(x, y, w, 0.5, true);
  const double z0 = 0.3 - 0.4 + 0.1;
  const double z1 = -0.3 - 0.1 + 0.1;
  const double s0 = 1 / (1 + std::exp(-z0));
  const double s1 = 1 / (1 + std::exp(-z1));
  const double expected = -(std::log(s0) + std::log(1 - s1)) / 2 + 0.25 * (0.09 + 0.04);
  EXPECT_NEAR(lg.loss, expected, 1e-14);
}

TEST(Classifier, ZeroLearningRateKeepsZeroWeights)
{
  const auto ex = separable_examples(50, 1);
  for (const auto mode : {cb::FeatureMode::kAntisymmetric, cb::FeatureMode::kRaw}) {
    const auto r = cb::train_classifier(ex, {.mode = mode, .learning_rate = 0.0, .iterations = 1});
    for (const double w : r.model.weights) {
      EXPECT_EQ(w, 0.0);
    }
    EXPECT_EQ(r.model.bias, 0.0);
    EXPECT_NEAR(r.final_loss, std::log(2.0), 1e-12);
  }
}

TEST(Classifier, SingleClassRejected)
{
  auto ex = separable_examples(20, 2);
  for (auto & e : ex) {
    e.label = cb::Slot::kB;
  }
  EXPECT_THROW(cb::train_classifier(ex, {}), cb::PreconditionError);
  EXPECT_THROW(cb::train_classifier({}, {}), cb::PreconditionError);
}

TEST(Classifier, SeparableReachesHighAccuracy)
{
  const auto ex = separable_examples(400, 4);
  for (const auto mode : {cb::FeatureMode::kAntisymmetric, cb::FeatureMode::kRaw}) {
    const auto r = cb::train_classifier(ex, {.mode = mode, .iterations = 500});
    EXPECT_GE(r.train_accuracy, 0.99) << to_string(mode);
    std::size_t correct = 0;
    for (const auto & e : ex) {
      correct += (r.model.logit(e.features) >= 0) == (e.label == cb::Slot::kA) ? 1 : 0;
    }
    EXPECT_DOUBLE_EQ(static_cast<double>(correct) / static_cast<double>(ex.size()), r.train_accuracy);
  }
}

TEST(Classifier, DeterministicGivenSeed)
{
  const auto ex = separable_examples(100, 5);
  const cb::TrainParams p{.iterations = 50, .seed = 9, .init_scale = 0.1};
  EXPECT_EQ(cb::train_classifier(ex, p).model.weights, cb::train_classifier(ex, p).model.weights);
  auto q = p;
  q.seed = 10;
  EXPECT_NE(cb::train_classifier(ex, p).model.weights, cb::train_classifier(ex, q).model.weights);
}

TEST(Classifier, ModelJsonRoundTrip)
{
  const auto r = cb::train_classifier(separable_examples(60, 6), {.mode = cb::FeatureMode::kRaw, .iterations = 20});
  const auto back = cb::json(r.model).get<cb::ClassifierModel>();
  EXPECT_EQ(back.weights, r.model.weights);
  EXPECT_EQ(back.center, r.model.center);
  EXPECT_EQ(back.scale, r.model.scale);
  EXPECT_EQ(back.bias, r.model.bias);
  auto bad = cb::json(r.model);
  bad["weights"].erase(0);
  EXPECT_THROW(bad.get<cb::ClassifierModel>(), cb::DataError);
}

class ClassifierFixture : public ::testing::Test
{
protected:
  static void SetUpTestSuite()
  {
    const auto corpus = cb::generate_fixtures({.scenes = 20, .seed = 7});
    scenes_ = new std::map<std::string, cb::Scene>();
    for (const auto & s : corpus.scenes) {
      (*scenes_)[s.scene_id] = s;
    }
    const auto vocab = cb::build_vocabulary(cb::fixture_vocab_params());
    data_ = new cb::Dataset(cb::build_dataset(corpus.scenes, vocab, corpus.splits, {.global_seed = 3}));
  }
  static void TearDownTestSuite()
  {
    delete scenes_;
    delete data_;
  }
  static std::map<std::string, cb::Scene> * scenes_;
  static cb::Dataset * data_;
};

std::map<std::string, cb::Scene> * ClassifierFixture::scenes_ = nullptr;
cb::Dataset * ClassifierFixture::data_ = nullptr;

TEST_F(ClassifierFixture, AntisymmetricIsFlipConsistent)
{
  const auto & train = data_->pairs.at(cb::Split::kTrain);
  const auto ex = cb::make_examples(train, *scenes_);
  ASSERT_GE(ex.size(), 4u);
  const auto r = cb::train_classifier(ex, {});
  const cb::ClassifierJudge judge(r.model);
  std::size_t n = 0;
  for (const auto split : {cb::Split::kTrain, cb::Split::kTest}) {
    for (const auto & p : data_->pairs.at(split)) {
      const auto in = cb::make_judge_input(p, scenes_->at(p.scene_id));
      const auto v = judge.judge(in);
      const auto w = judge.judge(in.swapped());
      ASSERT_TRUE(v.choice && w.choice);
      EXPECT_EQ(p.candidate(*v.choice).kind, cb::flipped(p).candidate(*w.choice).kind) << p.pair_id;
      EXPECT_NEAR(*v.confidence, *w.confidence, 1e-12);
      EXPECT_GE(*v.confidence, 0.5);
      ++n;
    }
  }
  EXPECT_GT(n, 0u);
}

TEST_F(ClassifierFixture, IdenticalCandidatesGiveHalfConfidence)
{
  const auto r = cb::train_classifier(cb::make_examples(data_->pairs.at(cb::Split::kTrain), *scenes_), {});
  const cb::ClassifierJudge judge(r.model);
  for (const auto & p : data_->pairs.at(cb::Split::kTrain)) {
    auto in = cb::make_judge_input(p, scenes_->at(p.scene_id));
    in.b = in.a;
    EXPECT_NEAR(*judge.judge(in).confidence, 0.5, 1e-9);
  }
}

TEST(JudgeInput, StripsLabelsAndSwaps)
{
  const auto scene = test_support::straight_road();
  cb::PreferencePair p;
  p.pair_id = "road:case1";
  p.scene_id = "road";
  p.slot_a = {cb::CandidateKind::kHuman, std::nullopt, straight(5), sub(0.9, 0)};
  p.slot_b = {cb::CandidateKind::kVocabulary, 3, straight(6), sub(0.6, 1)};
  p.label = cb::Label::kA;
  const auto in = cb::make_judge_input(p, scene);
  EXPECT_EQ(in.ep_lk(cb::Slot::kA), std::make_pair(std::optional<double>(0.9), std::optional<double>(0.0)));
  EXPECT_EQ(in.ep_lk(cb::Slot::kB), std::make_pair(std::optional<double>(0.6), std::optional<double>(1.0)));
  const auto sw = in.swapped();
  EXPECT_EQ(sw.a.trajectory, in.b.trajectory);
  EXPECT_EQ(sw.b.sub_scores, in.a.sub_scores);
  auto wrong = scene;
  wrong.scene_id = "other";
  EXPECT_THROW(cb::make_judge_input(p, wrong), cb::PreconditionError);
}

TEST(JudgeVerdict, JsonRoundTripAndInvariant)
{
  cb::JudgeVerdict v = cb::JudgeVerdict::decided(cb::Slot::kB, 0.75);
  v.reasoning_text = "r";
  v.raw_response = "<think>r</think>\nDecision: B";
  v.retries = 2;
  const auto back = cb::json(v).get<cb::JudgeVerdict>();
  EXPECT_EQ(back.choice, v.choice);
  EXPECT_EQ(back.confidence, v.confidence);
  EXPECT_EQ(back.raw_response, v.raw_response);
  EXPECT_EQ(back.retries, 2);
  auto bad = cb::json(v);
  bad["parse_status"] = "format_violation";
  EXPECT_THROW(bad.get<cb::JudgeVerdict>(), cb::DataError);
}
