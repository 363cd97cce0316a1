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
#include "critic_bench/miner.hpp"
#include "miner_oracle.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

namespace cb = critic_bench;

namespace
{

cb::SubScores scores(double lk, std::optional<double> ep)
{
  cb::SubScores s;
  s.lk = lk;
  s.ep = ep;
  return s;
}

struct Fake
{
  cb::Vocabulary vocab;
  std::vector<cb::ScoredEntry> scored;
  cb::SubScores human;

  explicit Fake(cb::SubScores h, std::vector<cb::SubScores> v) : human(h)
  {
    for (std::size_t i = 0; i < v.size(); ++i) {
      vocab.entries.push_back({test_support::straight(1.0 + static_cast<double>(i)), 0, 0, 0});
      scored.push_back({i, v[i], {}});
    }
  }

  cb::MiningInput input() const
  {
    return {"s", human, test_support::straight(9.0), &vocab, &scored};
  }
};

}  // namespace

TEST(MineCase1, RowOnePattern)
{
  const Fake f(scores(0, 0.90), {scores(1, 0.65)});
  const auto d = cb::mine_case1(f.input(), {});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].pair_case, cb::PairCase::kCase1);
  EXPECT_EQ(d[0].pair_id, "s:case1");
  EXPECT_EQ(*d[0].vocab.vocab_index, 0u);
}

TEST(MineCase1, InsufficientSeparation)
{
  const Fake f(scores(0, 0.90), {scores(1, 0.75)});
  EXPECT_TRUE(cb::mine_case1(f.input(), {}).empty());
}

TEST(MineCase1, MirrorPattern)
{
  const Fake f(scores(1, 0.70), {scores(0, 0.95)});
  const auto d = cb::mine_case1(f.input(), {});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].pair_case, cb::PairCase::kCase1Mirror);
}

TEST(MineCase1, ImperfectCandidatesFiltered)
{
  auto bad = scores(1, 0.5);
  bad.ttc = 0.0;
  auto comfort = scores(1, 0.5);
  comfort.hc = 0.99;
  const Fake f(scores(0, 0.95), {bad, comfort});
  EXPECT_TRUE(cb::mine_case1(f.input(), {}).empty());
  auto human = scores(0, 0.95);
  human.dac = 0.0;
  const Fake g(human, {scores(1, 0.5)});
  EXPECT_TRUE(cb::mine_case1(g.input(), {}).empty());
}

TEST(MineCase1, NearestBoundaryThenLowestIndex)
{
  const Fake f(scores(0, 0.95), {scores(1, 0.5), scores(1, 0.74), scores(1, 0.74), scores(1, 0.7)});
  const auto d = cb::mine_case1(f.input(), {});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(*d[0].vocab.vocab_index, 1u);
  cb::MiningThresholds th;
  th.max_pairs_per_scene = 3;
  const auto three = cb::mine_case1(f.input(), th);
  ASSERT_EQ(three.size(), 3u);
  EXPECT_EQ(*three[1].vocab.vocab_index, 2u);
  EXPECT_EQ(*three[2].vocab.vocab_index, 3u);
  EXPECT_EQ(three[2].pair_id, "s:case1:2");
}

TEST(MineCase2, Examples)
{
  const Fake ok(scores(1, 0.70), {scores(1, 0.95)});
  const auto d = cb::mine_case2(ok.input(), {});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].pair_case, cb::PairCase::kCase2);
  const Fake lk0(scores(0, 0.70), {scores(1, 0.95)});
  EXPECT_TRUE(cb::mine_case2(lk0.input(), {}).empty());
  const Fake high(scores(1, 0.80), {scores(1, 1.0)});
  EXPECT_TRUE(cb::mine_case2(high.input(), {}).empty());
  const Fake vlk0(scores(1, 0.70), {scores(0, 0.95)});
  EXPECT_TRUE(cb::mine_case2(vlk0.input(), {}).empty());
}

TEST(MineCase, AbsentEpYieldsNothing)
{
  const Fake f(scores(0, std::nullopt), {scores(1, std::nullopt)});
  EXPECT_TRUE(cb::mine_case1(f.input(), {}).empty());
  EXPECT_TRUE(cb::mine_case2(f.input(), {}).empty());
}

TEST(Thresholds, Validation)
{
  EXPECT_NO_THROW(cb::MiningThresholds{}.validate());
  EXPECT_THROW((cb::MiningThresholds{0.7, 0.75, 0.2}).validate(), cb::ConfigError);
  EXPECT_THROW((cb::MiningThresholds{0.88, 0.75, 1.0}).validate(), cb::ConfigError);
}

TEST(AssignSlots, DeterministicAndBalanced)
{
  const Fake f(scores(0, 0.9), {scores(1, 0.6)});
  const auto draft = cb::mine_case1(f.input(), {}).at(0);
  const auto a = cb::assign_slots(draft, 12345);
  const auto b = cb::assign_slots(draft, 12345);
  EXPECT_EQ(a.human_slot, b.human_slot);
  EXPECT_EQ(a.rng_seed, 12345u);
  EXPECT_EQ(a.human().kind, cb::CandidateKind::kHuman);
  EXPECT_EQ(a.vocabulary().kind, cb::CandidateKind::kVocabulary);
  std::size_t in_a = 0;
  bool differs = false;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const auto p = cb::assign_slots(draft, s);
    in_a += p.human_slot == cb::Slot::kA;
    differs = differs || p.human_slot != a.human_slot;
  }
  EXPECT_TRUE(differs);
  EXPECT_GE(in_a, 4800u);
  EXPECT_LE(in_a, 5200u);
}

TEST(PseudoLabel, FollowsHumanSlot)
{
  const Fake f(scores(0, 0.9), {scores(1, 0.6)});
  const auto draft = cb::mine_case1(f.input(), {}).at(0);
  std::vector<cb::PreferencePair> pairs;
  for (std::uint64_t s = 0; s < 16; ++s) {
    pairs.push_back(cb::assign_slots(draft, s));
  }
  const auto labeled = cb::pseudo_label_case1(pairs);
  for (const auto & p : labeled) {
    EXPECT_EQ(p.label, p.human_slot == cb::Slot::kA ? cb::Label::kA : cb::Label::kB);
    EXPECT_EQ(p.label_source, cb::LabelSource::kPseudoCase1);
    EXPECT_EQ(p.preferred_kind(), cb::CandidateKind::kHuman);
  }
  auto c2 = pairs;
  c2[3].pair_case = cb::PairCase::kCase2;
  EXPECT_THROW(cb::pseudo_label_case1(c2), cb::PreconditionError);
}

TEST(Flip, LabelTracksTheSameCandidate)
{
  const Fake f(scores(0, 0.9), {scores(1, 0.6)});
  const auto draft = cb::mine_case1(f.input(), {}).at(0);
  for (std::uint64_t s = 0; s < 8; ++s) {
    auto p = cb::pseudo_label_case1({cb::assign_slots(draft, s)}).at(0);
    const auto q = cb::flipped(p);
    EXPECT_NE(p.human_slot, q.human_slot);
    EXPECT_NE(p.label, q.label);
    EXPECT_EQ(p.preferred_kind(), q.preferred_kind());
    EXPECT_EQ(cb::flipped(q).slot_a.trajectory, p.slot_a.trajectory);
  }
}

TEST(PairJson, RoundTripAndValidation)
{
  const Fake f(scores(0, 0.9), {scores(1, 0.6)});
  const auto p = cb::assign_slots(cb::mine_case1(f.input(), {}).at(0), 0xFFFFFFFFFFFFFFFFULL);
  const auto text = cb::pairs_to_jsonl({p});
  const auto back = cb::pairs_from_jsonl(text);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].rng_seed, p.rng_seed);
  EXPECT_EQ(cb::pairs_to_jsonl(back), text);
  auto j = cb::json::parse(text);
  j["label"] = "A";
  EXPECT_THROW(j.get<cb::PreferencePair>(), cb::DataError);
}

class FixtureCorpusTest : public ::testing::Test
{
protected:
  static void SetUpTestSuite()
  {
    corpus_ = new cb::FixtureCorpus(cb::generate_fixtures({.scenes = 20, .seed = 7}));
    vocab_ = new cb::Vocabulary(cb::build_vocabulary(cb::fixture_vocab_params()));
  }
  static void TearDownTestSuite()
  {
    delete corpus_;
    delete vocab_;
  }
  static cb::FixtureCorpus * corpus_;
  static cb::Vocabulary * vocab_;
};

cb::FixtureCorpus * FixtureCorpusTest::corpus_ = nullptr;
cb::Vocabulary * FixtureCorpusTest::vocab_ = nullptr;

TEST_F(FixtureCorpusTest, ScenesAreValidAndDeterministic)
{
  for (const auto & s : corpus_->scenes) {
    EXPECT_TRUE(cb::validate_scene(s).empty()) << s.scene_id;
  }
  const auto again = cb::generate_fixtures({.scenes = 20, .seed = 7});
  for (std::size_t i = 0; i < again.scenes.size(); ++i) {
    EXPECT_EQ(cb::scene_to_json(again.scenes[i]).dump(),
              cb::scene_to_json(corpus_->scenes[i]).dump());
  }
}

TEST_F(FixtureCorpusTest, DatasetMatchesBruteForce)
{
  const cb::MetricConfig cfg;
  const cb::MiningThresholds th;
  const auto ds = cb::build_dataset(corpus_->scenes, *vocab_, corpus_->splits, {.workers = 2});

  std::set<miner_oracle::PairKey> expected;
  std::map<std::string, cb::Split> split_of;
  for (const auto & id : corpus_->splits.train) split_of[id] = cb::Split::kTrain;
  for (const auto & id : corpus_->splits.test) split_of[id] = cb::Split::kTest;
  std::map<cb::Split, cb::CaseCounts> oracle_counts;
  for (const auto & s : corpus_->scenes) {
    const cb::PreparedScene p(s);
    const auto human = cb::score_human(p, cfg);
    const auto scored = cb::score_vocabulary(p, *vocab_, cfg);
    for (const auto & k : miner_oracle::brute_force_pairs(s.scene_id, human, scored, th)) {
      expected.insert(k);
      auto & c = oracle_counts[split_of.at(s.scene_id)];
      const auto & name = std::get<1>(k);
      if (name == "case2") {
        ++c.case2;
      } else {
        ++c.case1;
        c.case1_mirror += name == "case1_mirror";
      }
    }
  }
  std::set<miner_oracle::PairKey> got;
  for (const auto & [split, pairs] : ds.pairs) {
    for (const auto & p : pairs) {
      EXPECT_TRUE(got.insert(miner_oracle::key_of(p)).second);
      EXPECT_EQ(split, split_of.at(p.scene_id));
      // Perfection and separation invariants.
      EXPECT_TRUE(cb::others_perfect(p.slot_a.sub_scores));
      EXPECT_TRUE(cb::others_perfect(p.slot_b.sub_scores));
      EXPECT_GE(std::abs(*p.human().sub_scores.ep - *p.vocabulary().sub_scores.ep), th.delta_ep);
      if (p.pair_case == cb::PairCase::kCase2) {
        EXPECT_EQ(*p.slot_a.sub_scores.lk, 1.0);
        EXPECT_EQ(*p.slot_b.sub_scores.lk, 1.0);
      }
      const bool pseudo = split == cb::Split::kTrain && cb::is_case1(p.pair_case);
      EXPECT_EQ(p.label, pseudo ? cb::to_label(p.human_slot) : cb::Label::kUnlabeled);
    }
  }
  EXPECT_EQ(got, expected);
  EXPECT_GT(expected.size(), 5u);
  EXPECT_EQ(ds.manifest.counts.at(cb::Split::kTrain), oracle_counts[cb::Split::kTrain]);
  EXPECT_EQ(ds.manifest.counts.at(cb::Split::kTest), oracle_counts[cb::Split::kTest]);
}

TEST_F(FixtureCorpusTest, ReseedingChangesLettersNotCandidates)
{
  const auto a = cb::build_dataset(corpus_->scenes, *vocab_, corpus_->splits, {.global_seed = 1});
  const auto b = cb::build_dataset(corpus_->scenes, *vocab_, corpus_->splits, {.global_seed = 2});
  const auto & pa = a.pairs.at(cb::Split::kTrain);
  const auto & pb = b.pairs.at(cb::Split::kTrain);
  ASSERT_EQ(pa.size(), pb.size());
  bool any_letter_changed = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i].pair_id, pb[i].pair_id);
    EXPECT_EQ(pa[i].preferred_kind(), pb[i].preferred_kind());
    any_letter_changed = any_letter_changed || pa[i].label != pb[i].label;
  }
  EXPECT_TRUE(any_letter_changed);
}

TEST_F(FixtureCorpusTest, EmptyAndOverlappingSplits)
{
  const auto empty = cb::build_dataset({}, *vocab_, {}, {});
  EXPECT_EQ(empty.manifest.counts.at(cb::Split::kTrain).total(), 0u);
  EXPECT_EQ(empty.manifest.counts.at(cb::Split::kTest).total(), 0u);
  auto splits = corpus_->splits;
  splits.test.push_back(splits.train.front());
  EXPECT_THROW(cb::build_dataset(corpus_->scenes, *vocab_, splits, {}), cb::DataError);
}

TEST_F(FixtureCorpusTest, ManifestRoundTripAndTable)
{
  const auto ds = cb::build_dataset(corpus_->scenes, *vocab_, corpus_->splits, {});
  const auto j = cb::manifest_to_json(ds.manifest);
  const auto back = cb::manifest_from_json(cb::json::parse(j.dump()));
  EXPECT_EQ(cb::manifest_to_json(back), j);
  const auto table = cb::format_manifest_table(ds.manifest);
  EXPECT_NE(table.find("Train"), std::string::npos);
  EXPECT_NE(table.find("Case 1"), std::string::npos);
  EXPECT_EQ(j["counts"]["total"]["total"].get<std::size_t>(),
            ds.pairs.at(cb::Split::kTrain).size() + ds.pairs.at(cb::Split::kTest).size());
}

TEST(FixtureCorpus, EverySeedYieldsBothCases)
{
  const auto vocab = cb::build_vocabulary(cb::fixture_vocab_params());
  for (const std::uint64_t seed : {0u, 1u, 7u, 42u}) {
    const auto corpus = cb::generate_fixtures({.scenes = 20, .seed = seed});
    ASSERT_EQ(corpus.scenes.size(), 20u);
    for (const auto & s : corpus.scenes) {
      EXPECT_TRUE(cb::validate_scene(s).empty()) << s.scene_id;
    }
    const auto ds = cb::build_dataset(corpus.scenes, vocab, corpus.splits, {});
    cb::CaseCounts total;
    for (const auto & [split, pairs] : ds.pairs) {
      const auto c = cb::count_cases(pairs);
      total.case1 += c.case1;
      total.case2 += c.case2;
    }
    EXPECT_GE(total.case1, 1u) << "seed " << seed;
    EXPECT_GE(total.case2, 1u) << "seed " << seed;
  }
}
