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
#include "critic_bench/labeling.hpp"
#include "critic_bench/scene_io.hpp"
#include "pair_factory.hpp"

#include <gtest/gtest.h>

#include <atomic>

namespace cb = critic_bench;

namespace
{

std::string dump(const std::vector<cb::PreferencePair> & pairs) { return cb::json(pairs).dump(); }

// Picks slot A unless the pair index is a multiple of three, where it fails.
class ScriptedJudge : public cb::Judge
{
public:
  std::string name() const override { return "scripted"; }
  cb::JudgeVerdict judge(const cb::JudgeInput & in) const override
  {
    ++calls;
    const int i = std::stoi(in.pair_id.substr(in.pair_id.find(':') + 1));
    if (i % 3 == 0) {
      cb::JudgeVerdict v;
      v.parse_status = cb::ParseStatus::kFormatViolation;
      return v;
    }
    return cb::JudgeVerdict::decided(cb::Slot::kA, 0.8);
  }
  mutable std::atomic<int> calls{0};
};

}  // namespace

TEST(Export, RoundTripIsLossless)
{
  auto pairs = test_support::road_pairs(6);
  pairs[0].label = cb::Label::kA;
  pairs[0].label_source = cb::LabelSource::kExpert;
  pairs[1].label = cb::Label::kB;
  pairs[1].label_source = cb::LabelSource::kLlmAnnotator;
  pairs[2].label = cb::Label::kDiscarded;
  const auto text = cb::export_jsonl(cb::Split::kTest, pairs);
  const auto parsed = cb::parse_export(text);
  EXPECT_EQ(dump(parsed.pairs), dump(pairs));
  EXPECT_EQ(parsed.header.split, cb::Split::kTest);
  EXPECT_EQ(parsed.header.n_pairs, 6u);
  EXPECT_EQ(parsed.header.labeled, 2u);
  EXPECT_EQ(parsed.header.discarded, 1u);
  EXPECT_EQ(parsed.header.unlabeled, 3u);
  EXPECT_EQ(cb::export_jsonl(cb::Split::kTest, parsed.pairs), text);
}

TEST(Export, HeaderReportsDiscardedAsExcluded)
{
  auto pairs = test_support::road_pairs(4);
  for (auto & p : pairs) {
    p.label = cb::to_label(p.human_slot);
    p.label_source = cb::LabelSource::kExpert;
  }
  pairs[3].label = cb::Label::kDiscarded;
  pairs[3].label_source.reset();
  const auto text = cb::export_jsonl(cb::Split::kTest, pairs);
  const auto header = cb::json::parse(text.substr(0, text.find('\n')));
  EXPECT_EQ(header.at("schema"), "critic-bench/api/v1");
  EXPECT_EQ(header.at("kind"), "export");
  EXPECT_EQ(header.at("split"), "test");
  EXPECT_EQ(header.at("excluded"), 1);
  EXPECT_EQ(header.at("discarded"), 1);
  EXPECT_EQ(header.at("labeled"), 3);
  // Discarded pairs do not reach evaluation.
  EXPECT_EQ(cb::labeled_pairs(cb::parse_export(text).pairs).size(), 3u);
}

TEST(Export, RejectsMissingHeaderAndBadCounts)
{
  const auto pairs = test_support::road_pairs(2);
  EXPECT_THROW(cb::parse_export(cb::pairs_to_jsonl(pairs)), cb::DataError);
  EXPECT_THROW(cb::parse_export(""), cb::DataError);
  auto text = cb::export_jsonl(cb::Split::kTrain, pairs);
  const auto pos = text.find("\"n_pairs\":2");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 11, "\"n_pairs\":3");
  EXPECT_THROW(cb::parse_export(text), cb::DataError);
}

TEST(Merge, NoLabelsLeavesPairsUnchanged)
{
  const auto pairs = test_support::road_pairs(5);
  EXPECT_EQ(dump(cb::merge_labels(pairs, {})), dump(pairs));
  // Importing an all-unlabeled export is also a no-op.
  EXPECT_EQ(dump(cb::merge_labels(pairs, cb::parse_export(cb::export_jsonl(cb::Split::kTest, pairs)).pairs)),
            dump(pairs));
}

TEST(Merge, CopiesLabelsByPairId)
{
  const auto pairs = test_support::road_pairs(4);
  auto row = pairs[2];
  row.label = cb::Label::kB;
  row.label_source = cb::LabelSource::kExpert;
  const auto merged = cb::merge_labels(pairs, {row});
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (i == 2) {
      EXPECT_EQ(merged[i].label, cb::Label::kB);
      EXPECT_EQ(merged[i].label_source, cb::LabelSource::kExpert);
    } else {
      EXPECT_EQ(merged[i].label, cb::Label::kUnlabeled);
    }
  }
}

TEST(Merge, RejectsMismatchedRows)
{
  const auto pairs = test_support::road_pairs(3);
  auto unknown = test_support::road_pair(99, cb::Slot::kA);
  unknown.label = cb::Label::kA;
  EXPECT_THROW(cb::merge_labels(pairs, {unknown}), cb::DataError);

  auto swapped = pairs[1];
  std::swap(swapped.slot_a, swapped.slot_b);
  swapped.human_slot = cb::other(swapped.human_slot);
  swapped.label = cb::Label::kA;
  EXPECT_THROW(cb::merge_labels(pairs, {swapped}), cb::DataError);

  auto altered = pairs[0];
  altered.slot_a.trajectory = test_support::straight(3.0);
  EXPECT_THROW(cb::merge_labels(pairs, {altered}), cb::DataError);
}

TEST(SimulatedExpert, LabelsHumanSlotOnlyWhereUnlabeled)
{
  auto pairs = test_support::road_pairs(6);
  pairs[1].label = cb::Label::kDiscarded;
  pairs[4].label = cb::to_label(cb::other(pairs[4].human_slot));
  pairs[4].label_source = cb::LabelSource::kExpert;
  const auto out = cb::simulated_expert_labels(pairs);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i == 1 || i == 4) {
      EXPECT_EQ(out[i].label, pairs[i].label);
      EXPECT_EQ(out[i].label_source, pairs[i].label_source);
      continue;
    }
    EXPECT_EQ(out[i].label, cb::to_label(out[i].human_slot));
    EXPECT_EQ(out[i].label_source, cb::LabelSource::kSimulatedExpert);
    EXPECT_EQ(out[i].preferred_kind(), cb::CandidateKind::kHuman);
  }
}

TEST(JudgeLabels, LabelsSelectedPairsWithOkVerdicts)
{
  auto pairs = test_support::road_pairs(9);
  for (auto & p : pairs) {
    p.pair_case = cb::PairCase::kCase2;
  }
  pairs[5].label = cb::Label::kB;
  pairs[5].label_source = cb::LabelSource::kExpert;
  pairs[8].pair_case = cb::PairCase::kCase1;
  const std::map<std::string, cb::Scene> scenes{{"road", test_support::straight_road()}};
  ScriptedJudge judge;
  const auto n = cb::judge_labels(
    pairs, judge, scenes, [](const cb::PreferencePair & p) { return p.pair_case == cb::PairCase::kCase2; });
  // Case-2 and unlabeled: 0 1 2 3 4 6 7. Failures on multiples of three: 0 3 6.
  EXPECT_EQ(judge.calls.load(), 7);
  EXPECT_EQ(n, 4u);
  for (int i : {1, 2, 4, 7}) {
    EXPECT_EQ(pairs[static_cast<std::size_t>(i)].label, cb::Label::kA) << i;
    EXPECT_EQ(pairs[static_cast<std::size_t>(i)].label_source, cb::LabelSource::kLlmAnnotator) << i;
  }
  for (int i : {0, 3, 6, 8}) {
    EXPECT_EQ(pairs[static_cast<std::size_t>(i)].label, cb::Label::kUnlabeled) << i;
  }
  EXPECT_EQ(pairs[5].label, cb::Label::kB);
  EXPECT_EQ(pairs[5].label_source, cb::LabelSource::kExpert);
}

TEST(JudgeLabels, MissingSceneIsDataError)
{
  auto pairs = test_support::road_pairs(2);
  ScriptedJudge judge;
  EXPECT_THROW(
    cb::judge_labels(pairs, judge, {}, [](const cb::PreferencePair &) { return true; }), cb::DataError);
}
