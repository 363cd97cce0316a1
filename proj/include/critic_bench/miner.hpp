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

#ifndef CRITIC_BENCH__MINER_HPP_
#define CRITIC_BENCH__MINER_HPP_

#include "critic_bench/metrics.hpp"
#include "critic_bench/scene.hpp"
#include "critic_bench/scene_io.hpp"
#include "critic_bench/vocabulary.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace critic_bench
{

struct MiningThresholds
{
  double tau_ep1{0.88};
  double tau_ep2{0.75};
  double delta_ep{0.2};
  std::size_t max_pairs_per_scene{1};  ///< per case kind

  /// Throws ConfigError unless 0 < tau_ep2 <= tau_ep1 <= 1 and 0 < delta_ep < 1.
  void validate() const;
};

enum class PairCase { kCase1, kCase1Mirror, kCase2 };
enum class Slot { kA, kB };
enum class Label { kA, kB, kDiscarded, kUnlabeled };
enum class LabelSource { kExpert, kPseudoCase1, kLlmAnnotator, kSimulatedExpert };
enum class CandidateKind { kHuman, kVocabulary };

std::string_view to_string(PairCase c);
std::string_view to_string(Slot s);
std::string_view to_string(Label l);
std::string_view to_string(LabelSource s);
std::string_view to_string(CandidateKind k);
PairCase pair_case_from_string(std::string_view s);
Slot slot_from_string(std::string_view s);
Label label_from_string(std::string_view s);
LabelSource label_source_from_string(std::string_view s);
CandidateKind candidate_kind_from_string(std::string_view s);

inline Slot other(Slot s) { return s == Slot::kA ? Slot::kB : Slot::kA; }
inline Label to_label(Slot s) { return s == Slot::kA ? Label::kA : Label::kB; }

/// Case 1 and its mirror are reported together as case 1.
inline bool is_case1(PairCase c) { return c != PairCase::kCase2; }

struct CandidateRef
{
  CandidateKind kind{CandidateKind::kHuman};
  std::optional<std::size_t> vocab_index;  ///< set for vocabulary candidates
  Trajectory trajectory;
  SubScores sub_scores;
};

struct PreferencePair
{
  std::string pair_id;
  std::string scene_id;
  PairCase pair_case{PairCase::kCase1};
  CandidateRef slot_a;
  CandidateRef slot_b;
  Slot human_slot{Slot::kA};
  Label label{Label::kUnlabeled};
  std::optional<LabelSource> label_source;
  std::uint64_t rng_seed{0};

  const CandidateRef & candidate(Slot s) const { return s == Slot::kA ? slot_a : slot_b; }
  const CandidateRef & human() const { return candidate(human_slot); }
  const CandidateRef & vocabulary() const { return candidate(other(human_slot)); }

  /// Underlying candidate named by the label (human or vocabulary); empty
  /// for discarded or unlabeled pairs.
  std::optional<CandidateKind> preferred_kind() const;
};

/// A mined pair before presentation order is fixed.
struct PairDraft
{
  std::string pair_id;
  std::string scene_id;
  PairCase pair_case{PairCase::kCase1};
  CandidateRef human;
  CandidateRef vocab;
};

struct MiningInput
{
  std::string scene_id;
  SubScores human_scores;
  Trajectory human_trajectory;
  const Vocabulary * vocab{nullptr};
  const std::vector<ScoredEntry> * scored{nullptr};
};

/// Every averaged and penalty metric other than EP and LK passes: exact 1 for
/// rule metrics, >= 0.999 for the continuous comfort metrics. ABSENT values
/// do not disqualify.
bool others_perfect(const SubScores & s);

/// Row 1 (LK_H = 0, high EP_H) and mirror (LK_H = 1, low EP_H) drafts. Among
/// qualifying vocabulary entries the one closest to the EP bound wins, ties to
/// the lowest index.
std::vector<PairDraft> mine_case1(const MiningInput & in, const MiningThresholds & th);
std::vector<PairDraft> mine_case2(const MiningInput & in, const MiningThresholds & th);

/// Per-pair seed derived from a corpus seed and the pair id.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view pair_id);

/// Human goes to slot A with probability 1/2, reproducibly from rng_seed.
PreferencePair assign_slots(const PairDraft & draft, std::uint64_t rng_seed);

/// Labels every pair with its human slot. Throws PreconditionError unless all
/// pairs are unlabeled Case-1 or mirror pairs.
std::vector<PreferencePair> pseudo_label_case1(std::vector<PreferencePair> pairs);

/// Presentation-swapped copy: slots, human slot and label letter all flip.
PreferencePair flipped(const PreferencePair & pair);

enum class Split { kTrain, kTest };
std::string_view to_string(Split s);
Split split_from_string(std::string_view s);

struct SplitAssignment
{
  std::vector<std::string> train;
  std::vector<std::string> test;
};

struct CaseCounts
{
  std::size_t case1{0};  ///< includes mirror pairs
  std::size_t case1_mirror{0};
  std::size_t case2{0};
  std::size_t total() const { return case1 + case2; }
  friend bool operator==(const CaseCounts &, const CaseCounts &) = default;
};

struct DatasetManifest
{
  std::map<Split, CaseCounts> counts;
  std::size_t scenes{0};
  std::size_t unassigned_scenes{0};
  std::size_t unscorable_scenes{0};
  std::uint64_t global_seed{0};
  MiningThresholds thresholds;
};

struct Dataset
{
  DatasetManifest manifest;
  std::map<Split, std::vector<PreferencePair>> pairs;
};

struct BuildOptions
{
  MiningThresholds thresholds;
  MetricConfig metrics;
  std::uint64_t global_seed{0};
  std::size_t workers{1};
};

/// Mines every assigned scene, fixes slots, pseudo-labels Case-1 train pairs
/// and leaves the rest unlabeled. Throws DataError when a scene id appears in
/// both splits.
Dataset build_dataset(
  const std::vector<Scene> & scenes, const Vocabulary & vocab, const SplitAssignment & splits,
  const BuildOptions & options);

/// Mines one scene: scores the human and the vocabulary and returns the drafts.
std::vector<PairDraft> mine_scene(
  const Scene & scene, const Vocabulary & vocab, const MiningThresholds & th,
  const MetricConfig & config);

CaseCounts count_cases(const std::vector<PreferencePair> & pairs);

void to_json(json & j, const CandidateRef & c);
void from_json(const json & j, CandidateRef & c);
void to_json(json & j, const PreferencePair & p);
void from_json(const json & j, PreferencePair & p);

json manifest_to_json(const DatasetManifest & m);
DatasetManifest manifest_from_json(const json & j);
/// Table layout: split rows, Case 1 / Case 2 / Total columns, and a total row.
std::string format_manifest_table(const DatasetManifest & m);

std::string pairs_to_jsonl(const std::vector<PreferencePair> & pairs);
std::vector<PreferencePair> pairs_from_jsonl(const std::string & text);
void save_pairs(const std::filesystem::path & path, const std::vector<PreferencePair> & pairs);
std::vector<PreferencePair> load_pairs(const std::filesystem::path & path);

/// Reads a JSON object {"train": [scene ids], "test": [scene ids]}.
SplitAssignment load_split_assignment(const std::filesystem::path & path);

}  // namespace critic_bench

#endif  // CRITIC_BENCH__MINER_HPP_
