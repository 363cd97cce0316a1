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

#ifndef CRITIC_BENCH__PIPELINE_HPP_
#define CRITIC_BENCH__PIPELINE_HPP_

#include "critic_bench/eval_harness.hpp"
#include "critic_bench/judges.hpp"
#include "critic_bench/metrics.hpp"
#include "critic_bench/miner.hpp"
#include "critic_bench/vocabulary.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace critic_bench
{

inline constexpr const char * kRunSchema = "critic-bench/run/v1";
inline constexpr const char * kProvenanceSchema = "critic-bench/provenance/v1";

struct Seeds
{
  std::uint64_t global{0};      ///< slot assignment
  std::uint64_t judge{0};       ///< random judge
  std::uint64_t classifier{0};  ///< classifier initialisation

  friend bool operator==(const Seeds &, const Seeds &) = default;
};

void to_json(json & j, const Seeds & s);

/// Pipeline inputs. Relative paths in a config file resolve against the
/// file's directory.
struct RunConfig
{
  std::filesystem::path scenes;
  /// {"train": [...], "test": [...]}; every scene is test when absent.
  std::optional<std::filesystem::path> splits;
  /// Prebuilt vocabulary; otherwise built from vocab_grid.
  std::optional<std::filesystem::path> vocab;
  std::string vocab_grid{"default"};  ///< default | fixture
  std::optional<std::filesystem::path> metric_config;
  MiningThresholds thresholds;
  /// Expert label exports (critic-bench/api/v1) merged onto their split.
  std::vector<std::filesystem::path> labels;
  /// Fill still-unlabeled test pairs with the human slot.
  bool simulate_expert{true};
  /// Judge spec that labels unlabeled Case-2 train pairs; none when empty.
  std::string case2_annotator;
  std::string judge{"epdms"};  ///< epdms | random | always_a | always_b | classifier | vlm
  std::optional<std::filesystem::path> endpoint;
  std::optional<std::filesystem::path> classifier_model;
  bool flip{true};
  std::string eval_split{"test"};
  Seeds seeds;
  std::size_t workers{0};
  std::filesystem::path output_dir{"out"};

  /// Throws ConfigError on bad values or missing referenced files.
  void validate() const;
};

void to_json(json & j, const RunConfig & c);
/// Rejects unknown keys with ConfigError; relative paths join `base_dir`.
RunConfig run_config_from_json(const json & j, const std::filesystem::path & base_dir = {});
RunConfig load_run_config(const std::filesystem::path & path);
/// SHA-256 of the canonical config JSON.
std::string config_hash(const RunConfig & c);

/// Resources a judge spec may need.
struct JudgeContext
{
  MetricConfig metrics;
  Seeds seeds;
  std::optional<std::filesystem::path> endpoint;
  std::optional<std::filesystem::path> classifier_model;
  /// Training data for "classifier" without a model file.
  const std::vector<PreferencePair> * train_pairs{nullptr};
  const std::map<std::string, Scene> * scenes{nullptr};
};

/// Builds a judge from its spec name. Throws ConfigError for an unknown
/// spec or a missing resource.
std::unique_ptr<Judge> make_judge(const std::string & spec, const JudgeContext & context);

/// JSONL artifact with a leading provenance line.
std::string with_provenance(const std::string & body, const json & provenance);
/// Splits off the provenance line; empty object when there is none.
std::pair<json, std::string> strip_provenance(const std::string & text);

json verdicts_to_json(const std::vector<std::string> & pair_ids, const std::vector<PairVerdicts> & verdicts);
std::vector<PairVerdicts> verdicts_from_json(const json & rows, const std::vector<PreferencePair> & pairs);

struct StageRecord
{
  std::string input_hash;
  std::map<std::string, std::string> outputs;  ///< file name -> SHA-256
};

struct RunManifest
{
  std::string config_hash;
  Seeds seeds;
  std::map<std::string, StageRecord> stages;
};

json run_manifest_to_json(const RunManifest & m);
RunManifest run_manifest_from_json(const json & j);

enum class StageOutcome { kRan, kSkipped };

struct RunResult
{
  std::vector<std::pair<std::string, StageOutcome>> stages;
  EvalReport report;
  std::filesystem::path report_path;
};

struct RunOptions
{
  /// Re-run every stage even on a hash hit.
  bool force{false};
  std::function<void(const std::string &)> log;
};

inline const std::vector<std::string> & pipeline_stages()
{
  static const std::vector<std::string> stages{"vocab", "score", "mine", "label", "judge", "eval"};
  return stages;
}

/// vocab -> score -> mine -> label -> judge -> eval, each stage skipped when
/// its input hash matches the run manifest and its outputs are intact.
/// Throws StaleArtifactError when a recorded output changed on disk.
RunResult run_pipeline(const RunConfig & config, const RunOptions & options = {});

}  // namespace critic_bench

#endif  // CRITIC_BENCH__PIPELINE_HPP_
