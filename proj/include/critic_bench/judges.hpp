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

#ifndef CRITIC_BENCH__JUDGES_HPP_
#define CRITIC_BENCH__JUDGES_HPP_

#include "critic_bench/metrics.hpp"
#include "critic_bench/miner.hpp"
#include "critic_bench/scene.hpp"
#include "critic_bench/scene_io.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace critic_bench
{

enum class ParseStatus { kOk, kFormatViolation, kTransportError };

std::string_view to_string(ParseStatus s);
ParseStatus parse_status_from_string(std::string_view s);

struct JudgeVerdict
{
  std::optional<Slot> choice;  ///< present iff parse_status is ok
  std::optional<double> confidence;
  std::optional<std::string> reasoning_text;
  std::optional<std::string> raw_response;
  ParseStatus parse_status{ParseStatus::kOk};
  int retries{0};
  std::optional<std::string> error;

  static JudgeVerdict decided(Slot choice, std::optional<double> confidence = std::nullopt);
};

void to_json(json & j, const JudgeVerdict & v);
void from_json(const json & j, JudgeVerdict & v);

/// One presented candidate. Candidate kind, pair case and label are not
/// carried, so a judge cannot observe them.
struct SlotView
{
  Trajectory trajectory;
  SubScores sub_scores;
};

/// Label-stripped view of a pair as shown to a judge.
struct JudgeInput
{
  std::string pair_id;
  std::string scene_id;
  const Scene * scene{nullptr};
  SlotView a;
  SlotView b;
  /// PNG bytes of the slot renders, when a judge needs them.
  std::optional<std::string> bev_a;
  std::optional<std::string> bev_b;

  const SlotView & view(Slot s) const { return s == Slot::kA ? a : b; }
  /// (EP, LK) of a slot, taken from its sub-scores.
  std::pair<std::optional<double>, std::optional<double>> ep_lk(Slot s) const;
  /// Same pair with the slots (and renders) exchanged.
  JudgeInput swapped() const;
};

JudgeInput make_judge_input(const PreferencePair & pair, const Scene & scene);

class Judge
{
public:
  virtual ~Judge() = default;
  virtual std::string name() const = 0;
  /// Must be safe to call concurrently.
  virtual JudgeVerdict judge(const JudgeInput & input) const = 0;
  virtual bool needs_renders() const { return false; }
  /// Upper bound on concurrent judge() calls; 0 means unbounded.
  virtual std::size_t max_concurrency() const { return 0; }
};

/// Higher aggregate EPDMS wins; exact ties go to slot A. Throws
/// UndefinedScoreError when either candidate cannot be aggregated.
class EpdmsJudge : public Judge
{
public:
  explicit EpdmsJudge(MetricConfig config = {}) : config_(std::move(config)) {}
  std::string name() const override { return "epdms"; }
  JudgeVerdict judge(const JudgeInput & input) const override;

private:
  MetricConfig config_;
};

/// Uniform choice keyed by (seed, pair id, slot-A trajectory); confidence ABSENT.
class RandomJudge : public Judge
{
public:
  explicit RandomJudge(std::uint64_t seed) : seed_(seed) {}
  std::string name() const override { return "random"; }
  JudgeVerdict judge(const JudgeInput & input) const override;

private:
  std::uint64_t seed_;
};

/// Always picks the same slot; a positional-bias reference.
class ConstantJudge : public Judge
{
public:
  explicit ConstantJudge(Slot slot) : slot_(slot) {}
  std::string name() const override { return slot_ == Slot::kA ? "always_a" : "always_b"; }
  JudgeVerdict judge(const JudgeInput &) const override { return JudgeVerdict::decided(slot_); }

private:
  Slot slot_;
};

/// Feature layout (kFeatureDim = 24):
///   [0, 6)   slot A: EP, LK, min clearance to agents, max lateral offset,
///            progress meters, max |accel|
///   [6, 12)  slot B: same order
///   [12, 18) A minus B
///   [18, 22) driving command one-hot: left, straight, right, unknown
///   22       ego velocity
///   23       ego acceleration
/// ABSENT EP or LK encode as 0. Clearance is capped at kClearanceCap and
/// equals it without agents; lateral offset is 0 without route lanes.
inline constexpr std::size_t kFeatureDim = 24;
inline constexpr std::size_t kSlotFeatureDim = 6;
inline constexpr double kClearanceCap = 50.0;
using FeatureVector = std::array<double, kFeatureDim>;

FeatureVector extract_features(const JudgeInput & input);

enum class FeatureMode {
  /// Deltas and deltas scaled by ego velocity, no bias: swapping slots
  /// negates the logit exactly.
  kAntisymmetric,
  /// All 24 features standardized, with bias.
  kRaw,
};

std::string_view to_string(FeatureMode m);
FeatureMode feature_mode_from_string(std::string_view s);

/// Model-side design vector before scaling.
std::vector<double> design_vector(const FeatureVector & f, FeatureMode mode);

struct LossGradient
{
  double loss{0.0};
  std::vector<double> gradient;
};

/// Mean binary cross-entropy of sigmoid(x . w) against y in {0, 1}, plus
/// (l2 / 2) * |w|^2 over non-bias weights. With has_bias the last weight is a
/// bias and each row is implicitly extended by a trailing 1.
LossGradient logistic_loss_and_gradient(
  const std::vector<std::vector<double>> & x, const std::vector<double> & y,
  const std::vector<double> & w, double l2, bool has_bias);

struct ClassifierModel
{
  FeatureMode mode{FeatureMode::kAntisymmetric};
  std::vector<double> center;
  std::vector<double> scale;
  std::vector<double> weights;
  double bias{0.0};

  /// Logit for "slot A preferred".
  double logit(const FeatureVector & f) const;
};

void to_json(json & j, const ClassifierModel & m);
void from_json(const json & j, ClassifierModel & m);
void save_classifier(const ClassifierModel & m, const std::filesystem::path & path);
ClassifierModel load_classifier(const std::filesystem::path & path);

struct TrainParams
{
  FeatureMode mode{FeatureMode::kAntisymmetric};
  double learning_rate{0.5};
  int iterations{500};
  double l2{1e-4};
  std::uint64_t seed{0};
  /// Standard deviation of the initial weights; 0 starts from zero.
  double init_scale{0.0};
};

struct LabeledExample
{
  FeatureVector features{};
  Slot label{Slot::kA};
};

struct TrainResult
{
  ClassifierModel model;
  double final_loss{0.0};
  double train_accuracy{0.0};
};

/// Full-batch gradient descent. Throws PreconditionError unless both labels
/// occur.
TrainResult train_classifier(const std::vector<LabeledExample> & examples, const TrainParams & params);

/// Examples for every A/B-labeled pair whose scene is in `scenes`.
std::vector<LabeledExample> make_examples(
  const std::vector<PreferencePair> & pairs, const std::map<std::string, Scene> & scenes);

class ClassifierJudge : public Judge
{
public:
  explicit ClassifierJudge(ClassifierModel model) : model_(std::move(model)) {}
  std::string name() const override { return "classifier"; }
  /// Slot A iff the A-probability is at least 0.5; confidence is the
  /// probability of the chosen slot.
  JudgeVerdict judge(const JudgeInput & input) const override;
  const ClassifierModel & model() const { return model_; }

private:
  ClassifierModel model_;
};

}  // namespace critic_bench

#endif  // CRITIC_BENCH__JUDGES_HPP_
