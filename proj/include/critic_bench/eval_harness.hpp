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

#ifndef CRITIC_BENCH__EVAL_HARNESS_HPP_
#define CRITIC_BENCH__EVAL_HARNESS_HPP_

#include "critic_bench/bev_render.hpp"
#include "critic_bench/judges.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace critic_bench
{

struct EvalOptions
{
  RenderSpec render;
  /// 0 selects the hardware concurrency; capped by the judge's own limit.
  std::size_t workers{0};
};

/// Verdicts for one pair: original presentation and, with flip, the swapped one.
struct PairVerdicts
{
  JudgeVerdict original;
  std::optional<JudgeVerdict> flipped;
};

/// Judges every pair (and its slot swap when `flip`), rendering BEV images
/// per presentation when the judge needs them. Output order follows input.
/// Throws PreconditionError on an empty set or a pair not labeled A/B, and
/// DataError when a scene is missing.
std::vector<PairVerdicts> collect_verdicts(
  const Judge & judge, const std::vector<PreferencePair> & pairs,
  const std::map<std::string, Scene> & scenes, bool flip, const EvalOptions & options = {});

struct EvalRow
{
  std::string pair_id;
  PairCase pair_case{PairCase::kCase1};
  Slot label{Slot::kA};  ///< letter in the original presentation
  std::optional<Slot> y;
  std::optional<Slot> y_flip;  ///< letter in the swapped presentation
  bool correct{false};
  std::optional<bool> correct_flip;
  std::optional<bool> consistent;
  ParseStatus status{ParseStatus::kOk};
  std::optional<ParseStatus> status_flip;

  friend bool operator==(const EvalRow &, const EvalRow &) = default;
};

struct CaseStats
{
  std::size_t n{0};
  std::size_t correct{0};
  double accuracy{0.0};
  std::optional<std::size_t> correct_flip;
  std::optional<double> flip_accuracy;
  std::optional<std::size_t> consistent;
  std::optional<double> rr;

  friend bool operator==(const CaseStats &, const CaseStats &) = default;
};

/// Accuracy is the mean of `correct`, rr the mean of `consistent`. Verdicts
/// that are not ok count as incorrect and inconsistent.
struct EvalReport
{
  std::string judge;
  std::size_t n_pairs{0};
  double accuracy{0.0};
  std::optional<double> flip_accuracy;
  std::optional<double> rr;
  /// Keyed by case wire name (case1, case1_mirror, case2).
  std::map<std::string, CaseStats> per_case;
  std::vector<EvalRow> rows;

  friend bool operator==(const EvalReport &, const EvalReport &) = default;
};

EvalReport summarize(
  const std::string & judge_name, const std::vector<PreferencePair> & pairs,
  const std::vector<PairVerdicts> & verdicts);

EvalReport evaluate(
  const Judge & judge, const std::vector<PreferencePair> & pairs,
  const std::map<std::string, Scene> & scenes, const EvalOptions & options = {});

EvalReport evaluate_with_flip(
  const Judge & judge, const std::vector<PreferencePair> & pairs,
  const std::map<std::string, Scene> & scenes, const EvalOptions & options = {});

/// A/B-labeled pairs only; discarded and unlabeled pairs are dropped.
std::vector<PreferencePair> labeled_pairs(const std::vector<PreferencePair> & pairs);

enum class ReportFormat { kTable, kJson };

/// Table: summary lines, then a per-case block with a total row (omitted
/// when per_case is empty). JSON: schema critic-bench/report/v1.
std::string render_report(const EvalReport & report, ReportFormat format);

void to_json(json & j, const EvalReport & r);
void from_json(const json & j, EvalReport & r);
EvalReport parse_report(const std::string & text);

}  // namespace critic_bench

#endif  // CRITIC_BENCH__EVAL_HARNESS_HPP_
