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

#ifndef CRITIC_BENCH__LABELING_HPP_
#define CRITIC_BENCH__LABELING_HPP_

#include "critic_bench/eval_harness.hpp"
#include "critic_bench/judges.hpp"
#include "critic_bench/miner.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace critic_bench
{

inline constexpr const char * kApiSchema = "critic-bench/api/v1";

struct ExportHeader
{
  Split split{Split::kTest};
  std::size_t n_pairs{0};
  std::size_t labeled{0};    ///< A or B
  std::size_t discarded{0};  ///< flagged; excluded from evaluation by default
  std::size_t unlabeled{0};

  friend bool operator==(const ExportHeader &, const ExportHeader &) = default;
};

struct LabelExport
{
  ExportHeader header;
  std::vector<PreferencePair> pairs;
};

ExportHeader export_header(Split split, const std::vector<PreferencePair> & pairs);

/// Header line {"schema": "critic-bench/api/v1", "kind": "export", ...}
/// followed by one PreferencePair per line.
std::string export_jsonl(Split split, const std::vector<PreferencePair> & pairs);

/// Inverse of export_jsonl. Throws DataError when the header is missing or
/// its counts disagree with the rows.
LabelExport parse_export(const std::string & text);

/// Copies label and label_source from `labeled` onto the matching pairs (by
/// pair_id). Unmatched pairs are unchanged. Throws DataError when a labeled
/// row does not match its pair's candidates and slots, or names no pair.
std::vector<PreferencePair> merge_labels(
  std::vector<PreferencePair> pairs, const std::vector<PreferencePair> & labeled);

/// Labels every unlabeled pair with its human slot (source simulated_expert).
std::vector<PreferencePair> simulated_expert_labels(std::vector<PreferencePair> pairs);

/// Labels the unlabeled pairs selected by `select` with the judge's choice
/// (source llm_annotator). Pairs whose verdict is not ok stay unlabeled.
/// Returns the number of pairs labeled.
std::size_t judge_labels(
  std::vector<PreferencePair> & pairs, const Judge & judge, const std::map<std::string, Scene> & scenes,
  const std::function<bool(const PreferencePair &)> & select, const EvalOptions & options = {});

}  // namespace critic_bench

#endif  // CRITIC_BENCH__LABELING_HPP_
