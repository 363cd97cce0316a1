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

#include "critic_bench/labeling.hpp"

#include "critic_bench/errors.hpp"
#include "critic_bench/parallel.hpp"
#include "critic_bench/scene_io.hpp"

#include <fmt/format.h>

namespace critic_bench
{

ExportHeader export_header(Split split, const std::vector<PreferencePair> & pairs)
{
  ExportHeader h;
  h.split = split;
  h.n_pairs = pairs.size();
  for (const auto & p : pairs) {
    switch (p.label) {
      case Label::kA:
      case Label::kB:
        ++h.labeled;
        break;
      case Label::kDiscarded:
        ++h.discarded;
        break;
      case Label::kUnlabeled:
        ++h.unlabeled;
        break;
    }
  }
  return h;
}

std::string export_jsonl(Split split, const std::vector<PreferencePair> & pairs)
{
  const auto h = export_header(split, pairs);
  const json header = {
    {"schema", kApiSchema},
    {"kind", "export"},
    {"split", to_string(h.split)},
    {"n_pairs", h.n_pairs},
    {"labeled", h.labeled},
    {"discarded", h.discarded},
    {"excluded", h.discarded},
    {"unlabeled", h.unlabeled},
  };
  return header.dump() + "\n" + pairs_to_jsonl(pairs);
}

LabelExport parse_export(const std::string & text)
{
  const auto rows = parse_jsonl(text);
  if (rows.empty() || !rows.front().is_object() || rows.front().value("schema", "") != kApiSchema ||
      rows.front().value("kind", "") != "export") {
    throw DataError("export: missing critic-bench/api/v1 export header");
  }
  LabelExport out;
  try {
    out.header.split = split_from_string(rows.front().at("split").get<std::string>());
    for (std::size_t i = 1; i < rows.size(); ++i) {
      out.pairs.push_back(rows[i].get<PreferencePair>());
    }
  } catch (const json::exception & e) {
    throw DataError(fmt::format("export: {}", e.what()));
  }
  const auto expected = export_header(out.header.split, out.pairs);
  const auto & h = rows.front();
  if (h.value("n_pairs", std::size_t{0}) != expected.n_pairs || h.value("labeled", std::size_t{0}) != expected.labeled ||
      h.value("discarded", std::size_t{0}) != expected.discarded ||
      h.value("unlabeled", std::size_t{0}) != expected.unlabeled) {
    throw DataError("export: header counts do not match the rows");
  }
  out.header = expected;
  return out;
}

namespace
{

bool same_candidate(const CandidateRef & a, const CandidateRef & b)
{
  return a.kind == b.kind && a.vocab_index == b.vocab_index && a.trajectory == b.trajectory;
}

}  // namespace

std::vector<PreferencePair> merge_labels(
  std::vector<PreferencePair> pairs, const std::vector<PreferencePair> & labeled)
{
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    index[pairs[i].pair_id] = i;
  }
  for (const auto & row : labeled) {
    const auto it = index.find(row.pair_id);
    if (it == index.end()) {
      throw DataError(fmt::format("labels: pair {} is not in the pair set", row.pair_id));
    }
    auto & p = pairs[it->second];
    if (row.human_slot != p.human_slot || !same_candidate(row.slot_a, p.slot_a) ||
        !same_candidate(row.slot_b, p.slot_b)) {
      throw DataError(fmt::format("labels: pair {} does not match the mined pair", row.pair_id));
    }
    p.label = row.label;
    p.label_source = row.label_source;
  }
  return pairs;
}

std::vector<PreferencePair> simulated_expert_labels(std::vector<PreferencePair> pairs)
{
  for (auto & p : pairs) {
    if (p.label == Label::kUnlabeled) {
      p.label = to_label(p.human_slot);
      p.label_source = LabelSource::kSimulatedExpert;
    }
  }
  return pairs;
}

std::size_t judge_labels(
  std::vector<PreferencePair> & pairs, const Judge & judge, const std::map<std::string, Scene> & scenes,
  const std::function<bool(const PreferencePair &)> & select, const EvalOptions & options)
{
  std::vector<std::size_t> targets;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].label == Label::kUnlabeled && select(pairs[i])) {
      if (!scenes.count(pairs[i].scene_id)) {
        throw DataError(fmt::format("pair {}: scene {} not found", pairs[i].pair_id, pairs[i].scene_id));
      }
      targets.push_back(i);
    }
  }
  std::size_t workers = resolve_workers(options.workers);
  if (judge.max_concurrency() > 0) {
    workers = std::min(workers, judge.max_concurrency());
  }
  std::vector<JudgeVerdict> verdicts(targets.size());
  parallel_for(targets.size(), workers, [&](std::size_t k) {
    const auto & p = pairs[targets[k]];
    const Scene & scene = scenes.at(p.scene_id);
    JudgeInput in = make_judge_input(p, scene);
    if (judge.needs_renders()) {
      auto [a, b] = render_pair(scene, p, options.render);
      in.bev_a = std::move(a);
      in.bev_b = std::move(b);
    }
    verdicts[k] = judge.judge(in);
  });
  std::size_t n = 0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (verdicts[k].parse_status == ParseStatus::kOk && verdicts[k].choice) {
      auto & p = pairs[targets[k]];
      p.label = to_label(*verdicts[k].choice);
      p.label_source = LabelSource::kLlmAnnotator;
      ++n;
    }
  }
  return n;
}

}  // namespace critic_bench
