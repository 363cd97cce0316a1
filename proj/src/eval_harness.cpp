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

#include "critic_bench/eval_harness.hpp"

#include "critic_bench/errors.hpp"
#include "critic_bench/parallel.hpp"

#include <fmt/format.h>

namespace critic_bench
{

namespace
{

Slot label_slot(const PreferencePair & p)
{
  if (p.label == Label::kA) {
    return Slot::kA;
  }
  if (p.label == Label::kB) {
    return Slot::kB;
  }
  throw PreconditionError(fmt::format("pair {} is not labeled A or B", p.pair_id));
}

double ratio(std::size_t num, std::size_t den)
{
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::vector<PairVerdicts> collect_verdicts(
  const Judge & judge, const std::vector<PreferencePair> & pairs,
  const std::map<std::string, Scene> & scenes, bool flip, const EvalOptions & options)
{
  if (pairs.empty()) {
    throw PreconditionError("evaluation needs at least one pair");
  }
  for (const auto & p : pairs) {
    label_slot(p);
    if (!scenes.count(p.scene_id)) {
      throw DataError(fmt::format("pair {}: scene {} not found", p.pair_id, p.scene_id));
    }
  }
  std::size_t workers = resolve_workers(options.workers);
  if (judge.max_concurrency() > 0) {
    workers = std::min(workers, judge.max_concurrency());
  }
  const bool renders = judge.needs_renders();
  std::vector<PairVerdicts> out(pairs.size());
  parallel_for(pairs.size(), workers, [&](std::size_t i) {
    const auto & pair = pairs[i];
    const Scene & scene = scenes.at(pair.scene_id);
    auto judge_one = [&](const PreferencePair & presented) {
      JudgeInput in = make_judge_input(presented, scene);
      if (renders) {
        auto [a, b] = render_pair(scene, presented, options.render);
        in.bev_a = std::move(a);
        in.bev_b = std::move(b);
      }
      return judge.judge(in);
    };
    out[i].original = judge_one(pair);
    if (flip) {
      out[i].flipped = judge_one(flipped(pair));
    }
  });
  return out;
}

EvalReport summarize(
  const std::string & judge_name, const std::vector<PreferencePair> & pairs,
  const std::vector<PairVerdicts> & verdicts)
{
  if (pairs.empty()) {
    throw PreconditionError("evaluation needs at least one pair");
  }
  if (pairs.size() != verdicts.size()) {
    throw PreconditionError("summarize: one verdict entry per pair required");
  }
  const bool flip = verdicts.front().flipped.has_value();
  EvalReport r;
  r.judge = judge_name;
  r.n_pairs = pairs.size();
  std::size_t correct = 0;
  std::size_t correct_flip = 0;
  std::size_t consistent = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto & p = pairs[i];
    const auto & v = verdicts[i];
    if (v.flipped.has_value() != flip) {
      throw PreconditionError("summarize: flip verdicts must be present for all pairs or none");
    }
    EvalRow row;
    row.pair_id = p.pair_id;
    row.pair_case = p.pair_case;
    row.label = label_slot(p);
    row.status = v.original.parse_status;
    if (v.original.parse_status == ParseStatus::kOk) {
      row.y = v.original.choice;
    }
    row.correct = row.y && *row.y == row.label;
    auto & stats = r.per_case[std::string(to_string(p.pair_case))];
    ++stats.n;
    stats.correct += row.correct ? 1 : 0;
    correct += row.correct ? 1 : 0;
    if (flip) {
      row.status_flip = v.flipped->parse_status;
      if (v.flipped->parse_status == ParseStatus::kOk) {
        row.y_flip = v.flipped->choice;
      }
      // The swapped presentation carries the label under the other letter.
      row.correct_flip = row.y_flip && *row.y_flip == other(row.label);
      row.consistent = row.y && row.y_flip && *row.y_flip == other(*row.y);
      stats.correct_flip = stats.correct_flip.value_or(0) + (*row.correct_flip ? 1 : 0);
      stats.consistent = stats.consistent.value_or(0) + (*row.consistent ? 1 : 0);
      correct_flip += *row.correct_flip ? 1 : 0;
      consistent += *row.consistent ? 1 : 0;
    }
    r.rows.push_back(std::move(row));
  }
  r.accuracy = ratio(correct, r.n_pairs);
  if (flip) {
    r.flip_accuracy = ratio(correct_flip, r.n_pairs);
    r.rr = ratio(consistent, r.n_pairs);
  }
  for (auto & [_, s] : r.per_case) {
    s.accuracy = ratio(s.correct, s.n);
    if (flip) {
      s.flip_accuracy = ratio(*s.correct_flip, s.n);
      s.rr = ratio(*s.consistent, s.n);
    }
  }
  return r;
}

EvalReport evaluate(
  const Judge & judge, const std::vector<PreferencePair> & pairs,
  const std::map<std::string, Scene> & scenes, const EvalOptions & options)
{
  return summarize(judge.name(), pairs, collect_verdicts(judge, pairs, scenes, false, options));
}

EvalReport evaluate_with_flip(
  const Judge & judge, const std::vector<PreferencePair> & pairs,
  const std::map<std::string, Scene> & scenes, const EvalOptions & options)
{
  return summarize(judge.name(), pairs, collect_verdicts(judge, pairs, scenes, true, options));
}

std::vector<PreferencePair> labeled_pairs(const std::vector<PreferencePair> & pairs)
{
  std::vector<PreferencePair> out;
  for (const auto & p : pairs) {
    if (p.label == Label::kA || p.label == Label::kB) {
      out.push_back(p);
    }
  }
  return out;
}

// Report rendering

namespace
{

std::string fmt_opt(const std::optional<double> & v) { return v ? fmt::format("{:.4f}", *v) : "-"; }

template <typename T>
json opt_json(const std::optional<T> & v)
{
  return v ? json(*v) : json(nullptr);
}

template <typename T>
void put_opt(json & j, const char * key, const std::optional<T> & v)
{
  if (v) {
    j[key] = *v;
  }
}

template <typename T>
std::optional<T> get_opt(const json & j, const char * key)
{
  if (!j.contains(key) || j.at(key).is_null()) {
    return std::nullopt;
  }
  return j.at(key).get<T>();
}

std::optional<Slot> get_slot(const json & j, const char * key)
{
  const auto s = get_opt<std::string>(j, key);
  return s ? std::optional<Slot>(slot_from_string(*s)) : std::nullopt;
}

}  // namespace

void to_json(json & j, const EvalReport & r)
{
  j = json::object();
  j["schema"] = "critic-bench/report/v1";
  j["judge"] = r.judge;
  j["n_pairs"] = r.n_pairs;
  j["accuracy"] = r.accuracy;
  put_opt(j, "flip_accuracy", r.flip_accuracy);
  put_opt(j, "rr", r.rr);
  if (!r.per_case.empty()) {
    json cases = json::object();
    for (const auto & [name, s] : r.per_case) {
      json c = {{"n", s.n}, {"correct", s.correct}, {"accuracy", s.accuracy}};
      put_opt(c, "correct_flip", s.correct_flip);
      put_opt(c, "flip_accuracy", s.flip_accuracy);
      put_opt(c, "consistent", s.consistent);
      put_opt(c, "rr", s.rr);
      cases[name] = std::move(c);
    }
    j["per_case"] = std::move(cases);
  }
  json rows = json::array();
  for (const auto & row : r.rows) {
    json o = {
      {"pair_id", row.pair_id},
      {"case", to_string(row.pair_case)},
      {"label", to_string(row.label)},
      {"y", row.y ? json(to_string(*row.y)) : json(nullptr)},
      {"correct", row.correct},
      {"status", to_string(row.status)},
    };
    if (row.status_flip) {
      o["y_flip"] = row.y_flip ? json(to_string(*row.y_flip)) : json(nullptr);
      o["correct_flip"] = opt_json(row.correct_flip);
      o["consistent"] = opt_json(row.consistent);
      o["status_flip"] = to_string(*row.status_flip);
    }
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
}

void from_json(const json & j, EvalReport & r)
{
  if (j.value("schema", "") != "critic-bench/report/v1") {
    throw DataError("report: unsupported schema");
  }
  r = EvalReport{};
  r.judge = j.at("judge").get<std::string>();
  r.n_pairs = j.at("n_pairs").get<std::size_t>();
  r.accuracy = j.at("accuracy").get<double>();
  r.flip_accuracy = get_opt<double>(j, "flip_accuracy");
  r.rr = get_opt<double>(j, "rr");
  if (j.contains("per_case")) {
    for (const auto & [name, c] : j.at("per_case").items()) {
      CaseStats s;
      s.n = c.at("n").get<std::size_t>();
      s.correct = c.at("correct").get<std::size_t>();
      s.accuracy = c.at("accuracy").get<double>();
      s.correct_flip = get_opt<std::size_t>(c, "correct_flip");
      s.flip_accuracy = get_opt<double>(c, "flip_accuracy");
      s.consistent = get_opt<std::size_t>(c, "consistent");
      s.rr = get_opt<double>(c, "rr");
      r.per_case[name] = s;
    }
  }
  for (const auto & o : j.at("rows")) {
    EvalRow row;
    row.pair_id = o.at("pair_id").get<std::string>();
    row.pair_case = pair_case_from_string(o.at("case").get<std::string>());
    row.label = slot_from_string(o.at("label").get<std::string>());
    row.y = get_slot(o, "y");
    row.correct = o.at("correct").get<bool>();
    row.status = parse_status_from_string(o.at("status").get<std::string>());
    if (o.contains("status_flip")) {
      row.status_flip = parse_status_from_string(o.at("status_flip").get<std::string>());
      row.y_flip = get_slot(o, "y_flip");
      row.correct_flip = get_opt<bool>(o, "correct_flip");
      row.consistent = get_opt<bool>(o, "consistent");
    }
    r.rows.push_back(std::move(row));
  }
  if (r.rows.size() != r.n_pairs) {
    throw DataError("report: row count does not match n_pairs");
  }
}

EvalReport parse_report(const std::string & text)
{
  try {
    return json::parse(text).get<EvalReport>();
  } catch (const json::exception & e) {
    throw DataError(fmt::format("report: {}", e.what()));
  }
}

std::string render_report(const EvalReport & r, ReportFormat format)
{
  if (format == ReportFormat::kJson) {
    return json(r).dump(2) + "\n";
  }
  std::string out;
  out += fmt::format("{:<16}{}\n", "judge", r.judge);
  out += fmt::format("{:<16}{}\n", "pairs", r.n_pairs);
  out += fmt::format("{:<16}{:.4f}\n", "accuracy", r.accuracy);
  if (r.flip_accuracy) {
    out += fmt::format("{:<16}{:.4f}\n", "flip accuracy", *r.flip_accuracy);
  }
  if (r.rr) {
    out += fmt::format("{:<16}{:.4f}\n", "robustness rate", *r.rr);
  }
  if (r.per_case.empty()) {
    return out;
  }
  out += "\n";
  out += fmt::format("{:<14}{:>7}{:>10}{:>10}{:>10}\n", "case", "pairs", "accuracy", "flip_acc", "rr");
  std::size_t n = 0;
  for (const auto & [name, s] : r.per_case) {
    out += fmt::format(
      "{:<14}{:>7}{:>10}{:>10}{:>10}\n", name, s.n, fmt::format("{:.4f}", s.accuracy),
      fmt_opt(s.flip_accuracy), fmt_opt(s.rr));
    n += s.n;
  }
  out += fmt::format(
    "{:<14}{:>7}{:>10}{:>10}{:>10}\n", "total", n, fmt::format("{:.4f}", r.accuracy),
    fmt_opt(r.flip_accuracy), fmt_opt(r.rr));
  return out;
}

}  // namespace critic_bench
