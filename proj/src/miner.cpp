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

#include "critic_bench/miner.hpp"

#include "critic_bench/errors.hpp"
#include "critic_bench/hashing.hpp"
#include "critic_bench/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <random>
#include <set>

namespace critic_bench
{

void MiningThresholds::validate() const
{
  if (!(0.0 < tau_ep2 && tau_ep2 <= tau_ep1 && tau_ep1 <= 1.0)) {
    throw ConfigError(
      fmt::format("thresholds need 0 < tau_ep2 <= tau_ep1 <= 1, got {} / {}", tau_ep2, tau_ep1));
  }
  if (!(0.0 < delta_ep && delta_ep < 1.0)) {
    throw ConfigError(fmt::format("delta_ep must lie in (0, 1), got {}", delta_ep));
  }
  if (max_pairs_per_scene == 0) {
    throw ConfigError("max_pairs_per_scene must be >= 1");
  }
}

namespace
{

template <typename E, std::size_t N>
std::string_view enum_name(E v, const std::array<std::pair<E, std::string_view>, N> & table)
{
  for (const auto & [e, name] : table) {
    if (e == v) {
      return name;
    }
  }
  return "?";
}

template <typename E, std::size_t N>
E enum_parse(
  std::string_view s, const std::array<std::pair<E, std::string_view>, N> & table,
  std::string_view what)
{
  for (const auto & [e, name] : table) {
    if (name == s) {
      return e;
    }
  }
  throw DataError(fmt::format("{}: unknown value '{}'", what, s));
}

constexpr std::array<std::pair<PairCase, std::string_view>, 3> kCases{{
  {PairCase::kCase1, "case1"}, {PairCase::kCase1Mirror, "case1_mirror"}, {PairCase::kCase2, "case2"}}};
constexpr std::array<std::pair<Slot, std::string_view>, 2> kSlots{{{Slot::kA, "A"}, {Slot::kB, "B"}}};
constexpr std::array<std::pair<Label, std::string_view>, 4> kLabels{{
  {Label::kA, "A"}, {Label::kB, "B"}, {Label::kDiscarded, "discarded"},
  {Label::kUnlabeled, "unlabeled"}}};
constexpr std::array<std::pair<LabelSource, std::string_view>, 4> kSources{{
  {LabelSource::kExpert, "expert"}, {LabelSource::kPseudoCase1, "pseudo_case1"},
  {LabelSource::kLlmAnnotator, "llm_annotator"}, {LabelSource::kSimulatedExpert, "simulated_expert"}}};
constexpr std::array<std::pair<CandidateKind, std::string_view>, 2> kKinds{{
  {CandidateKind::kHuman, "human"}, {CandidateKind::kVocabulary, "vocabulary"}}};
constexpr std::array<std::pair<Split, std::string_view>, 2> kSplits{{
  {Split::kTrain, "train"}, {Split::kTest, "test"}}};

}  // namespace

std::string_view to_string(PairCase c) { return enum_name(c, kCases); }
std::string_view to_string(Slot s) { return enum_name(s, kSlots); }
std::string_view to_string(Label l) { return enum_name(l, kLabels); }
std::string_view to_string(LabelSource s) { return enum_name(s, kSources); }
std::string_view to_string(CandidateKind k) { return enum_name(k, kKinds); }
std::string_view to_string(Split s) { return enum_name(s, kSplits); }
PairCase pair_case_from_string(std::string_view s) { return enum_parse(s, kCases, "case"); }
Slot slot_from_string(std::string_view s) { return enum_parse(s, kSlots, "slot"); }
Label label_from_string(std::string_view s) { return enum_parse(s, kLabels, "label"); }
LabelSource label_source_from_string(std::string_view s)
{
  return enum_parse(s, kSources, "label_source");
}
CandidateKind candidate_kind_from_string(std::string_view s)
{
  return enum_parse(s, kKinds, "kind");
}
Split split_from_string(std::string_view s) { return enum_parse(s, kSplits, "split"); }

std::optional<CandidateKind> PreferencePair::preferred_kind() const
{
  if (label == Label::kA || label == Label::kB) {
    const Slot chosen = label == Label::kA ? Slot::kA : Slot::kB;
    return candidate(chosen).kind;
  }
  return std::nullopt;
}

bool others_perfect(const SubScores & s)
{
  const auto continuous_ok = [](const std::optional<double> & v) { return !v || *v >= 0.999; };
  return s.nc == 1.0 && s.dac == 1.0 && s.ddc == 1.0 && s.tlc == 1.0 && (!s.ttc || *s.ttc == 1.0) &&
         continuous_ok(s.hc) && continuous_ok(s.ec);
}

namespace
{

struct Match
{
  std::size_t index;
  double distance;  ///< from the EP bound; smaller is nearer
};

std::string pair_id_for(const std::string & scene_id, PairCase c, std::size_t rank)
{
  if (rank == 0) {
    return fmt::format("{}:{}", scene_id, to_string(c));
  }
  return fmt::format("{}:{}:{}", scene_id, to_string(c), rank);
}

// Collects vocabulary entries accepted by `accept`, orders them by distance to
// the EP bound then index, and emits up to max_pairs drafts.
template <typename Accept>
void emit(
  const MiningInput & in, const MiningThresholds & th, PairCase c, Accept && accept,
  std::vector<PairDraft> & out)
{
  std::vector<Match> matches;
  for (const auto & entry : *in.scored) {
    if (!entry.scores) {
      continue;
    }
    if (const auto d = accept(*entry.scores)) {
      matches.push_back({entry.index, *d});
    }
  }
  std::sort(matches.begin(), matches.end(), [](const Match & a, const Match & b) {
    return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
  });
  const std::size_t n = std::min(matches.size(), th.max_pairs_per_scene);
  for (std::size_t r = 0; r < n; ++r) {
    const auto & m = matches[r];
    PairDraft d;
    d.pair_id = pair_id_for(in.scene_id, c, r);
    d.scene_id = in.scene_id;
    d.pair_case = c;
    d.human = {CandidateKind::kHuman, std::nullopt, in.human_trajectory, in.human_scores};
    d.vocab = {
      CandidateKind::kVocabulary, m.index, in.vocab->entries[m.index].trajectory,
      *(*in.scored)[m.index].scores};
    out.push_back(std::move(d));
  }
}

}  // namespace

std::vector<PairDraft> mine_case1(const MiningInput & in, const MiningThresholds & th)
{
  std::vector<PairDraft> out;
  const auto & h = in.human_scores;
  if (!h.ep || !h.lk || !others_perfect(h)) {
    return out;
  }
  const double ep_h = *h.ep;
  if (*h.lk == 0.0 && ep_h >= th.tau_ep1) {
    emit(in, th, PairCase::kCase1, [&](const SubScores & v) -> std::optional<double> {
      if (v.lk && *v.lk == 1.0 && v.ep && ep_h - *v.ep >= th.delta_ep && others_perfect(v)) {
        return ep_h - *v.ep - th.delta_ep;
      }
      return std::nullopt;
    }, out);
  }
  if (*h.lk == 1.0 && ep_h <= th.tau_ep2) {
    emit(in, th, PairCase::kCase1Mirror, [&](const SubScores & v) -> std::optional<double> {
      if (v.lk && *v.lk == 0.0 && v.ep && *v.ep - ep_h >= th.delta_ep && others_perfect(v)) {
        return *v.ep - ep_h - th.delta_ep;
      }
      return std::nullopt;
    }, out);
  }
  return out;
}

std::vector<PairDraft> mine_case2(const MiningInput & in, const MiningThresholds & th)
{
  std::vector<PairDraft> out;
  const auto & h = in.human_scores;
  if (!h.ep || !h.lk || *h.lk != 1.0 || !others_perfect(h) || *h.ep > th.tau_ep2) {
    return out;
  }
  const double ep_h = *h.ep;
  emit(in, th, PairCase::kCase2, [&](const SubScores & v) -> std::optional<double> {
    if (v.lk && *v.lk == 1.0 && v.ep && *v.ep - ep_h >= th.delta_ep && others_perfect(v)) {
      return *v.ep - ep_h - th.delta_ep;
    }
    return std::nullopt;
  }, out);
  return out;
}

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view pair_id)
{
  return splitmix64(global_seed ^ fnv1a64(pair_id));
}

PreferencePair assign_slots(const PairDraft & draft, std::uint64_t rng_seed)
{
  std::mt19937_64 gen(rng_seed);
  const bool human_first = (gen() >> 63) != 0;
  PreferencePair p;
  p.pair_id = draft.pair_id;
  p.scene_id = draft.scene_id;
  p.pair_case = draft.pair_case;
  p.human_slot = human_first ? Slot::kA : Slot::kB;
  p.slot_a = human_first ? draft.human : draft.vocab;
  p.slot_b = human_first ? draft.vocab : draft.human;
  p.rng_seed = rng_seed;
  return p;
}

std::vector<PreferencePair> pseudo_label_case1(std::vector<PreferencePair> pairs)
{
  for (const auto & p : pairs) {
    if (!is_case1(p.pair_case)) {
      throw PreconditionError(fmt::format("pseudo_label_case1: pair '{}' is case2", p.pair_id));
    }
    if (p.label != Label::kUnlabeled) {
      throw PreconditionError(fmt::format("pseudo_label_case1: pair '{}' is labeled", p.pair_id));
    }
  }
  for (auto & p : pairs) {
    p.label = to_label(p.human_slot);
    p.label_source = LabelSource::kPseudoCase1;
  }
  return pairs;
}

PreferencePair flipped(const PreferencePair & pair)
{
  PreferencePair f = pair;
  std::swap(f.slot_a, f.slot_b);
  f.human_slot = other(pair.human_slot);
  if (pair.label == Label::kA) {
    f.label = Label::kB;
  } else if (pair.label == Label::kB) {
    f.label = Label::kA;
  }
  return f;
}

std::vector<PairDraft> mine_scene(
  const Scene & scene, const Vocabulary & vocab, const MiningThresholds & th,
  const MetricConfig & config)
{
  const PreparedScene prepared(scene);
  const SubScores human = score_human(prepared, config);
  const auto scored = score_vocabulary(prepared, vocab, config, 1);
  const MiningInput in{scene.scene_id, human, scene.human_trajectory, &vocab, &scored};
  auto drafts = mine_case1(in, th);
  auto c2 = mine_case2(in, th);
  drafts.insert(drafts.end(), std::make_move_iterator(c2.begin()), std::make_move_iterator(c2.end()));
  return drafts;
}

CaseCounts count_cases(const std::vector<PreferencePair> & pairs)
{
  CaseCounts c;
  for (const auto & p : pairs) {
    if (p.pair_case == PairCase::kCase2) {
      ++c.case2;
    } else {
      ++c.case1;
      c.case1_mirror += p.pair_case == PairCase::kCase1Mirror;
    }
  }
  return c;
}

Dataset build_dataset(
  const std::vector<Scene> & scenes, const Vocabulary & vocab, const SplitAssignment & splits,
  const BuildOptions & options)
{
  options.thresholds.validate();
  options.metrics.validate();
  std::map<std::string, Split, std::less<>> split_of;
  for (const auto & id : splits.train) {
    split_of.emplace(id, Split::kTrain);
  }
  for (const auto & id : splits.test) {
    const auto [it, inserted] = split_of.emplace(id, Split::kTest);
    if (!inserted && it->second == Split::kTrain) {
      throw DataError(fmt::format("scene '{}' is assigned to both train and test", id));
    }
  }
  std::set<std::string> seen;
  for (const auto & s : scenes) {
    if (!seen.insert(s.scene_id).second) {
      throw DataError(fmt::format("duplicate scene id '{}'", s.scene_id));
    }
  }

  Dataset ds;
  ds.manifest.global_seed = options.global_seed;
  ds.manifest.thresholds = options.thresholds;
  ds.manifest.scenes = scenes.size();
  ds.pairs[Split::kTrain];
  ds.pairs[Split::kTest];

  std::vector<std::optional<std::vector<PairDraft>>> mined(scenes.size());
  std::vector<std::uint8_t> unscorable(scenes.size(), 0);
  parallel_for(scenes.size(), options.workers, [&](std::size_t i) {
    if (!split_of.contains(scenes[i].scene_id)) {
      return;
    }
    try {
      mined[i] = mine_scene(scenes[i], vocab, options.thresholds, options.metrics);
    } catch (const UndefinedScoreError &) {
      unscorable[i] = 1;
    }
  });

  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const auto it = split_of.find(scenes[i].scene_id);
    if (it == split_of.end()) {
      ++ds.manifest.unassigned_scenes;
      continue;
    }
    if (unscorable[i]) {
      ++ds.manifest.unscorable_scenes;
      continue;
    }
    for (const auto & d : *mined[i]) {
      ds.pairs[it->second].push_back(assign_slots(d, derive_seed(options.global_seed, d.pair_id)));
    }
  }

  auto & train = ds.pairs[Split::kTrain];
  std::vector<std::size_t> case1_rows;
  std::vector<PreferencePair> case1;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (is_case1(train[i].pair_case)) {
      case1_rows.push_back(i);
      case1.push_back(train[i]);
    }
  }
  case1 = pseudo_label_case1(std::move(case1));
  for (std::size_t k = 0; k < case1_rows.size(); ++k) {
    train[case1_rows[k]] = std::move(case1[k]);
  }

  for (const auto & [split, pairs] : ds.pairs) {
    ds.manifest.counts[split] = count_cases(pairs);
  }
  return ds;
}

// ---------------------------------------------------------------------------

void to_json(json & j, const CandidateRef & c)
{
  j = {
    {"kind", to_string(c.kind)},
    {"vocab_index", c.vocab_index ? json(*c.vocab_index) : json(nullptr)},
    {"trajectory", c.trajectory},
    {"sub_scores", c.sub_scores}};
}

void from_json(const json & j, CandidateRef & c)
{
  c.kind = candidate_kind_from_string(j.at("kind").get<std::string>());
  c.vocab_index.reset();
  if (j.contains("vocab_index") && !j["vocab_index"].is_null()) {
    c.vocab_index = j["vocab_index"].get<std::size_t>();
  }
  c.trajectory = j.at("trajectory").get<Trajectory>();
  c.sub_scores = j.at("sub_scores").get<SubScores>();
}

void to_json(json & j, const PreferencePair & p)
{
  j = {
    {"pair_id", p.pair_id},
    {"scene_id", p.scene_id},
    {"case", to_string(p.pair_case)},
    {"slot_a", p.slot_a},
    {"slot_b", p.slot_b},
    {"human_slot", to_string(p.human_slot)},
    {"label", to_string(p.label)},
    {"label_source", p.label_source ? json(to_string(*p.label_source)) : json(nullptr)},
    {"rng_seed", p.rng_seed}};
}

void from_json(const json & j, PreferencePair & p)
{
  p.pair_id = j.at("pair_id").get<std::string>();
  p.scene_id = j.at("scene_id").get<std::string>();
  p.pair_case = pair_case_from_string(j.at("case").get<std::string>());
  p.slot_a = j.at("slot_a").get<CandidateRef>();
  p.slot_b = j.at("slot_b").get<CandidateRef>();
  p.human_slot = slot_from_string(j.at("human_slot").get<std::string>());
  p.label = label_from_string(j.at("label").get<std::string>());
  p.label_source.reset();
  if (j.contains("label_source") && !j["label_source"].is_null()) {
    p.label_source = label_source_from_string(j["label_source"].get<std::string>());
  }
  p.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  if (p.candidate(p.human_slot).kind != CandidateKind::kHuman ||
      p.candidate(other(p.human_slot)).kind != CandidateKind::kVocabulary) {
    throw DataError(fmt::format("pair '{}': human_slot does not hold the human", p.pair_id));
  }
  const bool decided = p.label == Label::kA || p.label == Label::kB;
  if (decided != p.label_source.has_value()) {
    throw DataError(fmt::format("pair '{}': label_source must accompany an A/B label", p.pair_id));
  }
}

namespace
{

constexpr std::string_view kManifestSchema = "critic-bench/manifest/v1";

json counts_json(const CaseCounts & c)
{
  return {
    {"case1", c.case1}, {"case1_mirror", c.case1_mirror}, {"case2", c.case2}, {"total", c.total()}};
}

}  // namespace

json manifest_to_json(const DatasetManifest & m)
{
  json counts = json::object();
  CaseCounts total;
  for (const auto & [split, c] : m.counts) {
    counts[std::string(to_string(split))] = counts_json(c);
    total.case1 += c.case1;
    total.case1_mirror += c.case1_mirror;
    total.case2 += c.case2;
  }
  counts["total"] = counts_json(total);
  return {
    {"schema", kManifestSchema},
    {"scenes", m.scenes},
    {"unassigned_scenes", m.unassigned_scenes},
    {"unscorable_scenes", m.unscorable_scenes},
    {"global_seed", m.global_seed},
    {"thresholds",
     {{"tau_ep1", m.thresholds.tau_ep1},
      {"tau_ep2", m.thresholds.tau_ep2},
      {"delta_ep", m.thresholds.delta_ep},
      {"max_pairs_per_scene", m.thresholds.max_pairs_per_scene}}},
    {"counts", counts}};
}

DatasetManifest manifest_from_json(const json & j)
{
  if (j.value("schema", std::string{}) != kManifestSchema) {
    throw DataError(fmt::format("manifest: expected schema '{}'", kManifestSchema));
  }
  DatasetManifest m;
  try {
    m.scenes = j.at("scenes").get<std::size_t>();
    m.unassigned_scenes = j.at("unassigned_scenes").get<std::size_t>();
    m.unscorable_scenes = j.at("unscorable_scenes").get<std::size_t>();
    m.global_seed = j.at("global_seed").get<std::uint64_t>();
    const auto & t = j.at("thresholds");
    m.thresholds = {
      t.at("tau_ep1").get<double>(), t.at("tau_ep2").get<double>(), t.at("delta_ep").get<double>(),
      t.at("max_pairs_per_scene").get<std::size_t>()};
    for (const auto & [key, c] : j.at("counts").items()) {
      if (key == "total") {
        continue;
      }
      m.counts[split_from_string(key)] = {
        c.at("case1").get<std::size_t>(), c.at("case1_mirror").get<std::size_t>(),
        c.at("case2").get<std::size_t>()};
    }
  } catch (const json::exception & e) {
    throw DataError(fmt::format("manifest: {}", e.what()));
  }
  return m;
}

std::string format_manifest_table(const DatasetManifest & m)
{
  std::string out = fmt::format("{:<8}{:>10}{:>10}{:>10}\n", "Split", "Case 1", "Case 2", "Total");
  CaseCounts total;
  std::size_t mirror_train = 0;
  std::size_t mirror_test = 0;
  for (const Split s : {Split::kTrain, Split::kTest}) {
    const auto it = m.counts.find(s);
    const CaseCounts c = it == m.counts.end() ? CaseCounts{} : it->second;
    const auto name = s == Split::kTrain ? "Train" : "Test";
    out += fmt::format("{:<8}{:>10}{:>10}{:>10}\n", name, c.case1, c.case2, c.total());
    total.case1 += c.case1;
    total.case2 += c.case2;
    (s == Split::kTrain ? mirror_train : mirror_test) = c.case1_mirror;
  }
  out += fmt::format("{:<8}{:>10}{:>10}{:>10}\n", "Total", total.case1, total.case2, total.total());
  out += fmt::format("Case 1 mirror pairs: train {}, test {}\n", mirror_train, mirror_test);
  return out;
}

std::string pairs_to_jsonl(const std::vector<PreferencePair> & pairs)
{
  std::string out;
  for (const auto & p : pairs) {
    out += json(p).dump();
    out += '\n';
  }
  return out;
}

std::vector<PreferencePair> pairs_from_jsonl(const std::string & text)
{
  std::vector<PreferencePair> pairs;
  for (const auto & row : parse_jsonl(text)) {
    try {
      pairs.push_back(row.get<PreferencePair>());
    } catch (const json::exception & e) {
      throw DataError(fmt::format("pair row: {}", e.what()));
    }
  }
  return pairs;
}

void save_pairs(const std::filesystem::path & path, const std::vector<PreferencePair> & pairs)
{
  write_file(path, pairs_to_jsonl(pairs));
}

std::vector<PreferencePair> load_pairs(const std::filesystem::path & path)
{
  return pairs_from_jsonl(read_file(path));
}

SplitAssignment load_split_assignment(const std::filesystem::path & path)
{
  try {
    const auto j = json::parse(read_file(path));
    SplitAssignment s;
    s.train = j.value("train", std::vector<std::string>{});
    s.test = j.value("test", std::vector<std::string>{});
    return s;
  } catch (const json::exception & e) {
    throw ConfigError(fmt::format("split assignment '{}': {}", path.string(), e.what()));
  }
}

}  // namespace critic_bench
