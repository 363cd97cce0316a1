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

#include "critic_bench/pipeline.hpp"

#include "critic_bench/digest.hpp"
#include "critic_bench/errors.hpp"
#include "critic_bench/fixtures.hpp"
#include "critic_bench/judge_vlm.hpp"
#include "critic_bench/labeling.hpp"
#include "critic_bench/scene_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>

namespace critic_bench
{

namespace fs = std::filesystem;

void to_json(json & j, const Seeds & s)
{
  j = {{"global", s.global}, {"judge", s.judge}, {"classifier", s.classifier}};
}

namespace
{

json optional_path(const std::optional<fs::path> & p) { return p ? json(p->string()) : json(nullptr); }

json thresholds_json(const MiningThresholds & t)
{
  return {
    {"tau_ep1", t.tau_ep1},
    {"tau_ep2", t.tau_ep2},
    {"delta_ep", t.delta_ep},
    {"max_pairs_per_scene", t.max_pairs_per_scene},
  };
}

void require_file(const fs::path & p, std::string_view what)
{
  if (!fs::is_regular_file(p)) {
    throw ConfigError(fmt::format("{}: file '{}' does not exist", what, p.string()));
  }
}

const std::set<std::string> kJudgeSpecs{"epdms", "random", "always_a", "always_b", "classifier", "vlm"};

}  // namespace

void RunConfig::validate() const
{
  require_file(scenes, "scenes");
  if (splits) {
    require_file(*splits, "splits");
  }
  if (vocab) {
    require_file(*vocab, "vocab");
  } else if (vocab_grid != "default" && vocab_grid != "fixture") {
    throw ConfigError(fmt::format("vocab_grid must be default or fixture, got '{}'", vocab_grid));
  }
  if (metric_config) {
    require_file(*metric_config, "metric_config");
  }
  for (const auto & l : labels) {
    require_file(l, "labels");
  }
  if (endpoint) {
    require_file(*endpoint, "endpoint");
  }
  if (classifier_model) {
    require_file(*classifier_model, "classifier_model");
  }
  thresholds.validate();
  if (!kJudgeSpecs.count(judge)) {
    throw ConfigError(fmt::format("unknown judge '{}'", judge));
  }
  if (!case2_annotator.empty() && !kJudgeSpecs.count(case2_annotator)) {
    throw ConfigError(fmt::format("unknown case2_annotator '{}'", case2_annotator));
  }
  if ((judge == "vlm" || case2_annotator == "vlm") && !endpoint) {
    throw ConfigError("the vlm judge needs an endpoint config");
  }
  if (eval_split != "test" && eval_split != "train" && eval_split != "all") {
    throw ConfigError(fmt::format("eval_split must be test, train or all, got '{}'", eval_split));
  }
  if (output_dir.empty()) {
    throw ConfigError("output_dir is empty");
  }
}

void to_json(json & j, const RunConfig & c)
{
  json labels = json::array();
  for (const auto & l : c.labels) {
    labels.push_back(l.string());
  }
  j = {
    {"scenes", c.scenes.string()},
    {"splits", optional_path(c.splits)},
    {"vocab", optional_path(c.vocab)},
    {"vocab_grid", c.vocab_grid},
    {"metric_config", optional_path(c.metric_config)},
    {"thresholds", thresholds_json(c.thresholds)},
    {"labels", labels},
    {"simulate_expert", c.simulate_expert},
    {"case2_annotator", c.case2_annotator},
    {"judge", c.judge},
    {"endpoint", optional_path(c.endpoint)},
    {"classifier_model", optional_path(c.classifier_model)},
    {"flip", c.flip},
    {"eval_split", c.eval_split},
    {"seeds", c.seeds},
    {"workers", c.workers},
    {"output_dir", c.output_dir.string()},
  };
}

RunConfig run_config_from_json(const json & j, const fs::path & base_dir)
{
  static const std::set<std::string> kKeys{
    "scenes", "splits", "vocab", "vocab_grid", "metric_config", "thresholds", "labels", "simulate_expert",
    "case2_annotator", "judge", "endpoint", "classifier_model", "flip", "eval_split", "seeds", "workers",
    "output_dir"};
  if (!j.is_object()) {
    throw ConfigError("run config must be a JSON object");
  }
  for (const auto & [k, _] : j.items()) {
    if (!kKeys.count(k)) {
      throw ConfigError(fmt::format("run config: unknown key '{}'", k));
    }
  }
  const auto resolve = [&](const std::string & p) { return fs::path(p).is_absolute() ? fs::path(p) : base_dir / p; };
  const auto opt_path = [&](const char * key) -> std::optional<fs::path> {
    if (!j.contains(key) || j.at(key).is_null()) {
      return std::nullopt;
    }
    return resolve(j.at(key).get<std::string>());
  };
  RunConfig c;
  try {
    if (!j.contains("scenes")) {
      throw ConfigError("run config: 'scenes' is required");
    }
    c.scenes = resolve(j.at("scenes").get<std::string>());
    c.splits = opt_path("splits");
    c.vocab = opt_path("vocab");
    c.vocab_grid = j.value("vocab_grid", c.vocab_grid);
    c.metric_config = opt_path("metric_config");
    if (j.contains("thresholds")) {
      const auto & t = j.at("thresholds");
      for (const auto & [k, _] : t.items()) {
        if (k != "tau_ep1" && k != "tau_ep2" && k != "delta_ep" && k != "max_pairs_per_scene") {
          throw ConfigError(fmt::format("run config: unknown threshold '{}'", k));
        }
      }
      c.thresholds.tau_ep1 = t.value("tau_ep1", c.thresholds.tau_ep1);
      c.thresholds.tau_ep2 = t.value("tau_ep2", c.thresholds.tau_ep2);
      c.thresholds.delta_ep = t.value("delta_ep", c.thresholds.delta_ep);
      c.thresholds.max_pairs_per_scene = t.value("max_pairs_per_scene", c.thresholds.max_pairs_per_scene);
    }
    for (const auto & l : j.value("labels", json::array())) {
      c.labels.push_back(resolve(l.get<std::string>()));
    }
    c.simulate_expert = j.value("simulate_expert", c.simulate_expert);
    c.case2_annotator = j.contains("case2_annotator") && !j.at("case2_annotator").is_null()
                          ? j.at("case2_annotator").get<std::string>()
                          : std::string{};
    c.judge = j.value("judge", c.judge);
    c.endpoint = opt_path("endpoint");
    c.classifier_model = opt_path("classifier_model");
    c.flip = j.value("flip", c.flip);
    c.eval_split = j.value("eval_split", c.eval_split);
    if (j.contains("seeds")) {
      const auto & s = j.at("seeds");
      for (const auto & [k, _] : s.items()) {
        if (k != "global" && k != "judge" && k != "classifier") {
          throw ConfigError(fmt::format("run config: unknown seed '{}'", k));
        }
      }
      c.seeds.global = s.value("global", c.seeds.global);
      c.seeds.judge = s.value("judge", c.seeds.judge);
      c.seeds.classifier = s.value("classifier", c.seeds.classifier);
    }
    c.workers = j.value("workers", c.workers);
    c.output_dir = resolve(j.value("output_dir", c.output_dir.string()));
  } catch (const json::exception & e) {
    throw ConfigError(fmt::format("run config: {}", e.what()));
  }
  return c;
}

RunConfig load_run_config(const fs::path & path)
{
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception & e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return run_config_from_json(j, path.parent_path());
}

std::string config_hash(const RunConfig & c)
{
  json j = c;
  j.erase("workers");
  j.erase("output_dir");
  return sha256_hex(j.dump());
}

std::unique_ptr<Judge> make_judge(const std::string & spec, const JudgeContext & ctx)
{
  if (spec == "epdms") {
    return std::make_unique<EpdmsJudge>(ctx.metrics);
  }
  if (spec == "random") {
    return std::make_unique<RandomJudge>(ctx.seeds.judge);
  }
  if (spec == "always_a" || spec == "always_b") {
    return std::make_unique<ConstantJudge>(spec == "always_a" ? Slot::kA : Slot::kB);
  }
  if (spec == "vlm") {
    if (!ctx.endpoint) {
      throw ConfigError("the vlm judge needs an endpoint config");
    }
    return std::make_unique<VlmJudge>(load_endpoint_config(*ctx.endpoint));
  }
  if (spec == "classifier") {
    if (ctx.classifier_model) {
      return std::make_unique<ClassifierJudge>(load_classifier(*ctx.classifier_model));
    }
    if (!ctx.train_pairs || !ctx.scenes) {
      throw ConfigError("the classifier judge needs a model file or labeled train pairs");
    }
    const auto examples = make_examples(*ctx.train_pairs, *ctx.scenes);
    TrainParams params;
    params.seed = ctx.seeds.classifier;
    try {
      return std::make_unique<ClassifierJudge>(train_classifier(examples, params).model);
    } catch (const PreconditionError & e) {
      throw DataError(fmt::format("classifier training: {}", e.what()));
    }
  }
  throw ConfigError(fmt::format("unknown judge '{}'", spec));
}

std::string with_provenance(const std::string & body, const json & provenance)
{
  json p = provenance;
  p["schema"] = kProvenanceSchema;
  return p.dump() + "\n" + body;
}

std::pair<json, std::string> strip_provenance(const std::string & text)
{
  const auto nl = text.find('\n');
  if (nl != std::string::npos) {
    try {
      auto head = json::parse(text.substr(0, nl));
      if (head.is_object() && head.value("schema", "") == kProvenanceSchema) {
        return {std::move(head), text.substr(nl + 1)};
      }
    } catch (const json::exception &) {
    }
  }
  return {json::object(), text};
}

json verdicts_to_json(const std::vector<std::string> & pair_ids, const std::vector<PairVerdicts> & verdicts)
{
  json rows = json::array();
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    json row = {{"pair_id", pair_ids.at(i)}, {"original", verdicts[i].original}};
    if (verdicts[i].flipped) {
      row["flipped"] = *verdicts[i].flipped;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<PairVerdicts> verdicts_from_json(const json & rows, const std::vector<PreferencePair> & pairs)
{
  if (!rows.is_array() || rows.size() != pairs.size()) {
    throw DataError("verdicts: row count does not match the pairs");
  }
  std::vector<PairVerdicts> out;
  try {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].at("pair_id").get<std::string>() != pairs[i].pair_id) {
        throw DataError(fmt::format("verdicts: row {} is not pair {}", i, pairs[i].pair_id));
      }
      PairVerdicts v;
      v.original = rows[i].at("original").get<JudgeVerdict>();
      if (rows[i].contains("flipped")) {
        v.flipped = rows[i].at("flipped").get<JudgeVerdict>();
      }
      out.push_back(std::move(v));
    }
  } catch (const json::exception & e) {
    throw DataError(fmt::format("verdicts: {}", e.what()));
  }
  return out;
}

json run_manifest_to_json(const RunManifest & m)
{
  json stages = json::object();
  for (const auto & [name, s] : m.stages) {
    stages[name] = {{"input_hash", s.input_hash}, {"outputs", s.outputs}};
  }
  return {{"schema", kRunSchema}, {"config_hash", m.config_hash}, {"seeds", m.seeds}, {"stages", stages}};
}

RunManifest run_manifest_from_json(const json & j)
{
  if (j.value("schema", "") != kRunSchema) {
    throw DataError("run manifest: unsupported schema");
  }
  RunManifest m;
  try {
    m.config_hash = j.at("config_hash").get<std::string>();
    const auto & s = j.at("seeds");
    m.seeds = {s.at("global").get<std::uint64_t>(), s.at("judge").get<std::uint64_t>(),
               s.at("classifier").get<std::uint64_t>()};
    for (const auto & [name, st] : j.at("stages").items()) {
      m.stages[name] = {st.at("input_hash").get<std::string>(),
                        st.at("outputs").get<std::map<std::string, std::string>>()};
    }
  } catch (const json::exception & e) {
    throw DataError(fmt::format("run manifest: {}", e.what()));
  }
  return m;
}

namespace
{

constexpr const char * kManifestFile = "run_manifest.json";

class StageRunner
{
public:
  StageRunner(const RunConfig & config, const RunOptions & options, RunResult & result)
  : config_(config), options_(options), result_(result), dir_(config.output_dir)
  {
    fs::create_directories(dir_);
    if (fs::exists(dir_ / kManifestFile)) {
      try {
        manifest_ = run_manifest_from_json(json::parse(read_file(dir_ / kManifestFile)));
      } catch (const json::exception & e) {
        throw StaleArtifactError(fmt::format("{}: {}", kManifestFile, e.what()));
      }
    }
    manifest_.config_hash = config_hash(config);
    manifest_.seeds = config.seeds;
  }

  fs::path path(const std::string & file) const { return dir_ / file; }

  json provenance(const std::string & stage, const std::string & input_hash) const
  {
    return {{"stage", stage}, {"config_hash", manifest_.config_hash}, {"seeds", config_.seeds},
            {"input_hash", input_hash}};
  }

  /// Combined hash of a completed stage's outputs.
  std::string output_hash(const std::string & stage) const
  {
    std::string acc = stage;
    for (const auto & [file, h] : manifest_.stages.at(stage).outputs) {
      acc += "|" + file + "=" + h;
    }
    return sha256_hex(acc);
  }

  template <typename Body>
  void run(const std::string & stage, const std::string & input_hash, const std::vector<std::string> & outputs,
           Body && body)
  {
    if (!options_.force && fresh(stage, input_hash)) {
      log(fmt::format("{}: up to date", stage));
      result_.stages.emplace_back(stage, StageOutcome::kSkipped);
      return;
    }
    log(fmt::format("{}: running", stage));
    body(input_hash);
    StageRecord rec{input_hash, {}};
    for (const auto & f : outputs) {
      rec.outputs[f] = sha256_file(path(f));
    }
    manifest_.stages[stage] = std::move(rec);
    write_file(dir_ / kManifestFile, run_manifest_to_json(manifest_).dump(2) + "\n");
    result_.stages.emplace_back(stage, StageOutcome::kRan);
  }

private:
  bool fresh(const std::string & stage, const std::string & input_hash) const
  {
    const auto it = manifest_.stages.find(stage);
    if (it == manifest_.stages.end() || it->second.input_hash != input_hash) {
      return false;
    }
    for (const auto & [file, h] : it->second.outputs) {
      if (!fs::exists(path(file)) || sha256_file(path(file)) != h) {
        throw StaleArtifactError(
          fmt::format("stage {}: artifact {} does not match its recorded hash", stage, path(file).string()));
      }
    }
    return true;
  }

  void log(const std::string & msg) const
  {
    if (options_.log) {
      options_.log(msg);
    }
  }

  const RunConfig & config_;
  const RunOptions & options_;
  RunResult & result_;
  fs::path dir_;
  RunManifest manifest_;
};

std::string file_hash_or(const std::optional<fs::path> & p, std::string_view fallback)
{
  return p ? sha256_file(*p) : std::string(fallback);
}

std::vector<PreferencePair> read_pairs_artifact(const fs::path & p)
{
  return pairs_from_jsonl(strip_provenance(read_file(p)).second);
}

std::vector<PreferencePair> eval_pairs(
  const std::string & split, const std::vector<PreferencePair> & train, const std::vector<PreferencePair> & test)
{
  std::vector<PreferencePair> all;
  if (split != "test") {
    all.insert(all.end(), train.begin(), train.end());
  }
  if (split != "train") {
    all.insert(all.end(), test.begin(), test.end());
  }
  return labeled_pairs(all);
}

}  // namespace

RunResult run_pipeline(const RunConfig & config, const RunOptions & options)
{
  config.validate();
  RunResult result;
  StageRunner runner(config, options, result);

  const MetricConfig metrics = config.metric_config ? load_metric_config(*config.metric_config) : MetricConfig{};
  const std::string metric_text = format_metric_config(metrics);
  const std::string scenes_hash = sha256_file(config.scenes);

  std::optional<std::vector<Scene>> scene_list;
  std::map<std::string, Scene> scene_map;
  const auto scenes = [&]() -> const std::vector<Scene> & {
    if (!scene_list) {
      scene_list = read_scenes_jsonl(config.scenes);
      for (const auto & s : *scene_list) {
        if (!scene_map.emplace(s.scene_id, s).second) {
          throw DataError(fmt::format("duplicate scene id {}", s.scene_id));
        }
      }
    }
    return *scene_list;
  };
  const auto scenes_by_id = [&]() -> const std::map<std::string, Scene> & {
    scenes();
    return scene_map;
  };

  runner.run(
    "vocab", sha256_hex("vocab|" + file_hash_or(config.vocab, "grid:" + config.vocab_grid)), {"vocab.jsonl"},
    [&](const std::string & h) {
      const Vocabulary v = config.vocab ? load_vocabulary(*config.vocab)
                                        : build_vocabulary(config.vocab_grid == "fixture" ? fixture_vocab_params()
                                                                                          : VocabParams::default_grid());
      write_file(runner.path("vocab.jsonl"), with_provenance(vocabulary_to_jsonl(v), runner.provenance("vocab", h)));
    });

  runner.run("score", sha256_hex("score|" + scenes_hash + "|" + metric_text), {"scores.jsonl"}, [&](const std::string & h) {
    std::string body;
    for (const auto & s : scenes()) {
      json row = {{"scene_id", s.scene_id}};
      try {
        const auto sub = score_human(PreparedScene(s), metrics);
        row["sub_scores"] = sub;
        row["epdms"] = aggregate_epdms(sub, metrics);
      } catch (const UndefinedScoreError & e) {
        row["error"] = e.what();
      }
      body += row.dump() + "\n";
    }
    write_file(runner.path("scores.jsonl"), with_provenance(body, runner.provenance("score", h)));
  });

  const std::string mine_hash = sha256_hex(fmt::format(
    "mine|{}|{}|{}|{}|{}|{}", scenes_hash, runner.output_hash("vocab"), metric_text,
    thresholds_json(config.thresholds).dump(), file_hash_or(config.splits, "all-test"), config.seeds.global));
  runner.run(
    "mine", mine_hash, {"pairs_train.jsonl", "pairs_test.jsonl", "dataset_manifest.json"}, [&](const std::string & h) {
      const Vocabulary vocab = vocabulary_from_jsonl(strip_provenance(read_file(runner.path("vocab.jsonl"))).second);
      SplitAssignment splits;
      if (config.splits) {
        splits = load_split_assignment(*config.splits);
      } else {
        for (const auto & s : scenes()) {
          splits.test.push_back(s.scene_id);
        }
      }
      BuildOptions bo;
      bo.thresholds = config.thresholds;
      bo.metrics = metrics;
      bo.global_seed = config.seeds.global;
      bo.workers = config.workers;
      const Dataset ds = build_dataset(scenes(), vocab, splits, bo);
      const json prov = runner.provenance("mine", h);
      write_file(runner.path("pairs_train.jsonl"), with_provenance(pairs_to_jsonl(ds.pairs.at(Split::kTrain)), prov));
      write_file(runner.path("pairs_test.jsonl"), with_provenance(pairs_to_jsonl(ds.pairs.at(Split::kTest)), prov));
      json m = manifest_to_json(ds.manifest);
      m["provenance"] = prov;
      write_file(runner.path("dataset_manifest.json"), m.dump(2) + "\n");
    });

  std::string label_inputs = "label|" + runner.output_hash("mine");
  for (const auto & l : config.labels) {
    label_inputs += "|" + sha256_file(l);
  }
  label_inputs += fmt::format("|{}|{}", config.simulate_expert, config.case2_annotator);
  if (!config.case2_annotator.empty()) {
    label_inputs += fmt::format(
      "|{}|{}|{}|{}", file_hash_or(config.endpoint, "-"), file_hash_or(config.classifier_model, "-"), metric_text,
      json(config.seeds).dump());
  }
  runner.run(
    "label", sha256_hex(label_inputs), {"labeled_train.jsonl", "labeled_test.jsonl"}, [&](const std::string & h) {
      auto train = read_pairs_artifact(runner.path("pairs_train.jsonl"));
      auto test = read_pairs_artifact(runner.path("pairs_test.jsonl"));
      for (const auto & l : config.labels) {
        const auto ex = parse_export(read_file(l));
        auto & target = ex.header.split == Split::kTrain ? train : test;
        target = merge_labels(std::move(target), ex.pairs);
      }
      if (!config.case2_annotator.empty()) {
        const auto seed_pairs = labeled_pairs(train);
        JudgeContext ctx{metrics, config.seeds, config.endpoint, config.classifier_model, &seed_pairs, &scenes_by_id()};
        const auto annotator = make_judge(config.case2_annotator, ctx);
        EvalOptions eo;
        eo.workers = config.workers;
        judge_labels(
          train, *annotator, scenes_by_id(), [](const PreferencePair & p) { return p.pair_case == PairCase::kCase2; },
          eo);
      }
      if (config.simulate_expert) {
        test = simulated_expert_labels(std::move(test));
      }
      const json prov = runner.provenance("label", h);
      write_file(runner.path("labeled_train.jsonl"), with_provenance(pairs_to_jsonl(train), prov));
      write_file(runner.path("labeled_test.jsonl"), with_provenance(pairs_to_jsonl(test), prov));
    });

  const auto load_eval_pairs = [&] {
    return eval_pairs(
      config.eval_split, read_pairs_artifact(runner.path("labeled_train.jsonl")),
      read_pairs_artifact(runner.path("labeled_test.jsonl")));
  };

  const std::string judge_hash = sha256_hex(fmt::format(
    "judge|{}|{}|{}|{}|{}|{}|{}|{}", runner.output_hash("label"), config.judge, config.flip, config.eval_split,
    file_hash_or(config.endpoint, "-"), file_hash_or(config.classifier_model, "-"), metric_text,
    json(config.seeds).dump()));
  runner.run("judge", judge_hash, {"verdicts.jsonl"}, [&](const std::string & h) {
    const auto pairs = load_eval_pairs();
    if (pairs.empty()) {
      throw DataError(fmt::format("no A/B-labeled pairs in split '{}' to evaluate", config.eval_split));
    }
    const auto train = labeled_pairs(read_pairs_artifact(runner.path("labeled_train.jsonl")));
    JudgeContext ctx{metrics, config.seeds, config.endpoint, config.classifier_model, &train, &scenes_by_id()};
    const auto judge = make_judge(config.judge, ctx);
    EvalOptions eo;
    eo.workers = config.workers;
    const auto verdicts = collect_verdicts(*judge, pairs, scenes_by_id(), config.flip, eo);
    const bool all_transport = std::all_of(verdicts.begin(), verdicts.end(), [](const PairVerdicts & v) {
      return v.original.parse_status == ParseStatus::kTransportError;
    });
    if (all_transport) {
      throw JudgeEndpointError(
        fmt::format("judge {}: every request failed: {}", judge->name(), verdicts.front().original.error.value_or("unknown")));
    }
    std::vector<std::string> ids;
    for (const auto & p : pairs) {
      ids.push_back(p.pair_id);
    }
    json prov = runner.provenance("judge", h);
    prov["judge"] = judge->name();
    std::string body;
    for (const auto & row : verdicts_to_json(ids, verdicts)) {
      body += row.dump() + "\n";
    }
    write_file(runner.path("verdicts.jsonl"), with_provenance(body, prov));
  });

  const std::string eval_hash =
    sha256_hex(fmt::format("eval|{}|{}|{}", runner.output_hash("judge"), runner.output_hash("label"), config.eval_split));
  runner.run("eval", eval_hash, {"report.json", "report.txt"}, [&](const std::string & h) {
    const auto pairs = load_eval_pairs();
    const auto [vprov, vbody] = strip_provenance(read_file(runner.path("verdicts.jsonl")));
    const auto verdicts = verdicts_from_json(json(parse_jsonl(vbody)), pairs);
    const EvalReport report = summarize(vprov.value("judge", config.judge), pairs, verdicts);
    const json prov = runner.provenance("eval", h);
    json j = report;
    j["provenance"] = prov;
    write_file(runner.path("report.json"), j.dump(2) + "\n");
    write_file(
      runner.path("report.txt"),
      render_report(report, ReportFormat::kTable) +
        fmt::format("\nconfig_hash: {}\nseeds: {}\n", prov.at("config_hash").get<std::string>(),
                    json(config.seeds).dump()));
  });

  result.report_path = runner.path("report.json");
  result.report = parse_report(read_file(result.report_path));
  return result;
}

}  // namespace critic_bench
