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

#include "critic_bench/annotation_server.hpp"
#include "critic_bench/annotation_store.hpp"
#include "critic_bench/bev_render.hpp"
#include "critic_bench/digest.hpp"
#include "critic_bench/errors.hpp"
#include "critic_bench/eval_harness.hpp"
#include "critic_bench/fixtures.hpp"
#include "critic_bench/labeling.hpp"
#include "critic_bench/pipeline.hpp"
#include "critic_bench/scene_io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

namespace cb = critic_bench;
namespace fs = std::filesystem;

namespace
{

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitEndpoint = 4;

volatile std::sig_atomic_t g_stop = 0;
extern "C" void on_signal(int) { g_stop = 1; }

std::map<std::string, cb::Scene> load_scene_map(const fs::path & path)
{
  std::map<std::string, cb::Scene> out;
  for (auto & s : cb::read_scenes_jsonl(path)) {
    const std::string id = s.scene_id;
    if (!out.emplace(id, std::move(s)).second) {
      throw cb::DataError(fmt::format("duplicate scene id {}", id));
    }
  }
  return out;
}

std::vector<cb::PreferencePair> read_pairs(const fs::path & path)
{
  return cb::pairs_from_jsonl(cb::strip_provenance(cb::read_file(path)).second);
}

std::string joined_args(int argc, char ** argv)
{
  std::string s;
  for (int i = 1; i < argc; ++i) {
    s += std::string(argv[i]) + '\x1f';
  }
  return s;
}

cb::json provenance(const std::string & stage, const std::string & args_hash, const cb::Seeds & seeds)
{
  return {{"stage", stage}, {"config_hash", args_hash}, {"seeds", seeds}};
}

cb::MetricConfig metrics_from(const std::string & path)
{
  return path.empty() ? cb::MetricConfig{} : cb::load_metric_config(path);
}

/// Options shared by the commands that run a judge.
struct JudgeOptions
{
  std::string judge{"epdms"};
  std::string endpoint;
  std::string model;
  std::string train_pairs;
  std::string metric_config;
  std::uint64_t seed{0};
  std::size_t workers{0};

  void add(CLI::App & app)
  {
    app.add_option("--judge", judge, "epdms | random | always_a | always_b | classifier | vlm")
      ->check(CLI::IsMember({"epdms", "random", "always_a", "always_b", "classifier", "vlm"}));
    app.add_option("--endpoint", endpoint, "VLM endpoint config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--model", model, "classifier model (JSON)")->check(CLI::ExistingFile);
    app.add_option("--train-pairs", train_pairs, "labeled pairs to train the classifier on")->check(CLI::ExistingFile);
    app.add_option("--metric-config", metric_config, "metric config file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "seed for the random judge and classifier");
    app.add_option("--workers", workers, "parallel judge calls (0: hardware concurrency)");
  }

  std::unique_ptr<cb::Judge> build(
    const std::map<std::string, cb::Scene> & scenes, std::vector<cb::PreferencePair> & train_storage) const
  {
    cb::JudgeContext ctx;
    ctx.metrics = metrics_from(metric_config);
    ctx.seeds.judge = seed;
    ctx.seeds.classifier = seed;
    if (!endpoint.empty()) {
      ctx.endpoint = endpoint;
    }
    if (!model.empty()) {
      ctx.classifier_model = model;
    }
    if (!train_pairs.empty()) {
      train_storage = cb::labeled_pairs(read_pairs(train_pairs));
      ctx.train_pairs = &train_storage;
      ctx.scenes = &scenes;
    }
    return cb::make_judge(judge, ctx);
  }
};

std::vector<cb::PreferencePair> eval_input(const fs::path & path)
{
  auto pairs = cb::labeled_pairs(read_pairs(path));
  if (pairs.empty()) {
    throw cb::DataError(fmt::format("{}: no A/B-labeled pairs", path.string()));
  }
  return pairs;
}

void write_or_print(const std::string & out, const std::string & content)
{
  if (out.empty() || out == "-") {
    std::cout << content;
  } else {
    cb::write_file(out, content);
  }
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"critic-bench: context-aware trajectory pair benchmarking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("critic-bench 1.0.0"));
  const std::string args_hash = cb::sha256_hex(joined_args(argc, argv));
  std::function<int()> action;

  // gen-fixtures
  auto * gen = app.add_subcommand("gen-fixtures", "Write a synthetic scene corpus, split file and run config");
  cb::FixtureOptions fx;
  std::string gen_out;
  gen->add_option("--seed", fx.seed, "corpus seed")->capture_default_str();
  gen->add_option("-n,--scenes", fx.scenes, "number of scenes")->capture_default_str();
  gen->add_option("--test-fraction", fx.test_fraction, "share of scenes in the test split")
    ->check(CLI::Range(0.0, 1.0))
    ->capture_default_str();
  gen->add_option("-o,--out", gen_out, "output directory")->required();
  gen->callback([&] {
    action = [&] {
      const auto corpus = cb::generate_fixtures(fx);
      fs::create_directories(gen_out);
      cb::write_scenes_jsonl(fs::path(gen_out) / "scenes.jsonl", corpus.scenes);
      cb::write_file(
        fs::path(gen_out) / "splits.json",
        cb::json({{"train", corpus.splits.train}, {"test", corpus.splits.test}}).dump(2) + "\n");
      cb::RunConfig rc;
      rc.scenes = "scenes.jsonl";
      rc.splits = fs::path("splits.json");
      rc.vocab_grid = "fixture";
      rc.seeds.global = fx.seed;
      rc.output_dir = "out";
      cb::write_file(fs::path(gen_out) / "run.json", cb::json(rc).dump(2) + "\n");
      fmt::print("{} scenes ({} train, {} test) -> {}\n", corpus.scenes.size(), corpus.splits.train.size(),
                 corpus.splits.test.size(), gen_out);
      return 0;
    };
  });

  // vocab
  auto * vocab = app.add_subcommand("vocab", "Build the candidate trajectory vocabulary");
  std::string grid = "default";
  std::string vocab_out;
  vocab->add_option("--grid", grid, "default | fixture")->check(CLI::IsMember({"default", "fixture"}))->capture_default_str();
  vocab->add_option("-o,--out", vocab_out, "vocabulary JSONL")->required();
  vocab->callback([&] {
    action = [&] {
      const auto v = cb::build_vocabulary(grid == "fixture" ? cb::fixture_vocab_params() : cb::VocabParams::default_grid());
      cb::save_vocabulary(vocab_out, v);
      fmt::print("{} entries -> {}\n", v.entries.size(), vocab_out);
      return 0;
    };
  });

  // score
  auto * score = app.add_subcommand("score", "Score each scene's human trajectory");
  std::string score_scenes;
  std::string score_metrics;
  std::string score_out;
  score->add_option("--scenes", score_scenes, "scenes JSONL")->required()->check(CLI::ExistingFile);
  score->add_option("--metric-config", score_metrics, "metric config file")->check(CLI::ExistingFile);
  score->add_option("-o,--out", score_out, "scores JSONL (default stdout)");
  score->callback([&] {
    action = [&] {
      const auto metrics = metrics_from(score_metrics);
      std::string body;
      for (const auto & s : cb::read_scenes_jsonl(score_scenes)) {
        cb::json row = {{"scene_id", s.scene_id}};
        try {
          const auto sub = cb::score_human(cb::PreparedScene(s), metrics);
          row["sub_scores"] = sub;
          row["epdms"] = cb::aggregate_epdms(sub, metrics);
        } catch (const cb::UndefinedScoreError & e) {
          row["error"] = e.what();
        }
        body += row.dump() + "\n";
      }
      write_or_print(score_out, body);
      return 0;
    };
  });

  // mine
  auto * mine = app.add_subcommand("mine", "Mine preference pairs and assign slots");
  std::string mine_scenes;
  std::string mine_vocab;
  std::string mine_grid = "default";
  std::string mine_splits;
  std::string mine_metrics;
  std::string mine_out;
  cb::BuildOptions bo;
  mine->add_option("--scenes", mine_scenes, "scenes JSONL")->required()->check(CLI::ExistingFile);
  mine->add_option("--vocab", mine_vocab, "vocabulary JSONL (default: build --grid)")->check(CLI::ExistingFile);
  mine->add_option("--grid", mine_grid, "default | fixture")->check(CLI::IsMember({"default", "fixture"}));
  mine->add_option("--splits", mine_splits, "split file (default: all test)")->check(CLI::ExistingFile);
  mine->add_option("--metric-config", mine_metrics, "metric config file")->check(CLI::ExistingFile);
  mine->add_option("--seed", bo.global_seed, "slot assignment seed")->capture_default_str();
  mine->add_option("--tau-ep1", bo.thresholds.tau_ep1)->capture_default_str();
  mine->add_option("--tau-ep2", bo.thresholds.tau_ep2)->capture_default_str();
  mine->add_option("--delta-ep", bo.thresholds.delta_ep)->capture_default_str();
  mine->add_option("--max-pairs-per-scene", bo.thresholds.max_pairs_per_scene)->capture_default_str();
  mine->add_option("--workers", bo.workers, "parallel scenes")->capture_default_str();
  mine->add_option("-o,--out", mine_out, "output directory")->required();
  mine->callback([&] {
    action = [&] {
      bo.thresholds.validate();
      bo.metrics = metrics_from(mine_metrics);
      const auto scenes = cb::read_scenes_jsonl(mine_scenes);
      const auto v = mine_vocab.empty()
                       ? cb::build_vocabulary(mine_grid == "fixture" ? cb::fixture_vocab_params() : cb::VocabParams::default_grid())
                       : cb::load_vocabulary(mine_vocab);
      cb::SplitAssignment splits;
      if (mine_splits.empty()) {
        for (const auto & s : scenes) {
          splits.test.push_back(s.scene_id);
        }
      } else {
        splits = cb::load_split_assignment(mine_splits);
      }
      const auto ds = cb::build_dataset(scenes, v, splits, bo);
      cb::Seeds seeds;
      seeds.global = bo.global_seed;
      const auto prov = provenance("mine", args_hash, seeds);
      fs::create_directories(mine_out);
      cb::write_file(fs::path(mine_out) / "pairs_train.jsonl", cb::with_provenance(cb::pairs_to_jsonl(ds.pairs.at(cb::Split::kTrain)), prov));
      cb::write_file(fs::path(mine_out) / "pairs_test.jsonl", cb::with_provenance(cb::pairs_to_jsonl(ds.pairs.at(cb::Split::kTest)), prov));
      auto m = cb::manifest_to_json(ds.manifest);
      m["provenance"] = prov;
      cb::write_file(fs::path(mine_out) / "dataset_manifest.json", m.dump(2) + "\n");
      std::cout << cb::format_manifest_table(ds.manifest);
      return 0;
    };
  });

  // label
  auto * label = app.add_subcommand("label", "Label pairs: pseudo, import, llm or simulated-expert");
  std::string label_mode;
  std::string label_pairs;
  std::string label_out;
  std::vector<std::string> label_exports;
  std::string label_scenes;
  std::string label_cases = "case2";
  JudgeOptions label_judge;
  label_judge.judge = "vlm";
  label->add_option("mode", label_mode, "pseudo | import | llm | simulated-expert")
    ->required()
    ->check(CLI::IsMember({"pseudo", "import", "llm", "simulated-expert"}));
  label->add_option("--pairs", label_pairs, "pairs JSONL")->required()->check(CLI::ExistingFile);
  label->add_option("-o,--out", label_out, "labeled pairs JSONL")->required();
  label->add_option("--export", label_exports, "annotation export(s) to import")->check(CLI::ExistingFile);
  label->add_option("--scenes", label_scenes, "scenes JSONL (llm)")->check(CLI::ExistingFile);
  label->add_option("--cases", label_cases, "llm: case2 | all")->check(CLI::IsMember({"case2", "all"}));
  label_judge.add(*label);
  label->callback([&] {
    action = [&] {
      auto pairs = read_pairs(label_pairs);
      std::size_t n = 0;
      if (label_mode == "pseudo") {
        std::vector<cb::PreferencePair> todo;
        std::vector<std::size_t> at;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          if (pairs[i].pair_case != cb::PairCase::kCase2 && pairs[i].label == cb::Label::kUnlabeled) {
            todo.push_back(pairs[i]);
            at.push_back(i);
          }
        }
        todo = cb::pseudo_label_case1(std::move(todo));
        for (std::size_t k = 0; k < at.size(); ++k) {
          pairs[at[k]] = todo[k];
        }
        n = at.size();
      } else if (label_mode == "import") {
        if (label_exports.empty()) {
          throw cb::ConfigError("label import: --export is required");
        }
        for (const auto & e : label_exports) {
          const auto ex = cb::parse_export(cb::read_file(e));
          pairs = cb::merge_labels(std::move(pairs), ex.pairs);
          n += ex.pairs.size();
        }
      } else if (label_mode == "llm") {
        if (label_scenes.empty()) {
          throw cb::ConfigError("label llm: --scenes is required");
        }
        const auto scenes = load_scene_map(label_scenes);
        std::vector<cb::PreferencePair> train;
        const auto judge = label_judge.build(scenes, train);
        cb::EvalOptions eo;
        eo.workers = label_judge.workers;
        const bool all = label_cases == "all";
        n = cb::judge_labels(
          pairs, *judge, scenes, [all](const cb::PreferencePair & p) { return all || p.pair_case == cb::PairCase::kCase2; },
          eo);
      } else {
        const auto before = cb::export_header(cb::Split::kTest, pairs).unlabeled;
        pairs = cb::simulated_expert_labels(std::move(pairs));
        n = before;
      }
      cb::Seeds seeds;
      seeds.judge = label_judge.seed;
      cb::write_file(label_out, cb::with_provenance(cb::pairs_to_jsonl(pairs), provenance("label", args_hash, seeds)));
      fmt::print("{}: {} pairs labeled -> {}\n", label_mode, n, label_out);
      return 0;
    };
  });

  // judge / eval share inputs
  auto * judge = app.add_subcommand("judge", "Collect judge verdicts for labeled pairs");
  auto * eval = app.add_subcommand("eval", "Evaluate a judge: accuracy, flip accuracy, robustness rate");
  std::string j_pairs;
  std::string j_scenes;
  std::string j_out;
  bool j_no_flip = false;
  std::string j_format = "table";
  std::string j_verdicts;
  JudgeOptions jo;
  for (auto * sub : {judge, eval}) {
    sub->add_option("--pairs", j_pairs, "labeled pairs JSONL")->required()->check(CLI::ExistingFile);
    sub->add_option("--scenes", j_scenes, "scenes JSONL")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", j_out, "output file (default stdout)");
    sub->add_flag("--no-flip", j_no_flip, "skip the position-flip presentation");
    jo.add(*sub);
  }
  eval->add_option("--format", j_format, "table | json")->check(CLI::IsMember({"table", "json"}));
  eval->add_option("--verdicts", j_verdicts, "score saved verdicts instead of calling the judge")->check(CLI::ExistingFile);
  const auto collect = [&](std::vector<cb::PreferencePair> & pairs, std::string & name) {
    const auto scenes = load_scene_map(j_scenes);
    std::vector<cb::PreferencePair> train;
    const auto j = jo.build(scenes, train);
    name = j->name();
    cb::EvalOptions eo;
    eo.workers = jo.workers;
    auto verdicts = cb::collect_verdicts(*j, pairs, scenes, !j_no_flip, eo);
    if (std::all_of(verdicts.begin(), verdicts.end(), [](const cb::PairVerdicts & v) {
          return v.original.parse_status == cb::ParseStatus::kTransportError;
        })) {
      throw cb::JudgeEndpointError(fmt::format("judge {}: every request failed: {}", name,
                                               verdicts.front().original.error.value_or("unknown")));
    }
    return verdicts;
  };
  judge->callback([&] {
    action = [&] {
      auto pairs = eval_input(j_pairs);
      std::string name;
      const auto verdicts = collect(pairs, name);
      std::vector<std::string> ids;
      for (const auto & p : pairs) {
        ids.push_back(p.pair_id);
      }
      cb::Seeds seeds;
      seeds.judge = jo.seed;
      seeds.classifier = jo.seed;
      auto prov = provenance("judge", args_hash, seeds);
      prov["judge"] = name;
      std::string body;
      for (const auto & row : cb::verdicts_to_json(ids, verdicts)) {
        body += row.dump() + "\n";
      }
      write_or_print(j_out, cb::with_provenance(body, prov));
      return 0;
    };
  });
  eval->callback([&] {
    action = [&] {
      auto pairs = eval_input(j_pairs);
      std::string name = jo.judge;
      std::vector<cb::PairVerdicts> verdicts;
      if (!j_verdicts.empty()) {
        const auto [prov, body] = cb::strip_provenance(cb::read_file(j_verdicts));
        name = prov.value("judge", name);
        verdicts = cb::verdicts_from_json(cb::json(cb::parse_jsonl(body)), pairs);
      } else {
        verdicts = collect(pairs, name);
      }
      const auto report = cb::summarize(name, pairs, verdicts);
      if (j_format == "json") {
        cb::json j = report;
        cb::Seeds seeds;
        seeds.judge = jo.seed;
        seeds.classifier = jo.seed;
        j["provenance"] = provenance("eval", args_hash, seeds);
        write_or_print(j_out, j.dump(2) + "\n");
      } else {
        write_or_print(j_out, cb::render_report(report, cb::ReportFormat::kTable));
      }
      return 0;
    };
  });

  // train
  auto * train = app.add_subcommand("train", "Train the pairwise feature classifier");
  std::string t_pairs;
  std::string t_scenes;
  std::string t_out;
  std::string t_mode = "antisymmetric";
  cb::TrainParams tp;
  train->add_option("--pairs", t_pairs, "labeled pairs JSONL")->required()->check(CLI::ExistingFile);
  train->add_option("--scenes", t_scenes, "scenes JSONL")->required()->check(CLI::ExistingFile);
  train->add_option("-o,--out", t_out, "model JSON")->required();
  train->add_option("--mode", t_mode, "antisymmetric | raw")->check(CLI::IsMember({"antisymmetric", "raw"}));
  train->add_option("--lr", tp.learning_rate)->capture_default_str();
  train->add_option("--iterations", tp.iterations)->capture_default_str();
  train->add_option("--l2", tp.l2)->capture_default_str();
  train->add_option("--seed", tp.seed)->capture_default_str();
  train->callback([&] {
    action = [&] {
      tp.mode = t_mode == "raw" ? cb::FeatureMode::kRaw : cb::FeatureMode::kAntisymmetric;
      const auto examples = cb::make_examples(eval_input(t_pairs), load_scene_map(t_scenes));
      const auto r = cb::train_classifier(examples, tp);
      cb::save_classifier(r.model, t_out);
      fmt::print("{} examples, loss {:.4f}, train accuracy {:.4f} -> {}\n", examples.size(), r.final_loss,
                 r.train_accuracy, t_out);
      return 0;
    };
  });

  // render
  auto * render = app.add_subcommand("render", "Render BEV PNGs for pairs");
  std::string r_pairs;
  std::string r_scenes;
  std::string r_out;
  std::vector<std::string> r_ids;
  cb::RenderSpec spec;
  render->add_option("--pairs", r_pairs, "pairs JSONL")->required()->check(CLI::ExistingFile);
  render->add_option("--scenes", r_scenes, "scenes JSONL")->required()->check(CLI::ExistingFile);
  render->add_option("-o,--out", r_out, "output directory")->required();
  render->add_option("--pair", r_ids, "only these pair ids");
  render->add_option("--width", spec.width)->capture_default_str();
  render->add_option("--height", spec.height)->capture_default_str();
  render->add_option("--mpp", spec.meters_per_pixel, "meters per pixel")->capture_default_str();
  render->add_option("--range", spec.range, "clip half-size, meters")->capture_default_str();
  render->callback([&] {
    action = [&] {
      spec.validate();
      const auto scenes = load_scene_map(r_scenes);
      fs::create_directories(r_out);
      const std::set<std::string> wanted(r_ids.begin(), r_ids.end());
      std::size_t n = 0;
      for (const auto & p : read_pairs(r_pairs)) {
        if (!wanted.empty() && !wanted.count(p.pair_id)) {
          continue;
        }
        const auto it = scenes.find(p.scene_id);
        if (it == scenes.end()) {
          throw cb::DataError(fmt::format("pair {}: scene {} not found", p.pair_id, p.scene_id));
        }
        const auto [a, b] = cb::render_pair(it->second, p, spec);
        cb::write_file(fs::path(r_out) / cb::render_file_name(p.pair_id, cb::Slot::kA), a);
        cb::write_file(fs::path(r_out) / cb::render_file_name(p.pair_id, cb::Slot::kB), b);
        n += 2;
      }
      fmt::print("{} images -> {}\n", n, r_out);
      return 0;
    };
  });

  // serve
  auto * serve = app.add_subcommand("serve", "Run the annotation service");
  std::string s_scenes;
  std::string s_test;
  std::string s_train;
  std::string s_data;
  std::string s_host = "127.0.0.1";
  int s_port = 8080;
  std::string s_static;
  cb::ServerOptions so;
  std::string s_guideline;
  serve->add_option("--scenes", s_scenes, "scenes JSONL")->required()->envname("CRITIC_BENCH_SCENES")->check(CLI::ExistingFile);
  serve->add_option("--test-pairs", s_test, "test split pairs JSONL")->envname("CRITIC_BENCH_TEST_PAIRS")->check(CLI::ExistingFile);
  serve->add_option("--train-pairs", s_train, "train split pairs JSONL")->envname("CRITIC_BENCH_TRAIN_PAIRS")->check(CLI::ExistingFile);
  serve->add_option("--data-dir", s_data, "journal directory")->required()->envname("CRITIC_BENCH_DATA_DIR");
  serve->add_option("--host", s_host, "bind address")->envname("CRITIC_BENCH_HOST")->capture_default_str();
  serve->add_option("--port", s_port, "bind port (0: any)")->envname("CRITIC_BENCH_PORT")->capture_default_str();
  serve->add_option("--guideline", s_guideline, "guideline document")->check(CLI::ExistingFile);
  serve->add_option("--guideline-version", so.guideline_version)->capture_default_str();
  serve->add_option("--static-dir", s_static, "annotation UI files, served under /ui/")->check(CLI::ExistingDirectory);
  serve->add_flag("--flip", so.flip, "present every pair with swapped slots");
  serve->callback([&] {
    action = [&] {
      if (s_test.empty() && s_train.empty()) {
        throw cb::ConfigError("serve: give --test-pairs and/or --train-pairs");
      }
      std::map<cb::Split, std::vector<cb::PreferencePair>> pairs;
      if (!s_test.empty()) {
        pairs[cb::Split::kTest] = read_pairs(s_test);
      }
      if (!s_train.empty()) {
        pairs[cb::Split::kTrain] = read_pairs(s_train);
      }
      if (!s_guideline.empty()) {
        so.guideline_path = s_guideline;
      }
      if (!s_static.empty()) {
        so.static_dir = s_static;
      }
      const auto scenes = load_scene_map(s_scenes);
      cb::StoreOptions sto;
      sto.data_dir = s_data;
      sto.compact_on_open = true;
      cb::AnnotationStore store(std::move(pairs), sto);
      cb::AnnotationServer server(store, scenes, so);
      const int port = server.start(s_host, s_port);
      fmt::print("serving on http://{}:{} (journal {})\n", s_host, port, store.journal_path().string());
      std::fflush(stdout);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      while (!g_stop) {
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
      }
      server.stop();
      return 0;
    };
  });

  // run
  auto * run = app.add_subcommand("run", "Run the full pipeline from a run config");
  std::string run_config;
  std::string run_out;
  std::string run_judge;
  std::size_t run_workers = 0;
  bool run_force = false;
  run->add_option("-c,--config", run_config, "run config JSON")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output-dir", run_out, "override output_dir");
  run->add_option("--judge", run_judge, "override judge");
  run->add_option("--workers", run_workers, "override workers");
  run->add_flag("--force", run_force, "re-run every stage");
  run->callback([&] {
    action = [&] {
      auto rc = cb::load_run_config(run_config);
      if (!run_out.empty()) {
        rc.output_dir = run_out;
      }
      if (!run_judge.empty()) {
        rc.judge = run_judge;
      }
      if (run_workers) {
        rc.workers = run_workers;
      }
      cb::RunOptions ro;
      ro.force = run_force;
      ro.log = [](const std::string & m) { fmt::print(stderr, "{}\n", m); };
      const auto r = cb::run_pipeline(rc, ro);
      std::cout << cb::render_report(r.report, cb::ReportFormat::kTable);
      fmt::print("report: {}\n", r.report_path.string());
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  try {
    return action();
  } catch (const cb::ConfigError & e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const cb::JudgeEndpointError & e) {
    fmt::print(stderr, "judge endpoint error: {}\n", e.what());
    return kExitEndpoint;
  } catch (const cb::Error & e) {
    fmt::print(stderr, "data error: {}\n", e.what());
    return kExitData;
  } catch (const std::exception & e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
