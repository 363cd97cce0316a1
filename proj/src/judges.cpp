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

#include "critic_bench/judges.hpp"

#include "critic_bench/errors.hpp"
#include "critic_bench/hashing.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>

namespace critic_bench
{

std::string_view to_string(ParseStatus s)
{
  switch (s) {
    case ParseStatus::kOk:
      return "ok";
    case ParseStatus::kFormatViolation:
      return "format_violation";
    case ParseStatus::kTransportError:
      return "transport_error";
  }
  return "ok";
}

ParseStatus parse_status_from_string(std::string_view s)
{
  for (const auto v : {ParseStatus::kOk, ParseStatus::kFormatViolation, ParseStatus::kTransportError}) {
    if (to_string(v) == s) {
      return v;
    }
  }
  throw DataError(fmt::format("unknown parse status '{}'", s));
}

JudgeVerdict JudgeVerdict::decided(Slot choice, std::optional<double> confidence)
{
  JudgeVerdict v;
  v.choice = choice;
  v.confidence = confidence;
  return v;
}

void to_json(json & j, const JudgeVerdict & v)
{
  j = json::object();
  j["choice"] = v.choice ? json(to_string(*v.choice)) : json(nullptr);
  j["confidence"] = v.confidence ? json(*v.confidence) : json(nullptr);
  j["reasoning_text"] = v.reasoning_text ? json(*v.reasoning_text) : json(nullptr);
  j["raw_response"] = v.raw_response ? json(*v.raw_response) : json(nullptr);
  j["parse_status"] = to_string(v.parse_status);
  j["retries"] = v.retries;
  if (v.error) {
    j["error"] = *v.error;
  }
}

void from_json(const json & j, JudgeVerdict & v)
{
  auto opt_string = [&](const char * key) -> std::optional<std::string> {
    if (!j.contains(key) || j.at(key).is_null()) {
      return std::nullopt;
    }
    return j.at(key).get<std::string>();
  };
  v = JudgeVerdict{};
  if (const auto c = opt_string("choice")) {
    v.choice = slot_from_string(*c);
  }
  if (j.contains("confidence") && !j.at("confidence").is_null()) {
    v.confidence = j.at("confidence").get<double>();
  }
  v.reasoning_text = opt_string("reasoning_text");
  v.raw_response = opt_string("raw_response");
  v.parse_status = parse_status_from_string(j.at("parse_status").get<std::string>());
  v.retries = j.value("retries", 0);
  v.error = opt_string("error");
  if (v.choice.has_value() != (v.parse_status == ParseStatus::kOk)) {
    throw DataError("verdict: choice must be present iff parse_status is ok");
  }
}

std::pair<std::optional<double>, std::optional<double>> JudgeInput::ep_lk(Slot s) const
{
  const auto & sub = view(s).sub_scores;
  return {sub.ep, sub.lk};
}

JudgeInput JudgeInput::swapped() const
{
  JudgeInput out = *this;
  std::swap(out.a, out.b);
  std::swap(out.bev_a, out.bev_b);
  return out;
}

JudgeInput make_judge_input(const PreferencePair & pair, const Scene & scene)
{
  if (pair.scene_id != scene.scene_id) {
    throw PreconditionError(
      fmt::format("pair {} belongs to scene {}, got {}", pair.pair_id, pair.scene_id, scene.scene_id));
  }
  JudgeInput in;
  in.pair_id = pair.pair_id;
  in.scene_id = pair.scene_id;
  in.scene = &scene;
  in.a = {pair.slot_a.trajectory, pair.slot_a.sub_scores};
  in.b = {pair.slot_b.trajectory, pair.slot_b.sub_scores};
  return in;
}

// EPDMS judge

JudgeVerdict EpdmsJudge::judge(const JudgeInput & input) const
{
  const double a = aggregate_epdms(input.a.sub_scores, config_);
  const double b = aggregate_epdms(input.b.sub_scores, config_);
  return JudgeVerdict::decided(a >= b ? Slot::kA : Slot::kB);
}

// Random judge

JudgeVerdict RandomJudge::judge(const JudgeInput & input) const
{
  std::uint64_t h = fnv1a64(input.pair_id);
  for (const auto & w : input.a.trajectory.waypoints) {
    for (const double d : {w.t, w.pose.x, w.pose.y, w.pose.heading}) {
      const auto bits = std::bit_cast<std::uint64_t>(d);
      for (int k = 0; k < 8; ++k) {
        h ^= (bits >> (8 * k)) & 0xffU;
        h *= 0x100000001b3ULL;
      }
    }
  }
  const bool pick_a = (splitmix64(seed_ ^ h) >> 63) != 0;
  return JudgeVerdict::decided(pick_a ? Slot::kA : Slot::kB);
}

// Features

namespace
{

constexpr double kFeatureSampleStep = 0.1;

std::array<double, kSlotFeatureDim> slot_features(
  const PreparedScene & prepared, const SlotView & view, double ego_speed)
{
  const auto & traj = view.trajectory;
  double clearance = kClearanceCap;
  double max_offset = 0.0;
  const int steps = static_cast<int>(std::lround(traj.horizon / kFeatureSampleStep));
  for (int i = 0; i <= steps; ++i) {
    const double t = std::min(traj.horizon, i * kFeatureSampleStep);
    const Pose2D pose = interpolate_pose(traj, t);
    const OrientedBox ego = prepared.ego_box(pose);
    for (const auto & agent : prepared.agents()) {
      clearance = std::min(clearance, box_distance(ego, agent.box_at(t)));
    }
    if (!prepared.route_lanes().empty()) {
      double offset = std::numeric_limits<double>::infinity();
      for (const auto & lane : prepared.route_lanes()) {
        offset = std::min(offset, lateral_offset(pose, lane));
      }
      max_offset = std::max(max_offset, offset);
    }
  }
  double max_accel = 0.0;
  for (const double a : dynamics_profile(traj, ego_speed).accel) {
    max_accel = std::max(max_accel, std::abs(a));
  }
  return {
    view.sub_scores.ep.value_or(0.0),
    view.sub_scores.lk.value_or(0.0),
    clearance,
    max_offset,
    ego_progress_distance(prepared, traj),
    max_accel,
  };
}

}  // namespace

FeatureVector extract_features(const JudgeInput & input)
{
  if (input.scene == nullptr) {
    throw PreconditionError("extract_features: judge input has no scene");
  }
  const PreparedScene prepared(*input.scene);
  const auto & ego = input.scene->ego;
  const auto fa = slot_features(prepared, input.a, ego.velocity);
  const auto fb = slot_features(prepared, input.b, ego.velocity);
  FeatureVector f{};
  for (std::size_t i = 0; i < kSlotFeatureDim; ++i) {
    f[i] = fa[i];
    f[kSlotFeatureDim + i] = fb[i];
    f[2 * kSlotFeatureDim + i] = fa[i] - fb[i];
  }
  f[18 + static_cast<std::size_t>(
    ego.driving_command == DrivingCommand::kLeft       ? 0
    : ego.driving_command == DrivingCommand::kStraight ? 1
    : ego.driving_command == DrivingCommand::kRight    ? 2
                                                        : 3)] = 1.0;
  f[22] = ego.velocity;
  f[23] = ego.acceleration;
  return f;
}

// Classifier

std::string_view to_string(FeatureMode m)
{
  return m == FeatureMode::kAntisymmetric ? "antisymmetric" : "raw";
}

FeatureMode feature_mode_from_string(std::string_view s)
{
  if (s == "antisymmetric") {
    return FeatureMode::kAntisymmetric;
  }
  if (s == "raw") {
    return FeatureMode::kRaw;
  }
  throw ConfigError(fmt::format("unknown feature mode '{}'", s));
}

std::vector<double> design_vector(const FeatureVector & f, FeatureMode mode)
{
  if (mode == FeatureMode::kRaw) {
    return {f.begin(), f.end()};
  }
  std::vector<double> x(2 * kSlotFeatureDim);
  for (std::size_t i = 0; i < kSlotFeatureDim; ++i) {
    const double d = f[2 * kSlotFeatureDim + i];
    x[i] = d;
    x[kSlotFeatureDim + i] = d * f[22];
  }
  return x;
}

namespace
{

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z)
{
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double row_logit(const std::vector<double> & x, const std::vector<double> & w, bool has_bias)
{
  double z = has_bias ? w.back() : 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    z += x[i] * w[i];
  }
  return z;
}

}  // namespace

LossGradient logistic_loss_and_gradient(
  const std::vector<std::vector<double>> & x, const std::vector<double> & y,
  const std::vector<double> & w, double l2, bool has_bias)
{
  if (x.empty() || x.size() != y.size()) {
    throw PreconditionError("logistic loss: need equally many rows and targets");
  }
  const std::size_t dim = x.front().size();
  if (w.size() != dim + (has_bias ? 1 : 0)) {
    throw PreconditionError("logistic loss: weight dimension mismatch");
  }
  LossGradient out;
  out.gradient.assign(w.size(), 0.0);
  const double n = static_cast<double>(x.size());
  for (std::size_t r = 0; r < x.size(); ++r) {
    if (x[r].size() != dim) {
      throw PreconditionError("logistic loss: ragged design matrix");
    }
    const double z = row_logit(x[r], w, has_bias);
    // -[y log s + (1 - y) log(1 - s)] = softplus(z) - y z
    out.loss += (softplus(z) - y[r] * z) / n;
    const double residual = (sigmoid(z) - y[r]) / n;
    for (std::size_t i = 0; i < dim; ++i) {
      out.gradient[i] += residual * x[r][i];
    }
    if (has_bias) {
      out.gradient.back() += residual;
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    out.loss += 0.5 * l2 * w[i] * w[i];
    out.gradient[i] += l2 * w[i];
  }
  return out;
}

double ClassifierModel::logit(const FeatureVector & f) const
{
  const auto x = design_vector(f, mode);
  if (x.size() != weights.size() || x.size() != center.size() || x.size() != scale.size()) {
    throw PreconditionError("classifier: model dimension does not match the feature mode");
  }
  double z = bias;
  for (std::size_t i = 0; i < x.size(); ++i) {
    z += weights[i] * ((x[i] - center[i]) / scale[i]);
  }
  return z;
}

void to_json(json & j, const ClassifierModel & m)
{
  j = {
    {"schema", "critic-bench/classifier/v1"},
    {"mode", to_string(m.mode)},
    {"center", m.center},
    {"scale", m.scale},
    {"weights", m.weights},
    {"bias", m.bias},
  };
}

void from_json(const json & j, ClassifierModel & m)
{
  if (j.value("schema", "") != "critic-bench/classifier/v1") {
    throw DataError("classifier model: unsupported schema");
  }
  m.mode = feature_mode_from_string(j.at("mode").get<std::string>());
  j.at("center").get_to(m.center);
  j.at("scale").get_to(m.scale);
  j.at("weights").get_to(m.weights);
  m.bias = j.at("bias").get<double>();
  const std::size_t dim = m.mode == FeatureMode::kRaw ? kFeatureDim : 2 * kSlotFeatureDim;
  if (m.center.size() != dim || m.scale.size() != dim || m.weights.size() != dim) {
    throw DataError("classifier model: dimension does not match the feature mode");
  }
}

void save_classifier(const ClassifierModel & m, const std::filesystem::path & path)
{
  write_file(path, json(m).dump(2) + "\n");
}

ClassifierModel load_classifier(const std::filesystem::path & path)
{
  try {
    return json::parse(read_file(path)).get<ClassifierModel>();
  } catch (const json::exception & e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

TrainResult train_classifier(const std::vector<LabeledExample> & examples, const TrainParams & params)
{
  std::size_t n_a = 0;
  for (const auto & e : examples) {
    n_a += e.label == Slot::kA ? 1 : 0;
  }
  if (n_a == 0 || n_a == examples.size()) {
    throw PreconditionError("train_classifier: both labels must be present");
  }
  if (params.iterations < 0 || !(params.learning_rate >= 0.0) || !(params.l2 >= 0.0)) {
    throw ConfigError("train_classifier: iterations, learning rate and l2 must be nonnegative");
  }

  const bool has_bias = params.mode == FeatureMode::kRaw;
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (const auto & e : examples) {
    x.push_back(design_vector(e.features, params.mode));
    y.push_back(e.label == Slot::kA ? 1.0 : 0.0);
  }
  const std::size_t dim = x.front().size();
  const double n = static_cast<double>(x.size());

  ClassifierModel model;
  model.mode = params.mode;
  model.center.assign(dim, 0.0);
  model.scale.assign(dim, 1.0);
  for (std::size_t i = 0; i < dim; ++i) {
    if (has_bias) {
      for (const auto & row : x) {
        model.center[i] += row[i] / n;
      }
    }
    double ss = 0.0;
    for (const auto & row : x) {
      ss += (row[i] - model.center[i]) * (row[i] - model.center[i]);
    }
    const double s = std::sqrt(ss / n);
    model.scale[i] = s > 1e-12 ? s : 1.0;
  }
  for (auto & row : x) {
    for (std::size_t i = 0; i < dim; ++i) {
      row[i] = (row[i] - model.center[i]) / model.scale[i];
    }
  }

  std::vector<double> w(dim + (has_bias ? 1 : 0), 0.0);
  if (params.init_scale > 0.0) {
    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> normal(0.0, params.init_scale);
    for (auto & wi : w) {
      wi = normal(rng);
    }
  }
  for (int it = 0; it < params.iterations; ++it) {
    const auto lg = logistic_loss_and_gradient(x, y, w, params.l2, has_bias);
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] -= params.learning_rate * lg.gradient[i];
    }
  }

  TrainResult result;
  result.final_loss = logistic_loss_and_gradient(x, y, w, params.l2, has_bias).loss;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    const bool pred_a = row_logit(x[r], w, has_bias) >= 0.0;
    correct += pred_a == (y[r] == 1.0) ? 1 : 0;
  }
  result.train_accuracy = static_cast<double>(correct) / n;
  if (has_bias) {
    model.bias = w.back();
    w.pop_back();
  }
  model.weights = std::move(w);
  result.model = std::move(model);
  return result;
}

std::vector<LabeledExample> make_examples(
  const std::vector<PreferencePair> & pairs, const std::map<std::string, Scene> & scenes)
{
  std::vector<LabeledExample> out;
  for (const auto & p : pairs) {
    if (p.label != Label::kA && p.label != Label::kB) {
      continue;
    }
    const auto it = scenes.find(p.scene_id);
    if (it == scenes.end()) {
      throw DataError(fmt::format("pair {}: scene {} not found", p.pair_id, p.scene_id));
    }
    out.push_back({extract_features(make_judge_input(p, it->second)),
                   p.label == Label::kA ? Slot::kA : Slot::kB});
  }
  return out;
}

JudgeVerdict ClassifierJudge::judge(const JudgeInput & input) const
{
  const double p_a = sigmoid(model_.logit(extract_features(input)));
  const Slot choice = p_a >= 0.5 ? Slot::kA : Slot::kB;
  return JudgeVerdict::decided(choice, choice == Slot::kA ? p_a : 1.0 - p_a);
}

}  // namespace critic_bench
