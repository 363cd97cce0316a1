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

#include "critic_bench/annotation_store.hpp"

#include "critic_bench/scene_io.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <unistd.h>

#include <chrono>
#include <mutex>

namespace critic_bench
{

void to_json(json & j, const AnnotationSession & s)
{
  j = {
    {"session_id", s.session_id},
    {"annotator_id", s.annotator_id},
    {"guideline_version", s.guideline_version},
    {"split", to_string(s.split)},
    {"assigned", s.assigned},
    {"started_at", s.started_at},
    {"updated_at", s.updated_at},
    {"active", s.active},
  };
}

void to_json(json & j, const LabelRecord & r)
{
  j = {
    {"pair_id", r.pair_id},
    {"label", to_string(r.label)},
    {"annotator_id", r.annotator_id},
    {"guideline_version", r.guideline_version},
    {"session_id", r.session_id},
    {"timestamp", r.timestamp},
    {"revision", r.revision},
  };
}

void from_json(const json & j, LabelRecord & r)
{
  r.pair_id = j.at("pair_id").get<std::string>();
  r.label = label_from_string(j.at("label").get<std::string>());
  r.annotator_id = j.at("annotator_id").get<std::string>();
  r.guideline_version = j.at("guideline_version").get<std::string>();
  r.session_id = j.at("session_id").get<std::string>();
  r.timestamp = j.at("timestamp").get<std::string>();
  r.revision = j.at("revision").get<int>();
}

AnnotationStore::AnnotationStore(std::map<Split, std::vector<PreferencePair>> pairs, StoreOptions options)
: pairs_(std::move(pairs)), options_(std::move(options))
{
  for (const auto & [split, ps] : pairs_) {
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (!state_.emplace(ps[i].pair_id, PairState{split, i, std::nullopt, {}}).second) {
        throw DataError(fmt::format("annotation store: duplicate pair id {}", ps[i].pair_id));
      }
    }
  }
  std::filesystem::create_directories(options_.data_dir);
  replay();
  open_journal();
}

AnnotationStore::~AnnotationStore()
{
  if (journal_) {
    std::fclose(journal_);
  }
}

std::string AnnotationStore::now() const
{
  if (options_.clock) {
    return options_.clock();
  }
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::time_point_cast<std::chrono::seconds>(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now - secs).count();
  return fmt::format("{:%Y-%m-%dT%H:%M:%S}.{:03d}Z", secs, ms);
}

void AnnotationStore::open_journal()
{
  journal_ = std::fopen(journal_path().c_str(), "a");
  if (!journal_) {
    throw ConfigError(fmt::format("cannot open journal {}", journal_path().string()));
  }
}

void AnnotationStore::append(const json & event)
{
  const std::string line = event.dump() + "\n";
  if (std::fwrite(line.data(), 1, line.size(), journal_) != line.size() || std::fflush(journal_) != 0 ||
      ::fsync(::fileno(journal_)) != 0) {
    throw Error(fmt::format("journal write failed: {}", journal_path().string()));
  }
}

void AnnotationStore::replay()
{
  if (!std::filesystem::exists(journal_path())) {
    return;
  }
  const std::string text = read_file(journal_path());
  std::size_t start = 0;
  std::size_t line_no = 0;
  bool torn = false;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    ++line_no;
    if (end == std::string::npos) {
      // Unterminated tail from an interrupted append: never acknowledged.
      torn = true;
      break;
    }
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) {
      continue;
    }
    try {
      apply(json::parse(line));
    } catch (const json::exception & e) {
      throw DataError(fmt::format("{}:{}: {}", journal_path().string(), line_no, e.what()));
    } catch (const Error & e) {
      throw DataError(fmt::format("{}:{}: {}", journal_path().string(), line_no, e.what()));
    }
  }
  if (torn || options_.compact_on_open) {
    compact();
  }
}

void AnnotationStore::apply(const json & e)
{
  const std::string type = e.at("type").get<std::string>();
  if (type == "session") {
    AnnotationSession s;
    s.session_id = e.at("session_id").get<std::string>();
    s.annotator_id = e.at("annotator_id").get<std::string>();
    s.guideline_version = e.at("guideline_version").get<std::string>();
    s.split = split_from_string(e.at("split").get<std::string>());
    s.started_at = e.at("at").get<std::string>();
    s.updated_at = s.started_at;
    sessions_[s.session_id] = s;
    ++session_counter_;
  } else if (type == "assign") {
    auto & s = sessions_.at(e.at("session_id").get<std::string>());
    const auto pair_id = e.at("pair_id").get<std::string>();
    auto & st = state_.at(pair_id);
    st.assigned_to = s.session_id;
    s.assigned.push_back(pair_id);
    s.updated_at = e.at("at").get<std::string>();
  } else if (type == "label") {
    const auto r = e.at("record").get<LabelRecord>();
    auto & st = state_.at(r.pair_id);
    if (r.revision != static_cast<int>(st.history.size()) + 1) {
      throw DataError(fmt::format("pair {}: revision {} out of order", r.pair_id, r.revision));
    }
    st.history.push_back(r);
    st.assigned_to.reset();
    sessions_.at(r.session_id).updated_at = r.timestamp;
  } else if (type == "close") {
    auto & s = sessions_.at(e.at("session_id").get<std::string>());
    s.active = false;
    s.updated_at = e.at("at").get<std::string>();
    for (auto & [_, st] : state_) {
      if (st.assigned_to == s.session_id) {
        st.assigned_to.reset();
      }
    }
  } else {
    throw DataError(fmt::format("unknown journal event '{}'", type));
  }
}

AnnotationSession AnnotationStore::create_session(
  const std::string & annotator_id, const std::string & guideline_version, Split split)
{
  if (annotator_id.empty() || guideline_version.empty()) {
    throw PreconditionError("session: annotator_id and guideline_version are required");
  }
  std::unique_lock lock(mutex_);
  const json e = {
    {"type", "session"},
    {"session_id", fmt::format("s{:06d}", session_counter_ + 1)},
    {"annotator_id", annotator_id},
    {"guideline_version", guideline_version},
    {"split", to_string(split)},
    {"at", now()},
  };
  append(e);
  apply(e);
  return sessions_.at(e["session_id"].get<std::string>());
}

AnnotationSession AnnotationStore::session(const std::string & session_id) const
{
  std::shared_lock lock(mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw NotFoundError(fmt::format("unknown session {}", session_id));
  }
  return it->second;
}

void AnnotationStore::close_session(const std::string & session_id)
{
  std::unique_lock lock(mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw NotFoundError(fmt::format("unknown session {}", session_id));
  }
  if (!it->second.active) {
    return;
  }
  const json e = {{"type", "close"}, {"session_id", session_id}, {"at", now()}};
  append(e);
  apply(e);
}

std::size_t AnnotationStore::available(Split split) const
{
  std::size_t n = 0;
  const auto it = pairs_.find(split);
  if (it == pairs_.end()) {
    return 0;
  }
  for (const auto & p : it->second) {
    const auto & st = state_.at(p.pair_id);
    n += p.label == Label::kUnlabeled && st.history.empty() && !st.assigned_to ? 1 : 0;
  }
  return n;
}

std::optional<ServedPair> AnnotationStore::next_pair(const std::string & session_id)
{
  std::unique_lock lock(mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw NotFoundError(fmt::format("unknown session {}", session_id));
  }
  auto & s = it->second;
  if (!s.active) {
    throw ForbiddenError(fmt::format("session {} is closed", session_id));
  }
  for (std::size_t k = 0; k < s.assigned.size(); ++k) {
    const auto & st = state_.at(s.assigned[k]);
    if (st.assigned_to == session_id) {
      return ServedPair{pairs_.at(st.split)[st.index], k + 1, s.assigned.size() + available(s.split)};
    }
  }
  const auto pit = pairs_.find(s.split);
  if (pit == pairs_.end()) {
    return std::nullopt;
  }
  for (const auto & p : pit->second) {
    const auto & st = state_.at(p.pair_id);
    if (p.label != Label::kUnlabeled || !st.history.empty() || st.assigned_to) {
      continue;
    }
    const json e = {{"type", "assign"}, {"session_id", session_id}, {"pair_id", p.pair_id}, {"at", now()}};
    append(e);
    apply(e);
    return ServedPair{p, s.assigned.size(), s.assigned.size() + available(s.split)};
  }
  return std::nullopt;
}

SubmitResult AnnotationStore::submit_label(const std::string & session_id, const std::string & pair_id, Label label)
{
  if (label == Label::kUnlabeled) {
    throw PreconditionError("label must be A, B or discarded");
  }
  std::unique_lock lock(mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw NotFoundError(fmt::format("unknown session {}", session_id));
  }
  const auto pit = state_.find(pair_id);
  if (pit == state_.end()) {
    throw NotFoundError(fmt::format("unknown pair {}", pair_id));
  }
  const auto & s = it->second;
  if (!s.active) {
    throw ForbiddenError(fmt::format("session {} is closed", session_id));
  }
  if (std::find(s.assigned.begin(), s.assigned.end(), pair_id) == s.assigned.end()) {
    throw ForbiddenError(fmt::format("pair {} was not served to session {}", pair_id, session_id));
  }
  auto & history = pit->second.history;
  if (!history.empty() && history.back().label == label && history.back().session_id == session_id) {
    return {history.back(), false};
  }
  LabelRecord r;
  r.pair_id = pair_id;
  r.label = label;
  r.annotator_id = s.annotator_id;
  r.guideline_version = s.guideline_version;
  r.session_id = session_id;
  r.timestamp = now();
  r.revision = static_cast<int>(history.size()) + 1;
  const json e = {{"type", "label"}, {"record", r}};
  append(e);
  apply(e);
  return {r, true};
}

std::vector<LabelRecord> AnnotationStore::history(const std::string & pair_id) const
{
  std::shared_lock lock(mutex_);
  const auto it = state_.find(pair_id);
  if (it == state_.end()) {
    throw NotFoundError(fmt::format("unknown pair {}", pair_id));
  }
  return it->second.history;
}

const PreferencePair * AnnotationStore::find_pair(const std::string & pair_id) const
{
  const auto it = state_.find(pair_id);
  return it == state_.end() ? nullptr : &pairs_.at(it->second.split)[it->second.index];
}

std::vector<PreferencePair> AnnotationStore::merged_pairs(Split split) const
{
  std::shared_lock lock(mutex_);
  const auto it = pairs_.find(split);
  if (it == pairs_.end()) {
    return {};
  }
  auto out = it->second;
  for (auto & p : out) {
    const auto & h = state_.at(p.pair_id).history;
    if (h.empty()) {
      continue;
    }
    p.label = h.back().label;
    p.label_source = p.label == Label::kDiscarded ? std::nullopt : std::optional(LabelSource::kExpert);
  }
  return out;
}

std::string AnnotationStore::export_split(Split split) const { return export_jsonl(split, merged_pairs(split)); }

void AnnotationStore::compact()
{
  std::string text;
  std::vector<const LabelRecord *> records;
  for (const auto & [_, st] : state_) {
    for (const auto & r : st.history) {
      records.push_back(&r);
    }
  }
  // Sessions in id order, each followed by its assignments; labels follow all
  // sessions so that every referenced session exists on replay. Assignments
  // of labeled pairs are released again by the label events.
  for (const auto & [id, s] : sessions_) {
    text += json({{"type", "session"}, {"session_id", id}, {"annotator_id", s.annotator_id},
                  {"guideline_version", s.guideline_version}, {"split", to_string(s.split)},
                  {"at", s.started_at}}).dump() + "\n";
    for (const auto & pair_id : s.assigned) {
      text += json({{"type", "assign"}, {"session_id", id}, {"pair_id", pair_id}, {"at", s.updated_at}}).dump() + "\n";
    }
  }
  std::sort(records.begin(), records.end(), [](const LabelRecord * a, const LabelRecord * b) {
    return std::tie(a->timestamp, a->pair_id, a->revision) < std::tie(b->timestamp, b->pair_id, b->revision);
  });
  for (const auto * r : records) {
    text += json({{"type", "label"}, {"record", *r}}).dump() + "\n";
  }
  for (const auto & [id, s] : sessions_) {
    if (!s.active) {
      text += json({{"type", "close"}, {"session_id", id}, {"at", s.updated_at}}).dump() + "\n";
    }
  }
  if (journal_) {
    std::fclose(journal_);
    journal_ = nullptr;
  }
  write_file(journal_path(), text);
  open_journal();
}

}  // namespace critic_bench
