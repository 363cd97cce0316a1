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

#ifndef CRITIC_BENCH__ANNOTATION_STORE_HPP_
#define CRITIC_BENCH__ANNOTATION_STORE_HPP_

#include "critic_bench/errors.hpp"
#include "critic_bench/labeling.hpp"
#include "critic_bench/miner.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

namespace critic_bench
{

class NotFoundError : public Error
{
public:
  using Error::Error;
};

class ForbiddenError : public Error
{
public:
  using Error::Error;
};

struct AnnotationSession
{
  std::string session_id;
  std::string annotator_id;
  std::string guideline_version;
  Split split{Split::kTest};
  std::vector<std::string> assigned;  ///< pairs served, in order
  std::string started_at;
  std::string updated_at;
  bool active{true};

  friend bool operator==(const AnnotationSession &, const AnnotationSession &) = default;
};

struct LabelRecord
{
  std::string pair_id;
  Label label{Label::kA};  ///< A, B or discarded
  std::string annotator_id;
  std::string guideline_version;
  std::string session_id;
  std::string timestamp;
  int revision{1};

  friend bool operator==(const LabelRecord &, const LabelRecord &) = default;
};

void to_json(json & j, const AnnotationSession & s);
void to_json(json & j, const LabelRecord & r);
void from_json(const json & j, LabelRecord & r);

struct ServedPair
{
  PreferencePair pair;
  std::size_t position{0};  ///< 1-based index in the session's queue
  std::size_t total{0};     ///< pairs served so far plus pairs still available
};

struct SubmitResult
{
  LabelRecord record;
  bool created{false};  ///< false for an exact duplicate of the latest revision
};

struct StoreOptions
{
  std::filesystem::path data_dir;
  /// UTC ISO-8601 timestamp source; the system clock by default.
  std::function<std::string()> clock;
  /// Rewrite the journal once after replay.
  bool compact_on_open{false};
};

/// Annotation state over a fixed pair set, persisted as an append-only
/// journal (data_dir/journal.jsonl, one fsync'd line per event) and rebuilt
/// from it on construction. Only pairs that arrive unlabeled are served.
/// Thread-safe: mutations are serialized, reads share a lock.
class AnnotationStore
{
public:
  AnnotationStore(std::map<Split, std::vector<PreferencePair>> pairs, StoreOptions options);
  ~AnnotationStore();
  AnnotationStore(const AnnotationStore &) = delete;
  AnnotationStore & operator=(const AnnotationStore &) = delete;

  AnnotationSession create_session(
    const std::string & annotator_id, const std::string & guideline_version, Split split);
  /// Throws NotFoundError for an unknown session.
  AnnotationSession session(const std::string & session_id) const;
  /// Releases the session's unlabeled assignment.
  void close_session(const std::string & session_id);

  /// The session's outstanding pair if it has one, else the next available
  /// pair of its split; empty at end of queue. A pair is assigned to at most
  /// one active session. Throws NotFoundError / ForbiddenError (closed session).
  std::optional<ServedPair> next_pair(const std::string & session_id);

  /// Throws NotFoundError (unknown session or pair), ForbiddenError (pair not
  /// served to this session, or session closed), PreconditionError (label
  /// not A, B or discarded).
  SubmitResult submit_label(const std::string & session_id, const std::string & pair_id, Label label);

  /// Full revision history, oldest first.
  std::vector<LabelRecord> history(const std::string & pair_id) const;
  const PreferencePair * find_pair(const std::string & pair_id) const;
  /// Pairs of the split with the latest revisions merged in (source expert;
  /// discarded pairs keep no source).
  std::vector<PreferencePair> merged_pairs(Split split) const;
  std::string export_split(Split split) const;

  /// Rewrites the journal from the in-memory state (atomic rename).
  void compact();
  std::filesystem::path journal_path() const { return options_.data_dir / "journal.jsonl"; }

private:
  struct PairState
  {
    Split split;
    std::size_t index;
    std::optional<std::string> assigned_to;
    std::vector<LabelRecord> history;
  };

  void replay();
  void apply(const json & event);
  void append(const json & event);
  void open_journal();
  std::string now() const;
  std::size_t available(Split split) const;

  std::map<Split, std::vector<PreferencePair>> pairs_;
  StoreOptions options_;
  std::map<std::string, PairState> state_;
  std::map<std::string, AnnotationSession> sessions_;
  std::size_t session_counter_{0};
  std::FILE * journal_{nullptr};
  mutable std::shared_mutex mutex_;
};

}  // namespace critic_bench

#endif  // CRITIC_BENCH__ANNOTATION_STORE_HPP_
