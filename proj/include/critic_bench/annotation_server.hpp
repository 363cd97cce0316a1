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

#ifndef CRITIC_BENCH__ANNOTATION_SERVER_HPP_
#define CRITIC_BENCH__ANNOTATION_SERVER_HPP_

#include "critic_bench/annotation_store.hpp"
#include "critic_bench/bev_render.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace critic_bench
{

inline constexpr const char * kAnnotatorHeader = "X-Annotator-Id";

struct ServerOptions
{
  RenderSpec render;
  /// Present every pair with its slots swapped; submitted letters are mapped
  /// back to the stored presentation.
  bool flip{false};
  std::string guideline_version{"placeholder-v1"};
  std::optional<std::filesystem::path> guideline_path;
  /// Served under /ui/ when set.
  std::optional<std::filesystem::path> static_dir;
};

/// Annotator-facing view of a served pair: ego status, camera references,
/// and per slot the trajectory, EP/LK and the render URL. Carries no human
/// slot, label, label source, candidate kind, pair case or other sub-score.
json pair_payload(const ServedPair & served, const Scene & scene, const std::string & session_id, bool flip);
json end_of_queue_payload(const AnnotationSession & session);
std::string render_url(const std::string & pair_id, Slot slot);

/// HTTP+JSON front end of an AnnotationStore (schema critic-bench/api/v1):
///   GET  /health, GET /guideline
///   POST /sessions                     {annotator_id?, guideline_version?, split}
///   GET  /sessions/{id}
///   GET  /sessions/{id}/next           pair payload or end_of_queue
///   POST /sessions/{id}/labels         {pair_id, label: A|B|discarded}
///   POST /sessions/{id}/close
///   GET  /export?split=train|test      JSONL export
///   GET  /pairs/{id}/render/{A|B}      PNG
/// The annotator id may come from the X-Annotator-Id header; when present on
/// a session request it must match the session's annotator.
class AnnotationServer
{
public:
  AnnotationServer(AnnotationStore & store, const std::map<std::string, Scene> & scenes, ServerOptions options);
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer &) = delete;
  AnnotationServer & operator=(const AnnotationServer &) = delete;

  /// Binds the listening socket; port 0 picks a free port. Returns the port.
  int bind(const std::string & host, int port);
  /// Serves on the bound socket until stop().
  void listen();
  /// bind + listen on a background thread.
  int start(const std::string & host, int port);
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace critic_bench

#endif  // CRITIC_BENCH__ANNOTATION_SERVER_HPP_
