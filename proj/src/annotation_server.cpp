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

#include "critic_bench/errors.hpp"
#include "critic_bench/scene_io.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <mutex>
#include <thread>

namespace critic_bench
{

std::string render_url(const std::string & pair_id, Slot slot)
{
  return fmt::format("/pairs/{}/render/{}", pair_id, to_string(slot));
}

json pair_payload(const ServedPair & served, const Scene & scene, const std::string & session_id, bool flip)
{
  const PreferencePair shown = flip ? flipped(served.pair) : served.pair;
  json slots = json::object();
  for (const Slot s : {Slot::kA, Slot::kB}) {
    const auto & c = shown.candidate(s);
    json scores = json::object();
    scores["ep"] = c.sub_scores.ep ? json(*c.sub_scores.ep) : json(nullptr);
    scores["lk"] = c.sub_scores.lk ? json(*c.sub_scores.lk) : json(nullptr);
    slots[std::string(to_string(s))] = {
      {"trajectory", c.trajectory},
      {"sub_scores", scores},
      {"render_url", render_url(shown.pair_id, s)},
    };
  }
  return {
    {"schema", kApiSchema},
    {"kind", "pair"},
    {"session_id", session_id},
    {"pair_id", shown.pair_id},
    {"scene_id", shown.scene_id},
    {"position", served.position},
    {"total", served.total},
    {"ego_status",
     {{"velocity", scene.ego.velocity},
      {"acceleration", scene.ego.acceleration},
      {"driving_command", to_string(scene.ego.driving_command)}}},
    {"camera_refs", scene.camera_refs.value_or(std::vector<std::string>{})},
    {"slots", slots},
  };
}

json end_of_queue_payload(const AnnotationSession & session)
{
  return {
    {"schema", kApiSchema},
    {"kind", "end_of_queue"},
    {"session_id", session.session_id},
    {"served", session.assigned.size()},
  };
}

namespace
{

json session_payload(const AnnotationSession & s)
{
  json j = s;
  j["schema"] = kApiSchema;
  j["kind"] = "session";
  return j;
}

void send_json(httplib::Response & res, int status, const json & body)
{
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response & res, int status, std::string_view code, std::string_view message)
{
  send_json(res, status, {{"schema", kApiSchema}, {"kind", "error"}, {"error", code}, {"message", message}});
}

json parse_body(const httplib::Request & req)
{
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) {
      throw PreconditionError("request body must be a JSON object");
    }
    return j;
  } catch (const json::exception & e) {
    throw PreconditionError(fmt::format("invalid JSON body: {}", e.what()));
  }
}

std::string string_field(const json & body, const char * key, std::string fallback = {})
{
  const auto it = body.find(key);
  if (it == body.end()) {
    return fallback;
  }
  if (!it->is_string()) {
    throw PreconditionError(fmt::format("field '{}' must be a string", key));
  }
  return it->get<std::string>();
}

}  // namespace

struct AnnotationServer::Impl
{
  AnnotationStore & store;
  const std::map<std::string, Scene> & scenes;
  ServerOptions options;
  httplib::Server server;
  std::thread thread;
  std::mutex render_mutex;
  std::map<std::string, std::string> render_cache;

  Impl(AnnotationStore & st, const std::map<std::string, Scene> & sc, ServerOptions o)
  : store(st), scenes(sc), options(std::move(o))
  {
    options.render.validate();
    routes();
  }

  const Scene & scene_for(const PreferencePair & p) const
  {
    const auto it = scenes.find(p.scene_id);
    if (it == scenes.end()) {
      throw DataError(fmt::format("pair {}: scene {} not loaded", p.pair_id, p.scene_id));
    }
    return it->second;
  }

  AnnotationSession authorized_session(const httplib::Request & req, const std::string & id) const
  {
    auto s = store.session(id);
    if (req.has_header(kAnnotatorHeader) && req.get_header_value(kAnnotatorHeader) != s.annotator_id) {
      throw ForbiddenError(fmt::format("session {} belongs to another annotator", id));
    }
    return s;
  }

  template <typename F>
  httplib::Server::Handler guarded(F f)
  {
    return [f](const httplib::Request & req, httplib::Response & res) {
      try {
        f(req, res);
      } catch (const NotFoundError & e) {
        send_error(res, 404, "not_found", e.what());
      } catch (const ForbiddenError & e) {
        send_error(res, 403, "forbidden", e.what());
      } catch (const PreconditionError & e) {
        send_error(res, 400, "bad_request", e.what());
      } catch (const std::exception & e) {
        send_error(res, 500, "internal", e.what());
      }
    };
  }

  void routes()
  {
    server.Get("/health", guarded([](const httplib::Request &, httplib::Response & res) {
      send_json(res, 200, {{"schema", kApiSchema}, {"kind", "health"}, {"status", "ok"}});
    }));

    server.Get("/guideline", guarded([this](const httplib::Request &, httplib::Response & res) {
      const std::string text = options.guideline_path ? read_file(*options.guideline_path) : std::string{};
      send_json(
        res, 200,
        {{"schema", kApiSchema}, {"kind", "guideline"}, {"version", options.guideline_version}, {"text", text}});
    }));

    server.Post("/sessions", guarded([this](const httplib::Request & req, httplib::Response & res) {
      const json body = parse_body(req);
      const std::string header = req.get_header_value(kAnnotatorHeader);
      const std::string annotator = string_field(body, "annotator_id", header);
      if (!header.empty() && annotator != header) {
        throw ForbiddenError("annotator_id does not match the annotator header");
      }
      Split split;
      try {
        split = split_from_string(string_field(body, "split", "test"));
      } catch (const Error & e) {
        throw PreconditionError(e.what());
      }
      const auto s = store.create_session(
        annotator, string_field(body, "guideline_version", options.guideline_version), split);
      send_json(res, 201, session_payload(s));
    }));

    server.Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request & req, httplib::Response & res) {
      send_json(res, 200, session_payload(authorized_session(req, req.matches[1])));
    }));

    server.Post(R"(/sessions/([^/]+)/close)", guarded([this](const httplib::Request & req, httplib::Response & res) {
      const std::string id = req.matches[1];
      authorized_session(req, id);
      store.close_session(id);
      send_json(res, 200, session_payload(store.session(id)));
    }));

    server.Get(R"(/sessions/([^/]+)/next)", guarded([this](const httplib::Request & req, httplib::Response & res) {
      const std::string id = req.matches[1];
      authorized_session(req, id);
      const auto served = store.next_pair(id);
      if (!served) {
        send_json(res, 200, end_of_queue_payload(store.session(id)));
        return;
      }
      send_json(res, 200, pair_payload(*served, scene_for(served->pair), id, options.flip));
    }));

    server.Post(R"(/sessions/([^/]+)/labels)", guarded([this](const httplib::Request & req, httplib::Response & res) {
      const std::string id = req.matches[1];
      authorized_session(req, id);
      const json body = parse_body(req);
      const std::string pair_id = string_field(body, "pair_id");
      Label label;
      try {
        label = label_from_string(string_field(body, "label"));
      } catch (const Error & e) {
        throw PreconditionError(e.what());
      }
      if (options.flip && (label == Label::kA || label == Label::kB)) {
        label = label == Label::kA ? Label::kB : Label::kA;
      }
      const auto result = store.submit_label(id, pair_id, label);
      json j = result.record;
      if (options.flip && (result.record.label == Label::kA || result.record.label == Label::kB)) {
        j["label"] = result.record.label == Label::kA ? "B" : "A";
      }
      j["schema"] = kApiSchema;
      j["kind"] = "label_record";
      j["created"] = result.created;
      send_json(res, result.created ? 201 : 200, j);
    }));

    server.Get("/export", guarded([this](const httplib::Request & req, httplib::Response & res) {
      Split split;
      try {
        split = split_from_string(req.has_param("split") ? req.get_param_value("split") : "test");
      } catch (const Error & e) {
        throw PreconditionError(e.what());
      }
      res.status = 200;
      res.set_content(store.export_split(split), "application/x-ndjson");
    }));

    server.Get(R"(/pairs/([^/]+)/render/([^/]+))", guarded([this](const httplib::Request & req, httplib::Response & res) {
      const std::string pair_id = req.matches[1];
      const std::string slot_text = req.matches[2];
      const PreferencePair * pair = store.find_pair(pair_id);
      if (!pair) {
        throw NotFoundError(fmt::format("unknown pair {}", pair_id));
      }
      if (slot_text != "A" && slot_text != "B") {
        throw NotFoundError(fmt::format("unknown slot {}", slot_text));
      }
      const std::string key = pair_id + "/" + slot_text;
      std::string png;
      {
        std::lock_guard lock(render_mutex);
        if (const auto it = render_cache.find(key); it != render_cache.end()) {
          png = it->second;
        }
      }
      if (png.empty()) {
        const PreferencePair shown = options.flip ? flipped(*pair) : *pair;
        const Slot slot = slot_text == "A" ? Slot::kA : Slot::kB;
        png = render_bev(scene_for(shown), shown.candidate(slot).trajectory, options.render);
        std::lock_guard lock(render_mutex);
        render_cache.emplace(key, png);
      }
      res.status = 200;
      res.set_content(png, "image/png");
    }));

    if (options.static_dir) {
      server.set_mount_point("/ui", options.static_dir->string());
    }
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(.*)", [](const httplib::Request &, httplib::Response & res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", std::string("Content-Type, ") + kAnnotatorHeader);
      res.status = 204;
    });
  }
};

AnnotationServer::AnnotationServer(
  AnnotationStore & store, const std::map<std::string, Scene> & scenes, ServerOptions options)
: impl_(std::make_unique<Impl>(store, scenes, std::move(options)))
{
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string & host, int port)
{
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) {
      throw ConfigError(fmt::format("cannot bind {}", host));
    }
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw ConfigError(fmt::format("cannot bind {}:{}", host, port));
  }
  return port;
}

void AnnotationServer::listen() { impl_->server.listen_after_bind(); }

int AnnotationServer::start(const std::string & host, int port)
{
  const int bound = bind(host, port);
  impl_->thread = std::thread([this] { listen(); });
  impl_->server.wait_until_ready();
  return bound;
}

void AnnotationServer::stop()
{
  if (!impl_) {
    return;
  }
  impl_->server.stop();
  if (impl_->thread.joinable()) {
    impl_->thread.join();
  }
}

}  // namespace critic_bench
