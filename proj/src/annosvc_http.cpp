// Copyright 2026 The paraqa Authors.
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

#include <httplib.h>

#include "paraqa/annosvc.hpp"
#include "paraqa/error.hpp"

namespace paraqa {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

int status_for(const Error &e) {
  const auto &c = e.code();
  if (c == "UnknownSession" || c == "UnknownItem") return 404;
  if (c == "AlreadyLabeled" || c == "AnnotatorMismatch") return 409;
  if (c == "IoError" || c == "MalformedStore") return 500;
  return 400;
}

void send_json(httplib::Response &res, int status, const ordered_json &body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response &res, int status, const std::string &code, const std::string &message) {
  send_json(res, status, ordered_json{{"code", code}, {"message", message}});
}

template <typename F>
void guarded(httplib::Response &res, F &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    send_error(res, status_for(e), e.code(), e.what());
  } catch (const json::exception &e) {
    send_error(res, 400, "InvalidRequest", e.what());
  }
}

json parse_body(const httplib::Request &req) {
  json body;
  try {
    body = json::parse(req.body);
  } catch (const json::exception &e) {
    throw InvalidRequest(std::string("request body is not JSON: ") + e.what());
  }
  if (!body.is_object()) throw InvalidRequest("request body must be a JSON object");
  return body;
}

}  // namespace

AnnotationServer::AnnotationServer(AnnotationStore &store, std::optional<std::filesystem::path> static_dir)
    : store_(store), server_(std::make_unique<httplib::Server>()) {
  auto &srv = *server_;

  srv.Post("/sessions", [this](const httplib::Request &req, httplib::Response &res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      if (!body.contains("task") || !body.at("task").is_string()) throw InvalidRequest("task is required");
      const auto task = parse_annotation_task(body.at("task").get<std::string>());
      if (!task) throw InvalidRequest("task must be adequacy or dataset_error");
      if (!body.contains("items")) throw InvalidRequest("items is required");
      const auto id = store_.create_session(*task, body.at("items"));
      send_json(res, 200, ordered_json{{"session_id", id}});
    });
  });

  srv.Get(R"(/sessions/([^/]+))", [this](const httplib::Request &req, httplib::Response &res) {
    guarded(res, [&] {
      const auto snap = store_.snapshot(req.matches[1]);
      ordered_json body;
      body["session_id"] = snap.session_id;
      body["task"] = to_string(snap.task);
      body["labels"] = label_set(snap.task);
      body["total"] = snap.items.size();
      body["labeled"] = snap.labels.size();
      body["state"] = snap.state == SessionState::Complete ? "complete" : "open";
      send_json(res, 200, body);
    });
  });

  srv.Get(R"(/sessions/([^/]+)/next)", [this](const httplib::Request &req, httplib::Response &res) {
    guarded(res, [&] {
      const auto item = store_.next_item(req.matches[1]);
      send_json(res, 200, item ? *item : ordered_json{{"done", true}});
    });
  });

  srv.Post(R"(/sessions/([^/]+)/labels)", [this](const httplib::Request &req, httplib::Response &res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      for (const char *key : {"item_id", "label", "annotator"}) {
        if (!body.contains(key) || !body.at(key).is_string()) {
          throw InvalidRequest(std::string(key) + " must be a string");
        }
      }
      bool overwrite = false;
      if (body.contains("overwrite")) {
        if (!body.at("overwrite").is_boolean()) throw InvalidRequest("overwrite must be a boolean");
        overwrite = body.at("overwrite").get<bool>();
      }
      store_.submit_label(req.matches[1], body.at("item_id").get<std::string>(), body.at("label").get<std::string>(),
                          body.at("annotator").get<std::string>(), overwrite);
      send_json(res, 200, ordered_json{{"ok", true}});
    });
  });

  srv.Get(R"(/sessions/([^/]+)/export)", [this](const httplib::Request &req, httplib::Response &res) {
    guarded(res, [&] {
      res.status = 200;
      res.set_content(store_.export_jsonl(req.matches[1]), "application/x-ndjson");
    });
  });

  if (static_dir) srv.set_mount_point("/", static_dir->string());
}

AnnotationServer::~AnnotationServer() { stop(); }

bool AnnotationServer::listen(const std::string &host, int port) { return server_->listen(host, port); }

int AnnotationServer::bind_to_any_port(const std::string &host) { return server_->bind_to_any_port(host); }

bool AnnotationServer::listen_after_bind() { return server_->listen_after_bind(); }

void AnnotationServer::stop() {
  if (server_) server_->stop();
}

void AnnotationServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace paraqa
