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

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "paraqa/corpus.hpp"

namespace httplib {
class Server;
}

namespace paraqa {

enum class AnnotationTask { Adequacy, DatasetError };

std::string_view to_string(AnnotationTask task);
std::optional<AnnotationTask> parse_annotation_task(std::string_view name);

// Adequacy: Adequate, Inadequate, Trivial.
// DatasetError: NoError, Question, Paraphrase, Both.
const std::vector<std::string> &label_set(AnnotationTask task);

struct LabelRecord {
  std::string session_id;
  std::string item_id;
  std::string uid;
  std::string system;  // adequacy items only
  std::string label;
  std::string annotator;
  std::string timestamp;

  nlohmann::ordered_json to_json() const;
  friend bool operator==(const LabelRecord &, const LabelRecord &) = default;
};

enum class SessionState { Open, Complete };

// Everything replay must reproduce.
struct SessionSnapshot {
  std::string session_id;
  AnnotationTask task = AnnotationTask::Adequacy;
  std::string created;
  std::vector<nlohmann::ordered_json> items;
  std::map<std::string, LabelRecord> labels;  // by item_id
  std::string annotator;
  std::size_t cursor = 0;  // index of the first unlabeled item
  SessionState state = SessionState::Open;

  friend bool operator==(const SessionSnapshot &, const SessionSnapshot &) = default;
};

// Sessions live in `data_dir` as one append-only JSONL journal each
// (<session_id>.jsonl). Every event is flushed and fsynced before the call
// returns. Existing journals are replayed on construction; a torn final
// line left by a crash is discarded and truncated away.
class AnnotationStore {
 public:
  using Clock = std::function<std::string()>;

  explicit AnnotationStore(std::filesystem::path data_dir, const Corpus *corpus = nullptr, Clock clock = {});
  ~AnnotationStore();
  AnnotationStore(const AnnotationStore &) = delete;
  AnnotationStore &operator=(const AnnotationStore &) = delete;

  // Items are JSON objects with a uid. Adequacy items also need a system;
  // item_id defaults to "<uid>/<system>" (adequacy) or the uid.
  std::string create_session(AnnotationTask task, const nlohmann::json &items);

  // First unlabeled item, or nullopt when every item is labeled.
  std::optional<nlohmann::ordered_json> next_item(const std::string &session_id) const;

  void submit_label(const std::string &session_id, const std::string &item_id, const std::string &label,
                    const std::string &annotator, bool overwrite = false);

  // One LabelRecord per labeled item, in item order.
  std::string export_jsonl(const std::string &session_id) const;

  SessionSnapshot snapshot(const std::string &session_id) const;
  std::vector<std::string> session_ids() const;
  const std::filesystem::path &data_dir() const { return data_dir_; }
  std::filesystem::path journal_path(const std::string &session_id) const;

 private:
  struct Session;

  Session &session(const std::string &session_id) const;
  void replay(const std::filesystem::path &journal);

  std::filesystem::path data_dir_;
  const Corpus *corpus_;
  Clock clock_;
  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
  std::mutex create_mu_;
};

// HTTP front end:
//   POST /sessions {task, items}                          -> {"session_id"}
//   GET  /sessions/{id}                                   -> progress summary
//   GET  /sessions/{id}/next                              -> item | {"done":true}
//   POST /sessions/{id}/labels {item_id, label, annotator, overwrite}
//                                                         -> {"ok":true}
//   GET  /sessions/{id}/export                            -> application/x-ndjson
// Failures answer {code, message} with 400, 404 or 409.
class AnnotationServer {
 public:
  explicit AnnotationServer(AnnotationStore &store, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~AnnotationServer();

  bool listen(const std::string &host, int port);
  int bind_to_any_port(const std::string &host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  AnnotationStore &store_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace paraqa
