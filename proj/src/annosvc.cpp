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

#include "paraqa/annosvc.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "paraqa/error.hpp"

namespace paraqa {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(AnnotationTask task) {
  return task == AnnotationTask::Adequacy ? "adequacy" : "dataset_error";
}

std::optional<AnnotationTask> parse_annotation_task(std::string_view name) {
  if (name == "adequacy") return AnnotationTask::Adequacy;
  if (name == "dataset_error") return AnnotationTask::DatasetError;
  return std::nullopt;
}

const std::vector<std::string> &label_set(AnnotationTask task) {
  static const std::vector<std::string> adequacy{"Adequate", "Inadequate", "Trivial"};
  static const std::vector<std::string> dataset_error{"NoError", "Question", "Paraphrase", "Both"};
  return task == AnnotationTask::Adequacy ? adequacy : dataset_error;
}

ordered_json LabelRecord::to_json() const {
  ordered_json j;
  j["session_id"] = session_id;
  j["item_id"] = item_id;
  j["uid"] = uid;
  if (!system.empty()) j["system"] = system;
  j["label"] = label;
  j["annotator"] = annotator;
  j["timestamp"] = timestamp;
  return j;
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

void write_all(int fd, const std::string &data, const std::filesystem::path &path) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("write " + path.string() + ": " + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) throw IoError("fsync " + path.string() + ": " + std::strerror(errno));
}

void fsync_dir(const std::filesystem::path &dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

std::string uid_of(const json &v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return v.dump();
  throw InvalidRequest("item uid must be a string or an integer");
}

}  // namespace

struct AnnotationStore::Session {
  mutable std::mutex mu;
  SessionSnapshot state;
  std::map<std::string, std::size_t> position;  // item_id -> index
  std::filesystem::path path;
  int fd = -1;

  ~Session() {
    if (fd >= 0) ::close(fd);
  }

  void recompute_cursor() {
    auto &s = state;
    s.cursor = s.items.size();
    for (std::size_t i = 0; i < s.items.size(); ++i) {
      if (!s.labels.contains(s.items[i]["item_id"].get<std::string>())) {
        s.cursor = i;
        break;
      }
    }
    s.state = s.cursor == s.items.size() ? SessionState::Complete : SessionState::Open;
  }

  void apply_create(const ordered_json &event) {
    state.session_id = event.at("session_id").get<std::string>();
    const auto task = parse_annotation_task(event.at("task").get<std::string>());
    if (!task) throw MalformedStore(path.string() + ": unknown task");
    state.task = *task;
    state.created = event.at("created").get<std::string>();
    for (const auto &item : event.at("items")) {
      position.emplace(item.at("item_id").get<std::string>(), state.items.size());
      state.items.push_back(item);
    }
    recompute_cursor();
  }

  void apply_label(const ordered_json &event) {
    const auto item_id = event.at("item_id").get<std::string>();
    auto it = position.find(item_id);
    if (it == position.end()) throw MalformedStore(path.string() + ": label for unknown item " + item_id);
    const auto &item = state.items[it->second];
    LabelRecord r;
    r.session_id = state.session_id;
    r.item_id = item_id;
    r.uid = item.at("uid").get<std::string>();
    if (item.contains("system")) r.system = item.at("system").get<std::string>();
    r.label = event.at("label").get<std::string>();
    r.annotator = event.at("annotator").get<std::string>();
    r.timestamp = event.at("timestamp").get<std::string>();
    if (state.annotator.empty()) state.annotator = r.annotator;
    state.labels[item_id] = std::move(r);
    recompute_cursor();
  }
};

AnnotationStore::AnnotationStore(std::filesystem::path data_dir, const Corpus *corpus, Clock clock)
    : data_dir_(std::move(data_dir)), corpus_(corpus), clock_(clock ? std::move(clock) : Clock(utc_now)) {
  std::error_code ec;
  std::filesystem::create_directories(data_dir_, ec);
  if (ec) throw IoError("cannot create " + data_dir_.string() + ": " + ec.message());
  std::vector<std::filesystem::path> journals;
  for (const auto &entry : std::filesystem::directory_iterator(data_dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") journals.push_back(entry.path());
  }
  std::sort(journals.begin(), journals.end());
  for (const auto &j : journals) replay(j);
}

AnnotationStore::~AnnotationStore() = default;

std::filesystem::path AnnotationStore::journal_path(const std::string &session_id) const {
  return data_dir_ / (session_id + ".jsonl");
}

void AnnotationStore::replay(const std::filesystem::path &journal) {
  std::ifstream in(journal, std::ios::binary);
  if (!in) throw IoError("cannot open " + journal.string());
  const std::string content{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  in.close();

  auto session = std::make_unique<Session>();
  session->path = journal;
  std::size_t offset = 0;
  std::size_t good_end = 0;
  std::size_t lineno = 0;
  while (offset < content.size()) {
    const auto nl = content.find('\n', offset);
    const bool terminated = nl != std::string::npos;
    const std::string line = content.substr(offset, terminated ? nl - offset : std::string::npos);
    const std::size_t next = terminated ? nl + 1 : content.size();
    ++lineno;
    ordered_json event;
    bool parsed = true;
    try {
      event = ordered_json::parse(line);
    } catch (const json::exception &) {
      parsed = false;
    }
    if (!parsed) {
      // Only the final line may be torn by a crash mid-append.
      if (next == content.size()) break;
      throw MalformedStore(journal.string() + ":" + std::to_string(lineno) + ": unreadable journal line");
    }
    if (!terminated) break;  // complete JSON but never acknowledged
    try {
      const auto kind = event.at("event").get<std::string>();
      if (lineno == 1) {
        if (kind != "create") throw MalformedStore(journal.string() + ": journal must start with a create event");
        session->apply_create(event);
      } else if (kind == "label") {
        session->apply_label(event);
      } else {
        throw MalformedStore(journal.string() + ":" + std::to_string(lineno) + ": unexpected event '" + kind + "'");
      }
    } catch (const json::exception &e) {
      throw MalformedStore(journal.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    good_end = next;
    offset = next;
  }
  if (good_end == 0) throw MalformedStore(journal.string() + ": no create event");
  if (good_end < content.size()) std::filesystem::resize_file(journal, good_end);

  session->fd = ::open(journal.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
  if (session->fd < 0) throw IoError("open " + journal.string() + ": " + std::strerror(errno));
  const std::string id = session->state.session_id;
  std::unique_lock lock(sessions_mu_);
  sessions_.emplace(id, std::move(session));
}

AnnotationStore::Session &AnnotationStore::session(const std::string &session_id) const {
  std::shared_lock lock(sessions_mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw UnknownSession(session_id);
  return *it->second;
}

std::string AnnotationStore::create_session(AnnotationTask task, const json &items) {
  if (!items.is_array()) throw InvalidRequest("items must be an array");
  if (items.empty()) throw EmptyItems("a session needs at least one item");

  ordered_json normalized = ordered_json::array();
  std::set<std::string> ids;
  for (const auto &item : items) {
    if (!item.is_object() || !item.contains("uid")) throw InvalidRequest("each item must be an object with a uid");
    const std::string uid = uid_of(item.at("uid"));
    const DataPoint *dp = nullptr;
    if (corpus_ != nullptr) {
      dp = corpus_->find(uid);
      if (dp == nullptr) throw UnknownUid(uid);
    }
    std::string system;
    if (item.contains("system")) {
      if (!item.at("system").is_string()) throw InvalidRequest("item system must be a string");
      system = item.at("system").get<std::string>();
    }
    if (task == AnnotationTask::Adequacy && system.empty()) throw InvalidRequest("adequacy item " + uid + " has no system");
    std::string item_id = task == AnnotationTask::Adequacy ? uid + "/" + system : uid;
    if (item.contains("item_id")) {
      if (!item.at("item_id").is_string() || item.at("item_id").get<std::string>().empty()) {
        throw InvalidRequest("item_id must be a nonempty string");
      }
      item_id = item.at("item_id").get<std::string>();
    }
    if (!ids.insert(item_id).second) throw InvalidRequest("duplicate item_id " + item_id);

    ordered_json out;
    out["item_id"] = item_id;
    out["uid"] = uid;
    if (!system.empty()) out["system"] = system;
    for (const auto &[key, value] : item.items()) {
      if (key == "item_id" || key == "uid" || key == "system") continue;
      out[key] = value;
    }
    if (dp != nullptr && !out.contains("question")) out["question"] = dp->question;
    if (dp != nullptr && task == AnnotationTask::DatasetError && !out.contains("paraphrase")) {
      out["paraphrase"] = dp->paraphrase;
    }
    normalized.push_back(std::move(out));
  }

  std::lock_guard create_lock(create_mu_);
  std::string id;
  int fd = -1;
  for (std::size_t n = session_ids().size() + 1;; ++n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%06zu", n);
    id = buf;
    fd = ::open(journal_path(id).c_str(), O_WRONLY | O_APPEND | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
    if (fd >= 0) break;
    if (errno != EEXIST) throw IoError("create " + journal_path(id).string() + ": " + std::strerror(errno));
  }

  ordered_json event;
  event["event"] = "create";
  event["session_id"] = id;
  event["task"] = to_string(task);
  event["created"] = clock_();
  event["items"] = std::move(normalized);

  auto session = std::make_unique<Session>();
  session->path = journal_path(id);
  session->fd = fd;
  write_all(fd, event.dump() + "\n", session->path);
  fsync_dir(data_dir_);
  session->apply_create(event);

  std::unique_lock lock(sessions_mu_);
  sessions_.emplace(id, std::move(session));
  return id;
}

std::optional<ordered_json> AnnotationStore::next_item(const std::string &session_id) const {
  Session &s = session(session_id);
  std::lock_guard lock(s.mu);
  if (s.state.cursor >= s.state.items.size()) return std::nullopt;
  return s.state.items[s.state.cursor];
}

void AnnotationStore::submit_label(const std::string &session_id, const std::string &item_id, const std::string &label,
                                   const std::string &annotator, bool overwrite) {
  Session &s = session(session_id);
  std::lock_guard lock(s.mu);
  if (!s.position.contains(item_id)) throw UnknownItem(item_id);
  const auto &labels = label_set(s.state.task);
  if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
    throw InvalidLabel("'" + label + "' is not a " + std::string(to_string(s.state.task)) + " label");
  }
  if (annotator.empty()) throw InvalidRequest("annotator is required");
  if (!s.state.annotator.empty() && s.state.annotator != annotator) {
    throw AnnotatorMismatch("session " + session_id + " belongs to annotator " + s.state.annotator);
  }
  if (s.state.labels.contains(item_id) && !overwrite) throw AlreadyLabeled(item_id);

  ordered_json event;
  event["event"] = "label";
  event["item_id"] = item_id;
  event["label"] = label;
  event["annotator"] = annotator;
  event["timestamp"] = clock_();
  event["overwrite"] = overwrite;
  write_all(s.fd, event.dump() + "\n", s.path);
  s.apply_label(event);
}

std::string AnnotationStore::export_jsonl(const std::string &session_id) const {
  Session &s = session(session_id);
  std::lock_guard lock(s.mu);
  std::string out;
  for (const auto &item : s.state.items) {
    auto it = s.state.labels.find(item["item_id"].get<std::string>());
    if (it != s.state.labels.end()) out += it->second.to_json().dump() + "\n";
  }
  return out;
}

SessionSnapshot AnnotationStore::snapshot(const std::string &session_id) const {
  Session &s = session(session_id);
  std::lock_guard lock(s.mu);
  return s.state;
}

std::vector<std::string> AnnotationStore::session_ids() const {
  std::shared_lock lock(sessions_mu_);
  std::vector<std::string> ids;
  for (const auto &[id, s] : sessions_) ids.push_back(id);
  return ids;
}

}  // namespace paraqa
