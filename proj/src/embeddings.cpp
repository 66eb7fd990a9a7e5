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

#include "paraqa/embeddings.hpp"

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>

#include "http_client.hpp"
#include "paraqa/error.hpp"
#include "paraqa/metrics.hpp"
#include "paraqa/text.hpp"

namespace paraqa {

using json = nlohmann::json;

ProviderConfig ProviderConfig::from_uri(std::string_view uri) {
  ProviderConfig cfg;
  if (uri.starts_with("file:")) {
    cfg.kind = ProviderKind::FileStore;
    cfg.location = std::string(uri.substr(5));
  } else if (uri.starts_with("http://") || uri.starts_with("https://")) {
    cfg.kind = ProviderKind::HttpService;
    cfg.location = std::string(uri);
  } else if (uri.starts_with("http:")) {
    cfg.kind = ProviderKind::HttpService;
    std::string rest(uri.substr(5));
    cfg.location = rest.starts_with("//") ? "http:" + rest : rest;
  } else {
    throw InvalidConfig("embedding provider URI must start with file: or http: (got '" +
                        std::string(uri) + "')");
  }
  if (cfg.location.empty()) throw InvalidConfig("embedding provider URI has no location");
  return cfg;
}

std::optional<ProviderConfig> ProviderConfig::from_env() {
  const char *uri = std::getenv("PARAQA_EMBED_URI");
  if (uri == nullptr || *uri == '\0') return std::nullopt;
  return from_uri(uri);
}

namespace {

Eigen::VectorXd to_vector(const json &arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw MalformedResponse("vector component is not a number");
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

}  // namespace

FileStoreProvider::FileStoreProvider(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embedding store " + path.string());
  const std::string content{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  ingest(content, path.string());
}

FileStoreProvider FileStoreProvider::from_string(std::string_view jsonl) {
  FileStoreProvider p;
  p.ingest(jsonl, "<memory>");
  return p;
}

void FileStoreProvider::ingest(std::string_view jsonl, const std::string &source) {
  std::istringstream lines{std::string(jsonl)};
  std::string line;
  std::size_t lineno = 0;
  bool model_seen = false;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    json row;
    try {
      row = json::parse(line);
    } catch (const json::exception &e) {
      throw MalformedStore(where + ": " + e.what());
    }
    if (!row.is_object() || !row.contains("text") || !row.at("text").is_string() ||
        !row.contains("vector") || !row.at("vector").is_array() || row.at("vector").empty()) {
      throw MalformedStore(where + ": expected {\"text\": string, \"vector\": [numbers]}");
    }
    EmbeddingVector ev;
    try {
      ev.values = to_vector(row.at("vector"));
    } catch (const MalformedResponse &e) {
      throw MalformedStore(where + ": " + e.what());
    }
    if (row.contains("model_id")) {
      const std::string id = row.at("model_id").get<std::string>();
      if (model_seen && id != model_id_) {
        throw MalformedStore(where + ": model_id '" + id + "' differs from '" + model_id_ + "'");
      }
      model_id_ = id;
      model_seen = true;
    }
    if (dim_ == 0) dim_ = ev.dim();
    if (ev.dim() != dim_) {
      throw MalformedStore(where + ": dimension " + std::to_string(ev.dim()) + " differs from " +
                           std::to_string(dim_));
    }
    const std::string key = text::nfc(row.at("text").get<std::string>());
    auto [it, inserted] = store_.emplace(key, ev);
    if (!inserted && it->second.values != ev.values) {
      throw MalformedStore(where + ": conflicting vectors for the same text");
    }
  }
  for (auto &[key, ev] : store_) ev.model_id = model_id_;
}

std::vector<EmbeddingVector> FileStoreProvider::embed_batch(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto &t : texts) {
    auto it = store_.find(text::nfc(t));
    if (it == store_.end()) throw MissingEmbedding(t);
    out.push_back(it->second);
  }
  return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url, bool cache, int timeout_seconds)
    : base_url_(std::move(base_url)), cache_enabled_(cache), timeout_seconds_(timeout_seconds) {}

std::size_t HttpEmbeddingProvider::requests_sent() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::vector<EmbeddingVector> HttpEmbeddingProvider::request(const std::vector<std::string> &texts) {
  const json body = {{"texts", texts}};
  {
    std::lock_guard lock(mu_);
    ++requests_;
  }
  const auto response = detail::post_json(base_url_, "/embed", body.dump(), timeout_seconds_);
  if (response.status != 200) {
    throw ServiceUnavailable("embedding service returned HTTP " + std::to_string(response.status));
  }
  json doc;
  try {
    doc = json::parse(response.body);
  } catch (const json::exception &e) {
    throw MalformedResponse(std::string("embedding response is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("model_id") || !doc.at("model_id").is_string() ||
      !doc.contains("vectors") || !doc.at("vectors").is_array()) {
    throw MalformedResponse("embedding response needs model_id and vectors");
  }
  const auto &vectors = doc.at("vectors");
  if (vectors.size() != texts.size()) {
    throw MalformedResponse("expected " + std::to_string(texts.size()) + " vectors, got " +
                            std::to_string(vectors.size()));
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  const std::string model_id = doc.at("model_id").get<std::string>();
  for (const auto &v : vectors) {
    if (!v.is_array() || v.empty()) throw MalformedResponse("vector is not a nonempty array");
    out.push_back({to_vector(v), model_id});
    if (out.back().dim() != out.front().dim()) throw MalformedResponse("vectors differ in dimension");
  }
  return out;
}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed_batch(std::span<const std::string> texts) {
  std::vector<std::string> keys;
  keys.reserve(texts.size());
  for (const auto &t : texts) keys.push_back(text::nfc(t));

  std::unordered_map<std::string, EmbeddingVector> resolved;
  std::vector<std::string> misses;
  {
    std::lock_guard lock(mu_);
    for (const auto &k : keys) {
      if (resolved.contains(k)) continue;
      if (cache_enabled_) {
        if (auto it = cache_.find(k); it != cache_.end()) {
          resolved.emplace(k, it->second);
          continue;
        }
      }
      resolved.emplace(k, EmbeddingVector{});
      misses.push_back(k);
    }
  }
  if (!misses.empty()) {
    auto fetched = request(misses);
    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < misses.size(); ++i) {
      if (cache_enabled_) {
        // A concurrent batch may have cached the same text first; keep the
        // stored vector so every caller sees one value per text.
        auto [it, inserted] = cache_.emplace(misses[i], fetched[i]);
        resolved[misses[i]] = it->second;
      } else {
        resolved[misses[i]] = std::move(fetched[i]);
      }
    }
  }
  std::vector<EmbeddingVector> out;
  out.reserve(keys.size());
  for (const auto &k : keys) out.push_back(resolved.at(k));
  return out;
}

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig &config) {
  if (config.kind == ProviderKind::FileStore) return std::make_unique<FileStoreProvider>(config.location);
  return std::make_unique<HttpEmbeddingProvider>(config.location, config.cache);
}

double similarity_cs(const std::string &candidate, const std::string &source, EmbeddingProvider &provider) {
  const std::vector<std::string> texts{candidate, source};
  const auto vecs = provider.embed_batch(texts);
  return cosine_similarity(vecs[0].values, vecs[1].values);
}

}  // namespace paraqa
