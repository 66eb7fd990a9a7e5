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

#include <Eigen/Core>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace paraqa {

struct EmbeddingVector {
  Eigen::VectorXd values;
  std::string model_id;

  Eigen::Index dim() const { return values.size(); }
};

enum class ProviderKind { FileStore, HttpService };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::FileStore;
  std::string location;  // path for file-store, base URL for http-service
  bool cache = true;

  // "file:<path>" or "http:<url>"; a bare "http://host:port" is accepted too.
  static ProviderConfig from_uri(std::string_view uri);
  // PARAQA_EMBED_URI, if set.
  static std::optional<ProviderConfig> from_env();
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  // One vector per input, order preserved. Thread-safe.
  virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) = 0;

  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string> &texts) {
    return embed_batch(std::span<const std::string>(texts));
  }
};

// JSONL rows {"text": ..., "vector": [...], "model_id": ...}; texts are
// keyed by their NFC form. model_id is optional per row but must agree
// across rows when present.
class FileStoreProvider final : public EmbeddingProvider {
 public:
  explicit FileStoreProvider(const std::filesystem::path &path);
  static FileStoreProvider from_string(std::string_view jsonl);

  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;
  using EmbeddingProvider::embed_batch;

  std::size_t size() const { return store_.size(); }
  Eigen::Index dim() const { return dim_; }
  const std::string &model_id() const { return model_id_; }

 private:
  FileStoreProvider() = default;
  void ingest(std::string_view jsonl, const std::string &source);

  std::unordered_map<std::string, EmbeddingVector> store_;
  Eigen::Index dim_ = 0;
  std::string model_id_;
};

// POST {base}/embed {"texts": [...]} -> {"model_id": ..., "vectors": [[...], ...]}.
// Misses are batched into one request; hits come from the in-memory cache.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(std::string base_url, bool cache = true, int timeout_seconds = 30);

  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;
  using EmbeddingProvider::embed_batch;

  std::size_t requests_sent() const;

 private:
  std::vector<EmbeddingVector> request(const std::vector<std::string> &texts);

  std::string base_url_;
  bool cache_enabled_;
  int timeout_seconds_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, EmbeddingVector> cache_;
  std::size_t requests_ = 0;
};

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig &config);

// Cosine similarity between the embeddings of a candidate and its source.
double similarity_cs(const std::string &candidate, const std::string &source, EmbeddingProvider &provider);

}  // namespace paraqa
