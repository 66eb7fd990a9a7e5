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

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <nlohmann/json.hpp>

#include "paraqa/error.hpp"
#include "paraqa/metrics.hpp"
#include "stub_server.hpp"
#include "test_support.hpp"

namespace paraqa {
namespace {

using nlohmann::json;

TEST(FileStoreTest, LoadsFixture) {
  FileStoreProvider store(testing::fixture("embeddings3.jsonl"));
  EXPECT_EQ(store.size(), 3u);
  EXPECT_EQ(store.dim(), 3);
  EXPECT_EQ(store.model_id(), "fixture-3d");
}

TEST(FileStoreTest, VectorsAreBitwiseIdentical) {
  FileStoreProvider store(testing::fixture("embeddings3.jsonl"));
  const auto v = store.embed_batch(std::vector<std::string>{"Which city is the capital of Australia?"});
  ASSERT_EQ(v.size(), 1u);
  const double expected[] = {0.6, 0.8, 0.0};
  EXPECT_EQ(std::memcmp(v[0].values.data(), expected, sizeof expected), 0);
  EXPECT_EQ(v[0].model_id, "fixture-3d");
}

TEST(FileStoreTest, OrderPreservedAndMissingRaises) {
  FileStoreProvider store(testing::fixture("embeddings3.jsonl"));
  const auto v = store.embed_batch(std::vector<std::string>{"Canberra", "What is the capital of Australia?"});
  EXPECT_EQ(v[0].values(2), 2.5);
  EXPECT_EQ(v[1].values(0), 1.0);
  EXPECT_THROW(store.embed_batch(std::vector<std::string>{"Sydney"}), MissingEmbedding);
}

TEST(FileStoreTest, SimilarityFromStore) {
  FileStoreProvider store(testing::fixture("embeddings3.jsonl"));
  EXPECT_NEAR(similarity_cs("Which city is the capital of Australia?", "What is the capital of Australia?", store),
              0.6, 1e-15);
  EXPECT_EQ(similarity_cs("Canberra", "What is the capital of Australia?", store), 0.0);
}

TEST(FileStoreTest, NfcKeyed) {
  auto store = FileStoreProvider::from_string(R"({"text": "Café", "vector": [1, 2]})");
  EXPECT_NO_THROW(store.embed_batch(std::vector<std::string>{"Cafe\xcc\x81"}));
}

TEST(FileStoreTest, MalformedStores) {
  EXPECT_THROW(FileStoreProvider::from_string("not json"), MalformedStore);
  EXPECT_THROW(FileStoreProvider::from_string(R"({"text": "a"})"), MalformedStore);
  EXPECT_THROW(FileStoreProvider::from_string("{\"text\": \"a\", \"vector\": [1]}\n{\"text\": \"b\", \"vector\": [1, 2]}"),
               MalformedStore);
  EXPECT_THROW(FileStoreProvider::from_string(
                   "{\"text\": \"a\", \"vector\": [1], \"model_id\": \"x\"}\n"
                   "{\"text\": \"b\", \"vector\": [2], \"model_id\": \"y\"}"),
               MalformedStore);
  EXPECT_THROW(FileStoreProvider(testing::fixture("does-not-exist.jsonl")), IoError);
}

TEST(ProviderConfigTest, FromUri) {
  auto f = ProviderConfig::from_uri("file:/tmp/e.jsonl");
  EXPECT_EQ(f.kind, ProviderKind::FileStore);
  EXPECT_EQ(f.location, "/tmp/e.jsonl");
  auto h = ProviderConfig::from_uri("http://localhost:9000");
  EXPECT_EQ(h.kind, ProviderKind::HttpService);
  EXPECT_EQ(h.location, "http://localhost:9000");
  EXPECT_THROW(ProviderConfig::from_uri("ftp://x"), InvalidConfig);
  EXPECT_THROW(ProviderConfig::from_uri("file:"), InvalidConfig);
}

TEST(ProviderConfigTest, MakeFileProvider) {
  auto p = make_provider(ProviderConfig::from_uri("file:" + testing::fixture("embeddings3.jsonl").string()));
  EXPECT_EQ(p->embed_batch(std::vector<std::string>{"Canberra"})[0].dim(), 3);
}

// Embeds a text as [length, count of 'a'].
struct EmbedStub {
  testing::StubServer stub;
  std::atomic<int> calls{0};
  std::atomic<std::size_t> last_batch{0};
  int status = 200;
  int drop = 0;

  EmbedStub() {
    stub.server.Post("/embed", [this](const httplib::Request &req, httplib::Response &res) {
      ++calls;
      const auto body = json::parse(req.body);
      last_batch = body.at("texts").size();
      json vectors = json::array();
      for (const auto &t : body.at("texts")) {
        const auto s = t.get<std::string>();
        vectors.push_back({static_cast<double>(s.size()), static_cast<double>(std::count(s.begin(), s.end(), 'a'))});
      }
      for (int i = 0; i < drop && !vectors.empty(); ++i) vectors.erase(vectors.end() - 1);
      res.status = status;
      res.set_content(json{{"model_id", "stub"}, {"vectors", vectors}}.dump(), "application/json");
    });
    stub.start();
  }
};

TEST(HttpProviderTest, BatchesDedupesAndCaches) {
  EmbedStub s;
  HttpEmbeddingProvider p(s.stub.url());
  const auto v = p.embed_batch(std::vector<std::string>{"aa", "bbb", "aa"});
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(s.calls.load(), 1);
  EXPECT_EQ(s.last_batch.load(), 2u);
  EXPECT_EQ(v[0].values, v[2].values);
  EXPECT_EQ(v[1].values(0), 3.0);
  EXPECT_EQ(v[0].model_id, "stub");

  p.embed_batch(std::vector<std::string>{"aa", "bbb"});
  EXPECT_EQ(s.calls.load(), 1);
  p.embed_batch(std::vector<std::string>{"aa", "cccc"});
  EXPECT_EQ(s.calls.load(), 2);
  EXPECT_EQ(s.last_batch.load(), 1u);
  EXPECT_EQ(p.requests_sent(), 2u);
}

TEST(HttpProviderTest, CacheDisabled) {
  EmbedStub s;
  HttpEmbeddingProvider p(s.stub.url(), false);
  p.embed_batch(std::vector<std::string>{"x"});
  p.embed_batch(std::vector<std::string>{"x"});
  EXPECT_EQ(s.calls.load(), 2);
}

TEST(HttpProviderTest, Non200IsServiceUnavailable) {
  EmbedStub s;
  s.status = 503;
  HttpEmbeddingProvider p(s.stub.url());
  EXPECT_THROW(p.embed_batch(std::vector<std::string>{"x"}), ServiceUnavailable);
}

TEST(HttpProviderTest, WrongVectorCountIsMalformed) {
  EmbedStub s;
  s.drop = 1;
  HttpEmbeddingProvider p(s.stub.url());
  EXPECT_THROW(p.embed_batch(std::vector<std::string>{"x", "y"}), MalformedResponse);
}

TEST(HttpProviderTest, UnreachableIsServiceUnavailable) {
  int port;
  {
    testing::StubServer s;
    s.start();
    port = s.port();
  }
  HttpEmbeddingProvider p("http://127.0.0.1:" + std::to_string(port), true, 2);
  EXPECT_THROW(p.embed_batch(std::vector<std::string>{"x"}), ServiceUnavailable);
}

TEST(HttpProviderTest, SimilarityUsesService) {
  EmbedStub s;
  HttpEmbeddingProvider p(s.stub.url());
  // [2, 2] vs [2, 0]
  EXPECT_NEAR(similarity_cs("aa", "bb", p), 1.0 / std::sqrt(2.0), 1e-15);
}

}  // namespace
}  // namespace paraqa
