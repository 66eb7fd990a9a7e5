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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace paraqa {

// The five types FRANK answers, plus a catch-all. `Other` keeps the raw
// metadata subtype so unknown categories are still inspectable.
enum class QuestionKind : std::uint8_t { SingleFact, TwoIntention, Ranking, Boolean, Counting, Other };

inline constexpr std::array<QuestionKind, 6> kAllQuestionKinds = {
    QuestionKind::SingleFact, QuestionKind::TwoIntention, QuestionKind::Ranking,
    QuestionKind::Boolean,    QuestionKind::Counting,     QuestionKind::Other};

std::string_view to_string(QuestionKind kind);
std::optional<QuestionKind> parse_question_kind(std::string_view name);

struct QuestionType {
  QuestionKind kind = QuestionKind::Other;
  std::string subtype;

  friend bool operator==(const QuestionType &, const QuestionType &) = default;
};

struct DataPoint {
  std::string uid;
  std::string question;    // verbalised source question, stored verbatim
  std::string paraphrase;  // reference paraphrase, stored verbatim
  std::string sparql_wikidata;
  std::string sparql_dbpedia;
  std::map<std::string, std::string> metadata;
  QuestionType qtype;

  friend bool operator==(const DataPoint &, const DataPoint &) = default;
};

// One classification rule. A rule matches when every present condition
// matches; a rule with no conditions is rejected at load.
struct ClassificationRule {
  std::optional<std::string> metadata_key;
  std::optional<std::regex> metadata_pattern;
  std::optional<std::regex> question_pattern;
  QuestionKind kind = QuestionKind::Other;
  std::string description;
};

// Ordered rules, first match wins. `subtype_key` names the metadata entry
// recorded as the raw subtype when nothing matches.
struct RuleTable {
  std::vector<ClassificationRule> rules;
  std::string subtype_key = "subgraph";

  static RuleTable from_json(std::string_view json_text);
  static RuleTable from_file(const std::filesystem::path &path);
  // The bundled default table (compiled into the library).
  static const RuleTable &bundled();
};

QuestionType classify_question_type(const DataPoint &dp, const RuleTable &rules);

// Maps canonical field names to the keys used by a particular dump. Each
// canonical field may have several accepted aliases, tried in order.
struct FieldMap {
  std::vector<std::string> uid{"uid"};
  std::vector<std::string> question{"question"};
  std::vector<std::string> paraphrase{"paraphrase", "paraphrased_question"};
  std::vector<std::string> sparql_wikidata{"sparql_wikidata"};
  std::vector<std::string> sparql_dbpedia{"sparql_dbpedia", "sparql_dbpedia18"};

  static FieldMap from_json(std::string_view json_text);
  static FieldMap from_file(const std::filesystem::path &path);
};

enum class DatasetFormat { Auto, JsonArray, Jsonl };

std::optional<DatasetFormat> parse_dataset_format(std::string_view name);

struct Provenance {
  std::string source;
  std::string ingested_at;  // ISO-8601 UTC
};

class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<DataPoint> items, Provenance provenance);

  const std::vector<DataPoint> &items() const { return items_; }
  const Provenance &provenance() const { return provenance_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  std::size_t count(QuestionKind kind) const;
  const std::map<QuestionKind, std::size_t> &counts() const { return counts_; }

  const DataPoint *find(std::string_view uid) const;
  bool contains(std::string_view uid) const { return find(uid) != nullptr; }

 private:
  std::vector<DataPoint> items_;
  Provenance provenance_;
  std::map<QuestionKind, std::size_t> counts_;
  std::unordered_map<std::string, std::size_t> by_uid_;
};

struct LoadOptions {
  DatasetFormat format = DatasetFormat::Auto;
  FieldMap fields;
  const RuleTable *rules = nullptr;  // bundled table when null
};

Corpus load_dataset(const std::filesystem::path &path, const LoadOptions &options = {});
Corpus load_dataset_from_string(std::string_view content, const LoadOptions &options = {},
                                std::string source = "<memory>");

// Canonical JSONL: one object per line with uid, question, paraphrase,
// sparql_wikidata, sparql_dbpedia, metadata and the derived qtype.
void write_jsonl(const Corpus &corpus, std::ostream &out);
std::string to_jsonl(const Corpus &corpus);

// Returns a corpus holding the given items, classification untouched.
Corpus subset(const Corpus &corpus, std::vector<DataPoint> items);

// Deterministic sampling without replacement; see rng.hpp for the
// generator and the exact draw procedure.
std::vector<DataPoint> sample(const Corpus &corpus, QuestionKind kind, std::size_t n,
                              std::uint64_t seed);

}  // namespace paraqa
