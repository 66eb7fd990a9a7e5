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

#include "paraqa/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <sstream>

#include "bundled.hpp"
#include "paraqa/error.hpp"
#include "paraqa/rng.hpp"

namespace paraqa {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(QuestionKind kind) {
  switch (kind) {
    case QuestionKind::SingleFact: return "SingleFact";
    case QuestionKind::TwoIntention: return "TwoIntention";
    case QuestionKind::Ranking: return "Ranking";
    case QuestionKind::Boolean: return "Boolean";
    case QuestionKind::Counting: return "Counting";
    case QuestionKind::Other: return "Other";
  }
  return "Other";
}

std::optional<QuestionKind> parse_question_kind(std::string_view name) {
  for (QuestionKind k : kAllQuestionKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::optional<DatasetFormat> parse_dataset_format(std::string_view name) {
  if (name == "auto") return DatasetFormat::Auto;
  if (name == "json-array" || name == "json") return DatasetFormat::JsonArray;
  if (name == "jsonl") return DatasetFormat::Jsonl;
  return std::nullopt;
}

namespace {

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::regex compile_pattern(const std::string &pattern, const std::string &where) {
  try {
    return std::regex(pattern, std::regex::ECMAScript | std::regex::icase);
  } catch (const std::regex_error &e) {
    throw MalformedRules(where + ": bad pattern '" + pattern + "': " + e.what());
  }
}

std::string now_iso8601() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string scalar_to_string(const json &v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return {};
  return v.dump();
}

std::vector<std::string> aliases_from(const json &v) {
  if (v.is_string()) return {v.get<std::string>()};
  if (v.is_array()) {
    std::vector<std::string> out;
    for (const auto &e : v) out.push_back(e.get<std::string>());
    if (!out.empty()) return out;
  }
  throw MalformedRules("field map entries must be a string or a nonempty list of strings");
}

class RecordReader {
 public:
  RecordReader(const FieldMap &fields, const RuleTable &rules) : fields_(fields), rules_(rules) {}

  DataPoint read(const json &record, const std::string &where) const {
    if (!record.is_object()) throw MalformedRecord(where + ": record is not a JSON object");

    std::set<std::string> consumed{"qtype"};
    auto take = [&](const std::vector<std::string> &aliases) -> const json * {
      for (const auto &key : aliases) {
        auto it = record.find(key);
        if (it != record.end()) {
          consumed.insert(key);
          return &*it;
        }
      }
      return nullptr;
    };

    DataPoint dp;
    const json *uid = take(fields_.uid);
    if (uid == nullptr) throw MalformedRecord(where + ": missing uid");
    if (uid->is_string()) {
      dp.uid = uid->get<std::string>();
    } else if (uid->is_number_integer()) {
      dp.uid = uid->dump();
    } else {
      throw MalformedRecord(where + ": uid must be a string or an integer");
    }
    if (dp.uid.empty()) throw MalformedRecord(where + ": empty uid");
    const std::string name = "record " + dp.uid;

    auto text_field = [&](const std::vector<std::string> &aliases, const char *field,
                          bool required) -> std::string {
      const json *v = take(aliases);
      if (v == nullptr) {
        if (required) throw MalformedRecord(name + ": missing '" + field + "'");
        return {};
      }
      if (v->is_array() || v->is_object()) {
        throw MalformedRecord(name + ": '" + field + "' is not a scalar");
      }
      return scalar_to_string(*v);
    };

    dp.question = text_field(fields_.question, "question", true);
    dp.paraphrase = text_field(fields_.paraphrase, "paraphrase", true);
    dp.sparql_wikidata = text_field(fields_.sparql_wikidata, "sparql_wikidata", false);
    dp.sparql_dbpedia = text_field(fields_.sparql_dbpedia, "sparql_dbpedia", false);

    for (const auto &[key, value] : record.items()) {
      if (consumed.contains(key)) continue;
      if (key == "metadata" && value.is_object()) {
        for (const auto &[mk, mv] : value.items()) dp.metadata[mk] = scalar_to_string(mv);
        continue;
      }
      dp.metadata[key] = scalar_to_string(value);
    }
    dp.qtype = classify_question_type(dp, rules_);
    return dp;
  }

 private:
  const FieldMap &fields_;
  const RuleTable &rules_;
};

DatasetFormat sniff(std::string_view content) {
  for (char c : content) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    return c == '[' ? DatasetFormat::JsonArray : DatasetFormat::Jsonl;
  }
  return DatasetFormat::Jsonl;
}

}  // namespace

RuleTable RuleTable::from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception &e) {
    throw MalformedRules(std::string("rule table is not valid JSON: ") + e.what());
  }
  RuleTable table;
  if (doc.contains("subtype_key")) table.subtype_key = doc.at("subtype_key").get<std::string>();
  if (!doc.contains("rules") || !doc.at("rules").is_array()) {
    throw MalformedRules("rule table needs a 'rules' array");
  }
  std::size_t index = 0;
  for (const auto &r : doc.at("rules")) {
    const std::string where = "rule " + std::to_string(index++);
    ClassificationRule rule;
    const auto kind = parse_question_kind(r.value("type", ""));
    if (!kind) throw MalformedRules(where + ": unknown type '" + r.value("type", "") + "'");
    rule.kind = *kind;
    rule.description = r.value("description", "");
    if (r.contains("metadata")) {
      const auto &m = r.at("metadata");
      rule.metadata_key = m.at("key").get<std::string>();
      rule.metadata_pattern = compile_pattern(m.value("pattern", ""), where);
    }
    if (r.contains("question")) {
      rule.question_pattern = compile_pattern(r.at("question").get<std::string>(), where);
    }
    if (!rule.metadata_key && !rule.question_pattern) {
      throw MalformedRules(where + ": rule has no condition");
    }
    table.rules.push_back(std::move(rule));
  }
  return table;
}

RuleTable RuleTable::from_file(const std::filesystem::path &path) { return from_json(read_file(path)); }

const RuleTable &RuleTable::bundled() {
  static const RuleTable table = from_json(bundled::rules_json());
  return table;
}

QuestionType classify_question_type(const DataPoint &dp, const RuleTable &rules) {
  for (const auto &rule : rules.rules) {
    if (rule.metadata_key) {
      auto it = dp.metadata.find(*rule.metadata_key);
      if (it == dp.metadata.end()) continue;
      if (rule.metadata_pattern && !std::regex_search(it->second, *rule.metadata_pattern)) continue;
    }
    if (rule.question_pattern && !std::regex_search(dp.question, *rule.question_pattern)) continue;
    return {rule.kind, {}};
  }
  QuestionType other{QuestionKind::Other, {}};
  if (auto it = dp.metadata.find(rules.subtype_key); it != dp.metadata.end()) {
    other.subtype = it->second;
  }
  return other;
}

FieldMap FieldMap::from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception &e) {
    throw MalformedRules(std::string("field map is not valid JSON: ") + e.what());
  }
  FieldMap map;
  if (doc.contains("uid")) map.uid = aliases_from(doc.at("uid"));
  if (doc.contains("question")) map.question = aliases_from(doc.at("question"));
  if (doc.contains("paraphrase")) map.paraphrase = aliases_from(doc.at("paraphrase"));
  if (doc.contains("sparql_wikidata")) map.sparql_wikidata = aliases_from(doc.at("sparql_wikidata"));
  if (doc.contains("sparql_dbpedia")) map.sparql_dbpedia = aliases_from(doc.at("sparql_dbpedia"));
  return map;
}

FieldMap FieldMap::from_file(const std::filesystem::path &path) { return from_json(read_file(path)); }

Corpus::Corpus(std::vector<DataPoint> items, Provenance provenance)
    : items_(std::move(items)), provenance_(std::move(provenance)) {
  for (QuestionKind k : kAllQuestionKinds) counts_[k] = 0;
  by_uid_.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (!by_uid_.emplace(items_[i].uid, i).second) throw DuplicateUid(items_[i].uid);
    ++counts_[items_[i].qtype.kind];
  }
}

std::size_t Corpus::count(QuestionKind kind) const { return counts_.at(kind); }

const DataPoint *Corpus::find(std::string_view uid) const {
  auto it = by_uid_.find(std::string(uid));
  return it == by_uid_.end() ? nullptr : &items_[it->second];
}

Corpus load_dataset_from_string(std::string_view content, const LoadOptions &options,
                                std::string source) {
  const RuleTable &rules = options.rules ? *options.rules : RuleTable::bundled();
  const RecordReader reader(options.fields, rules);
  const DatasetFormat format =
      options.format == DatasetFormat::Auto ? sniff(content) : options.format;

  std::vector<DataPoint> items;
  if (format == DatasetFormat::JsonArray) {
    json doc;
    try {
      doc = json::parse(content);
    } catch (const json::exception &e) {
      throw MalformedRecord(std::string("dataset is not a valid JSON array: ") + e.what());
    }
    if (!doc.is_array()) throw MalformedRecord("dataset top level is not a JSON array");
    items.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
      items.push_back(reader.read(doc[i], "record at index " + std::to_string(i)));
    }
  } else {
    std::istringstream lines{std::string(content)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      json record;
      try {
        record = json::parse(line);
      } catch (const json::exception &e) {
        throw MalformedRecord("line " + std::to_string(lineno) + ": " + e.what());
      }
      items.push_back(reader.read(record, "record at line " + std::to_string(lineno)));
    }
  }
  return Corpus(std::move(items), Provenance{std::move(source), now_iso8601()});
}

Corpus load_dataset(const std::filesystem::path &path, const LoadOptions &options) {
  return load_dataset_from_string(read_file(path), options, path.string());
}

void write_jsonl(const Corpus &corpus, std::ostream &out) {
  for (const auto &dp : corpus.items()) {
    ordered_json row;
    row["uid"] = dp.uid;
    row["question"] = dp.question;
    row["paraphrase"] = dp.paraphrase;
    row["sparql_wikidata"] = dp.sparql_wikidata;
    row["sparql_dbpedia"] = dp.sparql_dbpedia;
    row["metadata"] = ordered_json::object();
    for (const auto &[k, v] : dp.metadata) row["metadata"][k] = v;
    row["qtype"] = {{"kind", to_string(dp.qtype.kind)}, {"subtype", dp.qtype.subtype}};
    out << row.dump() << '\n';
  }
}

std::string to_jsonl(const Corpus &corpus) {
  std::ostringstream out;
  write_jsonl(corpus, out);
  return out.str();
}

Corpus subset(const Corpus &corpus, std::vector<DataPoint> items) {
  return Corpus(std::move(items), corpus.provenance());
}

std::vector<DataPoint> sample(const Corpus &corpus, QuestionKind kind, std::size_t n,
                              std::uint64_t seed) {
  std::vector<const DataPoint *> pool;
  for (const auto &dp : corpus.items()) {
    if (dp.qtype.kind == kind) pool.push_back(&dp);
  }
  if (n > pool.size()) {
    throw InsufficientItems(std::string(to_string(kind)) + ": available " +
                            std::to_string(pool.size()) + ", requested " + std::to_string(n));
  }
  Xorshift64Star rng(seed);
  std::vector<DataPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    out.push_back(*pool[i]);
  }
  return out;
}

}  // namespace paraqa
