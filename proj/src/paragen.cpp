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

#include "paraqa/paragen.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iterator>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "http_client.hpp"
#include "paraqa/error.hpp"
#include "paraqa/text.hpp"

namespace paraqa {

using json = nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string_view trim_ascii(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::map<std::string, std::vector<CandidateParaphrase>> CandidateSet::by_system() const {
  std::map<std::string, std::vector<CandidateParaphrase>> out;
  for (const auto &c : candidates) out[c.system].push_back(c);
  return out;
}

CandidateSet load_candidates_from_string(std::string_view jsonl, const Corpus *corpus) {
  CandidateSet set;
  std::unordered_set<std::string> reported;
  std::istringstream lines{std::string(jsonl)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno);
    json row;
    try {
      row = json::parse(line);
    } catch (const json::exception &e) {
      throw MalformedRow(where + ": " + e.what());
    }
    if (!row.is_object()) throw MalformedRow(where + ": not a JSON object");
    CandidateParaphrase c;
    if (!row.contains("uid")) throw MalformedRow(where + ": missing uid");
    if (row.at("uid").is_string()) {
      c.uid = row.at("uid").get<std::string>();
    } else if (row.at("uid").is_number_integer()) {
      c.uid = row.at("uid").dump();
    } else {
      throw MalformedRow(where + ": uid must be a string or an integer");
    }
    if (!row.contains("system") || !row.at("system").is_string() || row.at("system").get<std::string>().empty()) {
      throw MalformedRow(where + ": missing or empty system");
    }
    c.system = row.at("system").get<std::string>();
    if (!row.contains("text") || !row.at("text").is_string()) throw MalformedRow(where + ": missing text");
    c.text = row.at("text").get<std::string>();
    if (row.value("provenance", "precomputed") == "live-service") c.provenance = CandidateProvenance::LiveService;
    if (corpus != nullptr && !corpus->contains(c.uid) && reported.insert(c.uid).second) {
      set.unknown_uids.push_back(c.uid);
    }
    set.candidates.push_back(std::move(c));
  }
  return set;
}

CandidateSet load_candidates(const std::filesystem::path &path, const Corpus *corpus) {
  return load_candidates_from_string(read_file(path), corpus);
}

std::string candidate_to_json(const CandidateParaphrase &candidate) {
  nlohmann::ordered_json j;
  j["uid"] = candidate.uid;
  j["system"] = candidate.system;
  j["text"] = candidate.text;
  j["provenance"] =
      candidate.provenance == CandidateProvenance::LiveService ? "live-service" : "precomputed";
  return j.dump();
}

HttpTranslationService::HttpTranslationService(std::string base_url, std::set<std::string> languages,
                                               int timeout_seconds)
    : base_url_(std::move(base_url)), languages_(std::move(languages)), timeout_seconds_(timeout_seconds) {}

std::string HttpTranslationService::translate(const std::string &text, const std::string &src,
                                              const std::string &tgt) {
  const json body = {{"text", text}, {"src", src}, {"tgt", tgt}};
  const auto response = detail::post_json(base_url_, "/translate", body.dump(), timeout_seconds_);
  if (response.status != 200) {
    throw ServiceUnavailable("translation service returned HTTP " + std::to_string(response.status));
  }
  try {
    const auto doc = json::parse(response.body);
    return doc.at("text").get<std::string>();
  } catch (const json::exception &e) {
    throw MalformedResponse(std::string("translation response: ") + e.what());
  }
}

bool HttpTranslationService::supports(const std::string &language) const {
  return language == "en" || languages_.contains(language);
}

RecordedTranslationService::RecordedTranslationService(const std::filesystem::path &path) {
  ingest(read_file(path));
}

RecordedTranslationService RecordedTranslationService::from_string(std::string_view jsonl) {
  RecordedTranslationService s;
  s.ingest(jsonl);
  return s;
}

void RecordedTranslationService::ingest(std::string_view jsonl) {
  std::istringstream lines{std::string(jsonl)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto row = json::parse(line);
      const auto src = row.at("src").get<std::string>();
      const auto tgt = row.at("tgt").get<std::string>();
      table_[{src, tgt, row.at("text").get<std::string>()}] = row.at("output").get<std::string>();
      languages_.insert(src);
      languages_.insert(tgt);
    } catch (const json::exception &e) {
      throw MalformedRow("recording line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::string RecordedTranslationService::translate(const std::string &text, const std::string &src,
                                                  const std::string &tgt) {
  auto it = table_.find({src, tgt, text});
  if (it == table_.end()) throw ServiceUnavailable("no recorded " + src + "->" + tgt + " translation for: " + text);
  return it->second;
}

bool RecordedTranslationService::supports(const std::string &language) const {
  return languages_.contains(language);
}

CandidateParaphrase backtranslate(const std::string &question, const std::string &pivot,
                                  TranslationService &service, std::string uid) {
  if (pivot == "en" || !service.supports(pivot)) throw UnsupportedPivot(pivot);
  const std::string forward = service.translate(question, "en", pivot);
  std::string back = service.translate(forward, pivot, "en");
  return {std::move(uid), "en-" + pivot, std::move(back), CandidateProvenance::LiveService};
}

std::vector<CandidateParaphrase> backtranslate_all(const std::vector<DataPoint> &items, const std::string &pivot,
                                                   TranslationService &service, std::size_t max_in_flight) {
  if (pivot == "en" || !service.supports(pivot)) throw UnsupportedPivot(pivot);
  std::vector<CandidateParaphrase> out(items.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      try {
        out[i] = backtranslate(items[i].question, pivot, service, items[i].uid);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(items.size());
        return;
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(max_in_flight, 1, std::max<std::size_t>(items.size(), 1));
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::string_view to_string(PpdbRelation relation) {
  switch (relation) {
    case PpdbRelation::Equivalence: return "Equivalence";
    case PpdbRelation::ForwardEntailment: return "ForwardEntailment";
    case PpdbRelation::ReverseEntailment: return "ReverseEntailment";
    case PpdbRelation::Exclusion: return "Exclusion";
    case PpdbRelation::OtherRelated: return "OtherRelated";
    case PpdbRelation::Independent: return "Independent";
  }
  return "";
}

std::optional<PpdbRelation> parse_ppdb_relation(std::string_view name) {
  for (auto r : {PpdbRelation::Equivalence, PpdbRelation::ForwardEntailment, PpdbRelation::ReverseEntailment,
                 PpdbRelation::Exclusion, PpdbRelation::OtherRelated, PpdbRelation::Independent}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

std::string PpdbIndex::key(std::string_view phrase) {
  return text::nfc(text::to_lower(text::collapse_whitespace(phrase)));
}

const std::vector<PpdbEntry> &PpdbIndex::lookup(std::string_view phrase) const {
  static const std::vector<PpdbEntry> kEmpty;
  auto it = by_phrase_.find(key(phrase));
  return it == by_phrase_.end() ? kEmpty : it->second;
}

void PpdbIndex::write(std::ostream &out) const {
  for (const auto &[k, entries] : by_phrase_) {
    for (const auto &e : entries) {
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof buf, e.score);
      out << e.label << " ||| " << e.lhs_phrase << " ||| " << e.rhs_phrase << " ||| PPDB2.0Score="
          << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << " |||  ||| "
          << to_string(e.relation) << '\n';
    }
  }
}

namespace {

std::optional<PpdbEntry> parse_ppdb_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find("|||", start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim_ascii(line.substr(start)));
      break;
    }
    fields.push_back(trim_ascii(line.substr(start, pos - start)));
    start = pos + 3;
  }
  if (fields.size() != 6) return std::nullopt;

  PpdbEntry e;
  e.label = std::string(fields[0]);
  e.lhs_phrase = std::string(fields[1]);
  e.rhs_phrase = std::string(fields[2]);
  if (e.lhs_phrase.empty() || e.rhs_phrase.empty()) return std::nullopt;

  std::optional<double> named;
  std::optional<double> first_numeric;
  std::istringstream features{std::string(fields[3])};
  std::string feature;
  while (features >> feature) {
    const auto eq = feature.find('=');
    if (eq == std::string::npos) continue;
    const auto value = parse_number(std::string_view(feature).substr(eq + 1));
    if (!value) continue;
    if (feature.compare(0, eq, "PPDB2.0Score") == 0) named = value;
    if (!first_numeric) first_numeric = value;
  }
  const auto score = named ? named : first_numeric;
  if (!score) return std::nullopt;
  e.score = *score;

  const auto relation = parse_ppdb_relation(fields[5]);
  if (!relation) return std::nullopt;
  e.relation = *relation;
  return e;
}

}  // namespace

PpdbIndex ppdb_load_from_stream(std::istream &in, const PpdbFilter &filter) {
  PpdbIndex index;
  index.filter_ = filter;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto entry = parse_ppdb_line(line);
    if (!entry) {
      ++index.skipped_;
      index.malformed_lines_.push_back(lineno);
      continue;
    }
    if (entry->score < filter.min_score || !filter.relations.contains(entry->relation)) {
      ++index.filtered_;
      continue;
    }
    index.by_phrase_[PpdbIndex::key(entry->lhs_phrase)].push_back(std::move(*entry));
    ++index.entry_count_;
  }
  for (auto &[k, entries] : index.by_phrase_) {
    std::stable_sort(entries.begin(), entries.end(), [](const PpdbEntry &a, const PpdbEntry &b) {
      if (a.score != b.score) return a.score > b.score;
      return a.rhs_phrase < b.rhs_phrase;
    });
  }
  return index;
}

PpdbIndex ppdb_load(const std::filesystem::path &path, const PpdbFilter &filter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return ppdb_load_from_stream(in, filter);
}

PpdbIndex ppdb_load_from_string(std::string_view content, const PpdbFilter &filter) {
  std::istringstream in{std::string(content)};
  return ppdb_load_from_stream(in, filter);
}

std::vector<PpdbEntry> ppdb_paraphrase(const PpdbIndex &index, std::string_view phrase, std::size_t k) {
  const auto &entries = index.lookup(phrase);
  const auto n = std::min(k, entries.size());
  return {entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace paraqa
