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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "paraqa/corpus.hpp"

namespace paraqa {

enum class CandidateProvenance { Precomputed, LiveService };

struct CandidateParaphrase {
  std::string uid;
  std::string system;  // "en-fr", "separator", ...
  std::string text;
  CandidateProvenance provenance = CandidateProvenance::Precomputed;

  friend bool operator==(const CandidateParaphrase &, const CandidateParaphrase &) = default;
};

struct CandidateSet {
  std::vector<CandidateParaphrase> candidates;
  std::vector<std::string> unknown_uids;  // uids absent from the reference corpus

  std::map<std::string, std::vector<CandidateParaphrase>> by_system() const;
};

// JSONL rows {uid, system, text}. Unknown uids are reported, not dropped.
CandidateSet load_candidates(const std::filesystem::path &path, const Corpus *corpus = nullptr);
CandidateSet load_candidates_from_string(std::string_view jsonl, const Corpus *corpus = nullptr);
std::string candidate_to_json(const CandidateParaphrase &candidate);

// --- backtranslation -------------------------------------------------------

class TranslationService {
 public:
  virtual ~TranslationService() = default;
  virtual std::string translate(const std::string &text, const std::string &src, const std::string &tgt) = 0;
  virtual bool supports(const std::string &language) const = 0;
};

inline const std::set<std::string> &default_pivots() {
  static const std::set<std::string> pivots{"de", "fr", "hi", "ru", "zh"};
  return pivots;
}

// POST {base}/translate {"text", "src", "tgt"} -> {"text"}.
class HttpTranslationService final : public TranslationService {
 public:
  explicit HttpTranslationService(std::string base_url, std::set<std::string> languages = default_pivots(),
                                  int timeout_seconds = 60);
  std::string translate(const std::string &text, const std::string &src, const std::string &tgt) override;
  bool supports(const std::string &language) const override;

 private:
  std::string base_url_;
  std::set<std::string> languages_;
  int timeout_seconds_;
};

// Returns its input on both legs.
class EchoTranslationService final : public TranslationService {
 public:
  explicit EchoTranslationService(std::set<std::string> languages = default_pivots())
      : languages_(std::move(languages)) {}
  std::string translate(const std::string &text, const std::string &, const std::string &) override {
    return text;
  }
  bool supports(const std::string &language) const override {
    return language == "en" || languages_.contains(language);
  }

 private:
  std::set<std::string> languages_;
};

// Replays recorded translations: JSONL {"src", "tgt", "text", "output"}.
// An unrecorded request raises ServiceUnavailable.
class RecordedTranslationService final : public TranslationService {
 public:
  explicit RecordedTranslationService(const std::filesystem::path &path);
  static RecordedTranslationService from_string(std::string_view jsonl);

  std::string translate(const std::string &text, const std::string &src, const std::string &tgt) override;
  bool supports(const std::string &language) const override;

 private:
  RecordedTranslationService() = default;
  void ingest(std::string_view jsonl);

  std::map<std::tuple<std::string, std::string, std::string>, std::string> table_;
  std::set<std::string> languages_;
};

// en -> pivot -> en, tagged system "en-<pivot>" and provenance LiveService.
CandidateParaphrase backtranslate(const std::string &question, const std::string &pivot,
                                  TranslationService &service, std::string uid = {});

// Backtranslates every item with at most `max_in_flight` concurrent
// requests; output order matches input order.
std::vector<CandidateParaphrase> backtranslate_all(const std::vector<DataPoint> &items, const std::string &pivot,
                                                   TranslationService &service, std::size_t max_in_flight = 4);

// --- PPDB ------------------------------------------------------------------

enum class PpdbRelation : std::uint8_t {
  Equivalence,
  ForwardEntailment,
  ReverseEntailment,
  Exclusion,
  OtherRelated,
  Independent
};

std::string_view to_string(PpdbRelation relation);
std::optional<PpdbRelation> parse_ppdb_relation(std::string_view name);

struct PpdbEntry {
  std::string label;  // syntactic category, e.g. "[NN]"
  std::string lhs_phrase;
  std::string rhs_phrase;
  PpdbRelation relation = PpdbRelation::Equivalence;
  double score = 0.0;

  friend bool operator==(const PpdbEntry &, const PpdbEntry &) = default;
};

struct PpdbFilter {
  double min_score = -std::numeric_limits<double>::infinity();
  std::set<PpdbRelation> relations{PpdbRelation::Equivalence, PpdbRelation::ForwardEntailment,
                                   PpdbRelation::ReverseEntailment, PpdbRelation::Exclusion,
                                   PpdbRelation::OtherRelated, PpdbRelation::Independent};
};

class PpdbIndex {
 public:
  // Entries for `phrase` (lowercased, NFC), descending score.
  const std::vector<PpdbEntry> &lookup(std::string_view phrase) const;

  std::size_t size() const { return entry_count_; }
  std::size_t phrase_count() const { return by_phrase_.size(); }
  std::size_t skipped_lines() const { return skipped_; }
  std::size_t filtered_out() const { return filtered_; }
  const std::vector<std::size_t> &malformed_lines() const { return malformed_lines_; }
  const PpdbFilter &filter() const { return filter_; }

  // Writes surviving entries back in the six-field flat format.
  void write(std::ostream &out) const;

  static std::string key(std::string_view phrase);

 private:
  friend PpdbIndex ppdb_load_from_stream(std::istream &in, const PpdbFilter &filter);

  std::map<std::string, std::vector<PpdbEntry>> by_phrase_;
  std::size_t entry_count_ = 0;
  std::size_t skipped_ = 0;
  std::size_t filtered_ = 0;
  std::vector<std::size_t> malformed_lines_;
  PpdbFilter filter_;
};

// Flat PPDB 2.0 lines: LHS ||| PHRASE ||| PARAPHRASE ||| FEATURES ||| ALIGNMENT ||| ENTAILMENT.
// The score is the PPDB2.0Score feature, else the first numeric feature.
// Malformed lines are skipped and counted.
PpdbIndex ppdb_load(const std::filesystem::path &path, const PpdbFilter &filter = {});
PpdbIndex ppdb_load_from_stream(std::istream &in, const PpdbFilter &filter = {});
PpdbIndex ppdb_load_from_string(std::string_view content, const PpdbFilter &filter = {});

std::vector<PpdbEntry> ppdb_paraphrase(const PpdbIndex &index, std::string_view phrase, std::size_t k);

}  // namespace paraqa
