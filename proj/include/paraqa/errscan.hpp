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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "paraqa/corpus.hpp"

namespace paraqa {

enum class ErrorKind : std::uint8_t {
  FileExtension,
  EmptyField,
  MissingAccents,
  TemplateTerm,
  IdenticalParaphrase
};

inline constexpr std::array<ErrorKind, 5> kAllErrorKinds = {
    ErrorKind::FileExtension, ErrorKind::EmptyField, ErrorKind::MissingAccents,
    ErrorKind::TemplateTerm, ErrorKind::IdenticalParaphrase};

enum class Locus : std::uint8_t { Question, Paraphrase, Both };

std::string_view to_string(ErrorKind kind);
std::string_view to_string(Locus locus);
std::optional<ErrorKind> parse_error_kind(std::string_view name);

struct ErrorFlag {
  ErrorKind kind;
  Locus locus;

  friend bool operator==(const ErrorFlag &, const ErrorFlag &) = default;
};

struct DetectorConfig {
  std::vector<std::string> extensions{"jpg", "jpeg", "png", "gif", "svg", "pdf", "tif", "tiff"};
  std::vector<std::string> empty_markers{"n/a", "na", "none", "null", "nil", "-"};
  std::string template_chars = "{}";
};

const DetectorConfig &default_detector_config();

// Each detector is a pure function of its text arguments.
bool detect_file_extension(std::string_view text, const DetectorConfig &cfg = default_detector_config());
bool detect_empty_or_na(std::string_view text, const DetectorConfig &cfg = default_detector_config());
bool detect_missing_accents(std::string_view question, std::string_view paraphrase);
bool detect_template_terms(std::string_view text, const DetectorConfig &cfg = default_detector_config());
bool detect_identical(std::string_view question, std::string_view paraphrase);

// All five detectors on one data point, in ErrorKind order.
std::vector<ErrorFlag> detect_errors(const DataPoint &dp, const DetectorConfig &cfg = default_detector_config());

struct CategoryStat {
  std::size_t count = 0;
  double percent = 0.0;  // one decimal place
};

struct FlaggedItem {
  std::string uid;
  std::vector<ErrorFlag> flags;
};

struct ErrorReport {
  std::size_t corpus_size = 0;
  std::vector<FlaggedItem> flagged;  // corpus order, only items with >= 1 flag
  std::map<ErrorKind, CategoryStat> categories;
  CategoryStat rejected;

  bool is_flagged(std::string_view uid) const;
  std::vector<std::string> uids_with(ErrorKind kind) const;
};

ErrorReport scan(const Corpus &corpus, const DetectorConfig &cfg = default_detector_config());

// Corpus minus every flagged uid. The input corpus is untouched.
Corpus filter_rejected(const Corpus &corpus, const ErrorReport &report);

// {"corpus_size", "categories": {name: {count, percent, uids}}, "total": {...}}
std::string report_to_json(const ErrorReport &report);
// Aligned two-column table in the layout of the published error table.
std::string report_to_text(const ErrorReport &report);

}  // namespace paraqa
