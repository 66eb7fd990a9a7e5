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

#include "paraqa/errscan.hpp"

#include <cctype>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_set>

#include "paraqa/text.hpp"

namespace paraqa {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FileExtension: return "FileExtension";
    case ErrorKind::EmptyField: return "EmptyField";
    case ErrorKind::MissingAccents: return "MissingAccents";
    case ErrorKind::TemplateTerm: return "TemplateTerm";
    case ErrorKind::IdenticalParaphrase: return "IdenticalParaphrase";
  }
  return "";
}

std::string_view to_string(Locus locus) {
  switch (locus) {
    case Locus::Question: return "Question";
    case Locus::Paraphrase: return "Paraphrase";
    case Locus::Both: return "Both";
  }
  return "";
}

std::optional<ErrorKind> parse_error_kind(std::string_view name) {
  for (ErrorKind k : kAllErrorKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

const DetectorConfig &default_detector_config() {
  static const DetectorConfig cfg;
  return cfg;
}

namespace {

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u >= 0x80 || c == '_';
}

std::optional<Locus> locus_of(bool in_question, bool in_paraphrase) {
  if (in_question && in_paraphrase) return Locus::Both;
  if (in_question) return Locus::Question;
  if (in_paraphrase) return Locus::Paraphrase;
  return std::nullopt;
}

double one_decimal_percent(std::size_t count, std::size_t total) {
  if (total == 0) return 0.0;
  return std::round(1000.0 * static_cast<double>(count) / static_cast<double>(total)) / 10.0;
}

std::string_view display_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FileExtension: return "File extensions";
    case ErrorKind::EmptyField: return "Empty field";
    case ErrorKind::MissingAccents: return "Missing accents";
    case ErrorKind::TemplateTerm: return "Template-like terms";
    case ErrorKind::IdenticalParaphrase: return "Identical paraphrase";
  }
  return "";
}

}  // namespace

bool detect_file_extension(std::string_view text, const DetectorConfig &cfg) {
  for (std::size_t dot = text.find('.'); dot != std::string_view::npos; dot = text.find('.', dot + 1)) {
    const std::string_view rest = text.substr(dot + 1);
    for (const auto &ext : cfg.extensions) {
      if (rest.size() < ext.size()) continue;
      bool same = true;
      for (std::size_t i = 0; i < ext.size() && same; ++i) {
        same = ascii_lower(rest[i]) == ascii_lower(ext[i]);
      }
      if (!same) continue;
      if (rest.size() == ext.size() || !is_word_byte(rest[ext.size()])) return true;
    }
  }
  return false;
}

bool detect_empty_or_na(std::string_view text, const DetectorConfig &cfg) {
  const std::string trimmed = text::to_lower(text::trim(text));
  if (trimmed.empty()) return true;
  return std::find(cfg.empty_markers.begin(), cfg.empty_markers.end(), trimmed) !=
         cfg.empty_markers.end();
}

bool detect_missing_accents(std::string_view question, std::string_view paraphrase) {
  const auto q_tokens = text::tokenize(question);
  const auto p_tokens = text::tokenize(paraphrase);
  const std::unordered_set<std::string> p_set(p_tokens.begin(), p_tokens.end());
  for (const auto &w : q_tokens) {
    if (!text::has_diacritic(w)) continue;
    const std::string stripped = text::strip_diacritics(w);
    if (stripped != w && p_set.contains(stripped) && !p_set.contains(w)) return true;
  }
  return false;
}

bool detect_template_terms(std::string_view text, const DetectorConfig &cfg) {
  return text.find_first_of(cfg.template_chars) != std::string_view::npos;
}

bool detect_identical(std::string_view question, std::string_view paraphrase) {
  return text::nfc(text::collapse_whitespace(question)) ==
         text::nfc(text::collapse_whitespace(paraphrase));
}

std::vector<ErrorFlag> detect_errors(const DataPoint &dp, const DetectorConfig &cfg) {
  std::vector<ErrorFlag> flags;
  const auto &q = dp.question;
  const auto &p = dp.paraphrase;
  if (auto l = locus_of(detect_file_extension(q, cfg), detect_file_extension(p, cfg))) {
    flags.push_back({ErrorKind::FileExtension, *l});
  }
  if (auto l = locus_of(detect_empty_or_na(q, cfg), detect_empty_or_na(p, cfg))) {
    flags.push_back({ErrorKind::EmptyField, *l});
  }
  if (detect_missing_accents(q, p)) flags.push_back({ErrorKind::MissingAccents, Locus::Paraphrase});
  if (auto l = locus_of(detect_template_terms(q, cfg), detect_template_terms(p, cfg))) {
    flags.push_back({ErrorKind::TemplateTerm, *l});
  }
  if (detect_identical(q, p)) flags.push_back({ErrorKind::IdenticalParaphrase, Locus::Both});
  return flags;
}

bool ErrorReport::is_flagged(std::string_view uid) const {
  return std::any_of(flagged.begin(), flagged.end(), [&](const FlaggedItem &f) { return f.uid == uid; });
}

std::vector<std::string> ErrorReport::uids_with(ErrorKind kind) const {
  std::vector<std::string> out;
  for (const auto &f : flagged) {
    if (std::any_of(f.flags.begin(), f.flags.end(), [&](const ErrorFlag &e) { return e.kind == kind; })) {
      out.push_back(f.uid);
    }
  }
  return out;
}

ErrorReport scan(const Corpus &corpus, const DetectorConfig &cfg) {
  ErrorReport report;
  report.corpus_size = corpus.size();
  for (ErrorKind k : kAllErrorKinds) report.categories[k] = {};
  for (const auto &dp : corpus.items()) {
    auto flags = detect_errors(dp, cfg);
    if (flags.empty()) continue;
    for (const auto &f : flags) ++report.categories[f.kind].count;
    report.flagged.push_back({dp.uid, std::move(flags)});
  }
  for (auto &[kind, stat] : report.categories) {
    stat.percent = one_decimal_percent(stat.count, report.corpus_size);
  }
  report.rejected.count = report.flagged.size();
  report.rejected.percent = one_decimal_percent(report.rejected.count, report.corpus_size);
  return report;
}

Corpus filter_rejected(const Corpus &corpus, const ErrorReport &report) {
  std::unordered_set<std::string> rejected;
  for (const auto &f : report.flagged) rejected.insert(f.uid);
  std::vector<DataPoint> kept;
  kept.reserve(corpus.size());
  for (const auto &dp : corpus.items()) {
    if (!rejected.contains(dp.uid)) kept.push_back(dp);
  }
  return subset(corpus, std::move(kept));
}

std::string report_to_json(const ErrorReport &report) {
  nlohmann::ordered_json doc;
  doc["corpus_size"] = report.corpus_size;
  doc["categories"] = nlohmann::ordered_json::object();
  for (ErrorKind k : kAllErrorKinds) {
    const auto &stat = report.categories.at(k);
    doc["categories"][std::string(to_string(k))] = {
        {"count", stat.count}, {"percent", stat.percent}, {"uids", report.uids_with(k)}};
  }
  std::vector<std::string> all;
  for (const auto &f : report.flagged) all.push_back(f.uid);
  doc["total"] = {{"count", report.rejected.count}, {"percent", report.rejected.percent}, {"uids", all}};
  doc["flags"] = nlohmann::ordered_json::array();
  for (const auto &f : report.flagged) {
    nlohmann::ordered_json item{{"uid", f.uid}, {"errors", nlohmann::ordered_json::array()}};
    for (const auto &e : f.flags) {
      item["errors"].push_back({{"kind", to_string(e.kind)}, {"locus", to_string(e.locus)}});
    }
    doc["flags"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

std::string report_to_text(const ErrorReport &report) {
  std::ostringstream out;
  char line[96];
  std::snprintf(line, sizeof line, "%-22s %13s\n", "Error category", "Frequency (%)");
  out << line;
  for (ErrorKind k : kAllErrorKinds) {
    std::snprintf(line, sizeof line, "%-22s %13.1f\n", std::string(display_name(k)).c_str(),
                  report.categories.at(k).percent);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-22s %13.1f\n", "Total", report.rejected.percent);
  out << line;
  return out.str();
}

}  // namespace paraqa
