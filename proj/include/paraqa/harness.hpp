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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "paraqa/corpus.hpp"
#include "paraqa/metrics.hpp"

namespace paraqa {

enum class AdequacyLabel { Adequate, Inadequate, Trivial };

inline constexpr std::array<AdequacyLabel, 3> kAllAdequacyLabels = {AdequacyLabel::Adequate,
                                                                   AdequacyLabel::Inadequate, AdequacyLabel::Trivial};

std::string_view to_string(AdequacyLabel label);
std::optional<AdequacyLabel> parse_adequacy_label(std::string_view name);

struct AdequacyRecord {
  std::string uid;
  std::string system;
  AdequacyLabel label = AdequacyLabel::Inadequate;
  std::string annotator;
  std::string timestamp;
};

// JSONL rows {uid, system, label, annotator?, timestamp?}. An annotation
// export can be read directly.
std::vector<AdequacyRecord> load_adequacy_records(const std::filesystem::path &path);
std::vector<AdequacyRecord> load_adequacy_records_from_string(std::string_view jsonl);

std::vector<MetricRow> load_metric_rows(const std::filesystem::path &path);
std::vector<MetricRow> load_metric_rows_from_string(std::string_view jsonl);

// --- aggregation -----------------------------------------------------------

struct AggregateRow {
  std::string system;
  std::optional<QuestionKind> qtype;  // nullopt is the per-system average
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t n = 0;
  bool best = false;
};

struct AggregateReport {
  MetricKind metric = MetricKind::Cosine;
  std::vector<AggregateRow> rows;  // by system, then qtype name, average last

  std::string to_json() const;
  std::string to_text() const;
};

// Mean and population std per (system, qtype), plus per-system averages
// weighted by n. The best system per column is flagged; ties flag all.
AggregateReport aggregate_by_type(const std::vector<MetricRow> &rows, const Corpus &corpus,
                                  MetricKind metric = MetricKind::Cosine);

// --- adequacy against metrics ----------------------------------------------

struct AdequacyPoint {
  std::string system;
  std::size_t records = 0;
  std::size_t nontrivial = 0;
  double adequate_pct = 0.0;              // over all records
  std::optional<double> mean_metric;      // over non-trivial records; absent when none
};

// One point per system, sorted by system. Throws JoinFailure when a record
// has no metric row.
std::vector<AdequacyPoint> adequacy_vs_metric(const std::vector<AdequacyRecord> &records,
                                              const std::vector<MetricRow> &rows, MetricKind metric);

// Same, partitioned by the question type of each record's uid.
std::map<QuestionKind, std::vector<AdequacyPoint>> adequacy_vs_metric_by_type(
    const std::vector<AdequacyRecord> &records, const std::vector<MetricRow> &rows, const Corpus &corpus,
    MetricKind metric);

std::string adequacy_points_to_csv(const std::vector<AdequacyPoint> &points, MetricKind metric);

struct CorrelationCell {
  QuestionKind qtype = QuestionKind::Other;
  MetricKind metric = MetricKind::Cosine;
  double rho = 0.0;
  std::size_t systems = 0;
};

// Spearman rho of (adequate_pct, mean_metric) across the systems with a
// defined metric mean. Fewer than two such systems raise DegenerateInput.
CorrelationCell correlation_cell(const std::vector<AdequacyPoint> &points, QuestionKind qtype, MetricKind metric);

struct CorrelationTable {
  std::vector<CorrelationCell> cells;  // by qtype order, then metric order

  std::string to_json() const;
  std::string to_text() const;
};

CorrelationTable correlation_table(const std::vector<AdequacyRecord> &records, const std::vector<MetricRow> &rows,
                                   const Corpus &corpus, const std::vector<MetricKind> &metrics);

// --- error effect ----------------------------------------------------------

struct LabelFrequencies {
  std::size_t total = 0;
  std::map<AdequacyLabel, std::size_t> counts;

  double percent(AdequacyLabel label) const;
};

LabelFrequencies label_frequencies(const std::vector<AdequacyRecord> &records);

struct ErrorEffect {
  LabelFrequencies clean;
  LabelFrequencies error;

  std::string to_json() const;
  std::string to_text() const;
  std::string to_csv() const;
};

// Throws EmptySet when either list is empty.
ErrorEffect error_effect(const std::vector<AdequacyRecord> &clean, const std::vector<AdequacyRecord> &error);

}  // namespace paraqa
