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

#include "paraqa/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "paraqa/error.hpp"

namespace paraqa {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(AdequacyLabel label) {
  switch (label) {
    case AdequacyLabel::Adequate: return "Adequate";
    case AdequacyLabel::Inadequate: return "Inadequate";
    case AdequacyLabel::Trivial: return "Trivial";
  }
  return "";
}

std::optional<AdequacyLabel> parse_adequacy_label(std::string_view name) {
  for (AdequacyLabel l : kAllAdequacyLabels) {
    if (to_string(l) == name) return l;
  }
  return std::nullopt;
}

namespace {

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename F>
void for_each_jsonl(std::string_view content, F &&fn) {
  std::istringstream lines{std::string(content)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(line);
    } catch (const json::exception &e) {
      throw MalformedRow("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const MalformedRow &e) {
      throw MalformedRow("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::string uid_string(const json &v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

// Sorted summation so the result does not depend on input order.
struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

Moments moments(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string &s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string qtype_label(const std::optional<QuestionKind> &q) {
  return q ? std::string(to_string(*q)) : std::string("Average");
}

}  // namespace

std::vector<AdequacyRecord> load_adequacy_records_from_string(std::string_view jsonl) {
  std::vector<AdequacyRecord> out;
  for_each_jsonl(jsonl, [&](const std::string &line) {
    const auto row = json::parse(line);
    AdequacyRecord r;
    r.uid = uid_string(row.at("uid"));
    r.system = row.at("system").get<std::string>();
    const auto label = row.at("label").get<std::string>();
    const auto parsed = parse_adequacy_label(label);
    if (!parsed) throw MalformedRow("unknown adequacy label '" + label + "'");
    r.label = *parsed;
    r.annotator = row.value("annotator", "");
    r.timestamp = row.value("timestamp", "");
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<AdequacyRecord> load_adequacy_records(const std::filesystem::path &path) {
  return load_adequacy_records_from_string(read_file(path));
}

std::vector<MetricRow> load_metric_rows_from_string(std::string_view jsonl) {
  std::vector<MetricRow> out;
  for_each_jsonl(jsonl, [&](const std::string &line) { out.push_back(metric_row_from_json(line)); });
  return out;
}

std::vector<MetricRow> load_metric_rows(const std::filesystem::path &path) {
  return load_metric_rows_from_string(read_file(path));
}

// --- aggregation -----------------------------------------------------------

AggregateReport aggregate_by_type(const std::vector<MetricRow> &rows, const Corpus &corpus, MetricKind metric) {
  std::map<std::string, std::map<QuestionKind, std::vector<double>>> groups;
  for (const auto &row : rows) {
    const DataPoint *dp = corpus.find(row.uid);
    if (dp == nullptr) throw UnknownUid(row.uid);
    const auto value = metric_value(row, metric);
    if (!value) {
      throw InvalidConfig("row " + row.uid + "/" + row.system + " has no " + std::string(to_string(metric)) + " value");
    }
    groups[row.system][dp->qtype.kind].push_back(*value);
  }

  AggregateReport report;
  report.metric = metric;
  for (const auto &[system, by_type] : groups) {
    std::vector<AggregateRow> typed;
    std::vector<double> all;
    for (const auto &[kind, values] : by_type) {
      const auto m = moments(values);
      typed.push_back({system, kind, m.mean, m.std, values.size(), false});
      all.insert(all.end(), values.begin(), values.end());
    }
    std::sort(typed.begin(), typed.end(),
              [](const AggregateRow &a, const AggregateRow &b) { return to_string(*a.qtype) < to_string(*b.qtype); });
    // Weighted by n: the sum of n_i * mean_i over sum n_i is the mean of
    // all items, so the pooled moments give both numbers.
    const auto pooled = moments(all);
    report.rows.insert(report.rows.end(), typed.begin(), typed.end());
    report.rows.push_back({system, std::nullopt, pooled.mean, pooled.std, all.size(), false});
  }

  std::map<std::string, double> best;
  for (const auto &r : report.rows) {
    const auto key = qtype_label(r.qtype);
    auto [it, inserted] = best.emplace(key, r.mean);
    if (!inserted) it->second = std::max(it->second, r.mean);
  }
  for (auto &r : report.rows) r.best = r.mean == best.at(qtype_label(r.qtype));
  return report;
}

std::string AggregateReport::to_json() const {
  ordered_json doc;
  doc["metric"] = to_string(metric);
  doc["weighting"] = "weighted-by-n";
  doc["std"] = "population";
  doc["rows"] = ordered_json::array();
  for (const auto &r : rows) {
    ordered_json row;
    row["system"] = r.system;
    row["qtype"] = qtype_label(r.qtype);
    row["mean"] = r.mean;
    row["std"] = r.std;
    row["n"] = r.n;
    row["best"] = r.best;
    doc["rows"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

std::string AggregateReport::to_text() const {
  std::vector<std::string> columns;
  for (QuestionKind k : kAllQuestionKinds) {
    const bool present = std::any_of(rows.begin(), rows.end(), [&](const auto &r) { return r.qtype == k; });
    if (present) columns.emplace_back(to_string(k));
  }
  columns.emplace_back("Average");

  std::vector<std::string> systems;
  std::map<std::pair<std::string, std::string>, std::string> cells;
  for (const auto &r : rows) {
    if (systems.empty() || systems.back() != r.system) systems.push_back(r.system);
    cells[{r.system, qtype_label(r.qtype)}] = fixed(r.mean, 3) + " ± " + fixed(r.std, 3) + (r.best ? " *" : "");
  }

  std::size_t first = 6;
  for (const auto &s : systems) first = std::max(first, s.size());
  const std::size_t width = 17;  // "0.000 ± 0.000 *" plus spacing; ± is two bytes

  std::ostringstream out;
  out << "# " << to_string(metric) << ", mean ± population std; * best per column; average weighted by n\n";
  out << pad("system", first + 2);
  for (const auto &c : columns) out << pad(c, width);
  out << '\n';
  for (const auto &s : systems) {
    out << pad(s, first + 2);
    for (const auto &c : columns) {
      auto it = cells.find({s, c});
      out << pad(it == cells.end() ? std::string("-") : it->second, width + (it == cells.end() ? 0 : 1));
    }
    out << '\n';
  }
  std::string text = out.str();
  // Strip trailing padding.
  std::string cleaned;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    line.erase(line.find_last_not_of(' ') + 1);
    cleaned += line + '\n';
  }
  return cleaned;
}

// --- adequacy against metrics ----------------------------------------------

std::vector<AdequacyPoint> adequacy_vs_metric(const std::vector<AdequacyRecord> &records,
                                              const std::vector<MetricRow> &rows, MetricKind metric) {
  std::map<std::pair<std::string, std::string>, const MetricRow *> joined;
  for (const auto &r : rows) joined.emplace(std::pair{r.uid, r.system}, &r);

  struct Acc {
    std::size_t records = 0;
    std::size_t adequate = 0;
    std::vector<double> values;
  };
  std::map<std::string, Acc> by_system;
  for (const auto &rec : records) {
    auto it = joined.find({rec.uid, rec.system});
    if (it == joined.end()) throw JoinFailure(rec.uid + "/" + rec.system);
    auto &acc = by_system[rec.system];
    ++acc.records;
    if (rec.label == AdequacyLabel::Adequate) ++acc.adequate;
    if (rec.label == AdequacyLabel::Trivial) continue;
    const auto value = metric_value(*it->second, metric);
    if (!value) throw JoinFailure(rec.uid + "/" + rec.system + ": no " + std::string(to_string(metric)) + " value");
    acc.values.push_back(*value);
  }

  std::vector<AdequacyPoint> points;
  for (const auto &[system, acc] : by_system) {
    AdequacyPoint p;
    p.system = system;
    p.records = acc.records;
    p.nontrivial = acc.values.size();
    p.adequate_pct = 100.0 * static_cast<double>(acc.adequate) / static_cast<double>(acc.records);
    if (!acc.values.empty()) p.mean_metric = moments(acc.values).mean;
    points.push_back(std::move(p));
  }
  return points;
}

std::map<QuestionKind, std::vector<AdequacyPoint>> adequacy_vs_metric_by_type(
    const std::vector<AdequacyRecord> &records, const std::vector<MetricRow> &rows, const Corpus &corpus,
    MetricKind metric) {
  std::map<QuestionKind, std::vector<AdequacyRecord>> parts;
  for (const auto &rec : records) {
    const DataPoint *dp = corpus.find(rec.uid);
    if (dp == nullptr) throw UnknownUid(rec.uid);
    parts[dp->qtype.kind].push_back(rec);
  }
  std::map<QuestionKind, std::vector<AdequacyPoint>> out;
  for (const auto &[kind, recs] : parts) out.emplace(kind, adequacy_vs_metric(recs, rows, metric));
  return out;
}

std::string adequacy_points_to_csv(const std::vector<AdequacyPoint> &points, MetricKind metric) {
  std::ostringstream out;
  out << "system,adequate_pct,mean_" << to_string(metric) << ",records,nontrivial\n";
  for (const auto &p : points) {
    out << p.system << ',' << json(p.adequate_pct).dump() << ',' << (p.mean_metric ? json(*p.mean_metric).dump() : "")
        << ',' << p.records << ',' << p.nontrivial << '\n';
  }
  return out.str();
}

CorrelationCell correlation_cell(const std::vector<AdequacyPoint> &points, QuestionKind qtype, MetricKind metric) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto &p : points) {
    if (!p.mean_metric) continue;
    x.push_back(p.adequate_pct);
    y.push_back(*p.mean_metric);
  }
  if (x.size() < 2) {
    throw DegenerateInput(std::string(to_string(qtype)) + "/" + std::string(to_string(metric)) +
                          ": need at least two systems with a metric mean");
  }
  return {qtype, metric, spearman_rho(x, y), x.size()};
}

CorrelationTable correlation_table(const std::vector<AdequacyRecord> &records, const std::vector<MetricRow> &rows,
                                   const Corpus &corpus, const std::vector<MetricKind> &metrics) {
  CorrelationTable table;
  std::map<MetricKind, std::map<QuestionKind, std::vector<AdequacyPoint>>> by_metric;
  for (MetricKind m : metrics) by_metric.emplace(m, adequacy_vs_metric_by_type(records, rows, corpus, m));
  for (QuestionKind k : kAllQuestionKinds) {
    for (MetricKind m : metrics) {
      const auto &parts = by_metric.at(m);
      auto it = parts.find(k);
      if (it == parts.end()) continue;
      table.cells.push_back(correlation_cell(it->second, k, m));
    }
  }
  return table;
}

std::string CorrelationTable::to_json() const {
  ordered_json doc;
  doc["cells"] = ordered_json::array();
  for (const auto &c : cells) {
    ordered_json cell;
    cell["qtype"] = to_string(c.qtype);
    cell["metric"] = to_string(c.metric);
    cell["rho"] = c.rho;
    cell["systems"] = c.systems;
    doc["cells"].push_back(std::move(cell));
  }
  return doc.dump(2) + "\n";
}

std::string CorrelationTable::to_text() const {
  std::vector<MetricKind> metrics;
  std::vector<QuestionKind> kinds;
  std::map<std::pair<QuestionKind, MetricKind>, double> rho;
  for (const auto &c : cells) {
    if (std::find(metrics.begin(), metrics.end(), c.metric) == metrics.end()) metrics.push_back(c.metric);
    if (std::find(kinds.begin(), kinds.end(), c.qtype) == kinds.end()) kinds.push_back(c.qtype);
    rho[{c.qtype, c.metric}] = c.rho;
  }
  std::ostringstream out;
  out << "# Spearman rho, adequate % against mean metric across systems\n";
  out << pad("qtype", 14);
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    const std::string name(to_string(metrics[i]));
    out << (i + 1 == metrics.size() ? name : pad(name, 10));
  }
  out << '\n';
  for (QuestionKind k : kinds) {
    out << pad(std::string(to_string(k)), 14);
    for (std::size_t i = 0; i < metrics.size(); ++i) {
      auto it = rho.find({k, metrics[i]});
      const std::string cell = it == rho.end() ? "-" : fixed(it->second, 3);
      out << (i + 1 == metrics.size() ? cell : pad(cell, 10));
    }
    out << '\n';
  }
  return out.str();
}

// --- error effect ----------------------------------------------------------

double LabelFrequencies::percent(AdequacyLabel label) const {
  if (total == 0) return 0.0;
  auto it = counts.find(label);
  const std::size_t c = it == counts.end() ? 0 : it->second;
  return 100.0 * static_cast<double>(c) / static_cast<double>(total);
}

LabelFrequencies label_frequencies(const std::vector<AdequacyRecord> &records) {
  LabelFrequencies f;
  for (AdequacyLabel l : kAllAdequacyLabels) f.counts[l] = 0;
  for (const auto &r : records) ++f.counts[r.label];
  f.total = records.size();
  return f;
}

ErrorEffect error_effect(const std::vector<AdequacyRecord> &clean, const std::vector<AdequacyRecord> &error) {
  if (clean.empty()) throw EmptySet("clean record set is empty");
  if (error.empty()) throw EmptySet("error record set is empty");
  return {label_frequencies(clean), label_frequencies(error)};
}

namespace {

ordered_json frequencies_json(const LabelFrequencies &f) {
  ordered_json j;
  j["total"] = f.total;
  for (AdequacyLabel l : kAllAdequacyLabels) {
    j[std::string(to_string(l))] = {{"count", f.counts.at(l)}, {"percent", f.percent(l)}};
  }
  return j;
}

}  // namespace

std::string ErrorEffect::to_json() const {
  ordered_json doc;
  doc["clean"] = frequencies_json(clean);
  doc["error"] = frequencies_json(error);
  return doc.dump(2) + "\n";
}

std::string ErrorEffect::to_text() const {
  std::ostringstream out;
  out << pad("set", 8);
  for (AdequacyLabel l : kAllAdequacyLabels) out << pad(std::string(to_string(l)), 12);
  out << "n\n";
  for (const auto &[name, f] : {std::pair{"clean", &clean}, std::pair{"error", &error}}) {
    out << pad(name, 8);
    for (AdequacyLabel l : kAllAdequacyLabels) out << pad(fixed(f->percent(l), 1) + "%", 12);
    out << f->total << '\n';
  }
  return out.str();
}

std::string ErrorEffect::to_csv() const {
  std::ostringstream out;
  out << "set,label,count,percent\n";
  for (const auto &[name, f] : {std::pair{"clean", &clean}, std::pair{"error", &error}}) {
    for (AdequacyLabel l : kAllAdequacyLabels) {
      out << name << ',' << to_string(l) << ',' << f->counts.at(l) << ',' << json(f->percent(l)).dump() << '\n';
    }
  }
  return out.str();
}

}  // namespace paraqa
