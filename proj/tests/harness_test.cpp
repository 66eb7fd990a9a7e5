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

#include <gtest/gtest.h>

#include <algorithm>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "paraqa/error.hpp"
#include "test_support.hpp"

namespace paraqa {
namespace {

const Corpus &corpus60() {
  static const Corpus c = load_dataset(testing::fixture("corpus60.json"));
  return c;
}

std::string label_of(const AggregateRow &r) {
  return r.qtype ? std::string(to_string(*r.qtype)) : "Average";
}

TEST(AggregateTest, MatchesExactOracle) {
  const auto rows = load_metric_rows(testing::fixture("scores50.jsonl"));
  ASSERT_EQ(rows.size(), 50u);
  const auto report = aggregate_by_type(rows, corpus60(), MetricKind::Cosine);

  std::istringstream csv(testing::read_file(testing::fixture("aggregate_expected.csv")));
  std::string line;
  std::getline(csv, line);
  std::size_t i = 0;
  while (std::getline(csv, line)) {
    std::istringstream fields(line);
    std::string system, qtype, mean, sd, n;
    std::getline(fields, system, ',');
    std::getline(fields, qtype, ',');
    std::getline(fields, mean, ',');
    std::getline(fields, sd, ',');
    std::getline(fields, n, ',');
    ASSERT_LT(i, report.rows.size());
    const auto &r = report.rows[i++];
    EXPECT_EQ(r.system, system);
    EXPECT_EQ(label_of(r), qtype);
    EXPECT_NEAR(r.mean, std::stod(mean), 1e-9) << system << "/" << qtype;
    EXPECT_NEAR(r.std, std::stod(sd), 1e-9) << system << "/" << qtype;
    EXPECT_EQ(r.n, std::stoul(n));
  }
  EXPECT_EQ(i, report.rows.size());
}

TEST(AggregateTest, BestFlagPerColumn) {
  const auto report = aggregate_by_type(load_metric_rows(testing::fixture("scores50.jsonl")), corpus60());
  for (const auto &r : report.rows) {
    const bool en_fr_wins = label_of(r) != "Boolean";  // separator leads only on Boolean
    EXPECT_EQ(r.best, (r.system == "en-fr") == en_fr_wins) << r.system << "/" << label_of(r);
  }
  EXPECT_NE(report.to_text().find("0.776 \xc2\xb1 0.086 *"), std::string::npos) << report.to_text();
}

TEST(AggregateTest, PermutationInvariantAndStable) {
  auto rows = load_metric_rows(testing::fixture("scores50.jsonl"));
  const std::string want = aggregate_by_type(rows, corpus60()).to_json();
  EXPECT_EQ(aggregate_by_type(rows, corpus60()).to_json(), want);
  std::mt19937 gen(3);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(rows.begin(), rows.end(), gen);
    EXPECT_EQ(aggregate_by_type(rows, corpus60()).to_json(), want);
  }
  const auto doc = nlohmann::json::parse(want);
  EXPECT_EQ(doc.at("weighting"), "weighted-by-n");
  EXPECT_EQ(doc.at("std"), "population");
}

TEST(AggregateTest, SingleRow) {
  MetricRow row;
  row.uid = "1";
  row.system = "s";
  row.cosine_cs = 0.5;
  const auto report = aggregate_by_type({row}, corpus60());
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_EQ(report.rows[0].mean, 0.5);
  EXPECT_EQ(report.rows[0].std, 0.0);
  EXPECT_EQ(report.rows[1].n, 1u);
  EXPECT_TRUE(report.rows[0].best);
}

TEST(AggregateTest, Errors) {
  MetricRow row;
  row.uid = "9999";
  row.system = "s";
  row.cosine_cs = 0.5;
  EXPECT_THROW(aggregate_by_type({row}, corpus60()), UnknownUid);
  row.uid = "1";
  row.cosine_cs.reset();
  EXPECT_THROW(aggregate_by_type({row}, corpus60()), InvalidConfig);
  EXPECT_NO_THROW(aggregate_by_type({row}, corpus60(), MetricKind::Ibleu));
  EXPECT_TRUE(aggregate_by_type({}, corpus60()).rows.empty());
}

TEST(LoadTest, MalformedRows) {
  EXPECT_THROW(load_adequacy_records_from_string(R"({"uid": "1", "system": "a", "label": "Fine"})"), MalformedRow);
  EXPECT_THROW(load_adequacy_records_from_string("{\"uid\": \"1\"}"), MalformedRow);
  EXPECT_THROW(load_metric_rows_from_string("[]"), MalformedRow);
  const auto recs = load_adequacy_records(testing::fixture("adequacy_clean.jsonl"));
  EXPECT_EQ(recs.size(), 50u);
}

MetricRow row(std::string uid, std::string system, double cosine) {
  MetricRow r;
  r.uid = std::move(uid);
  r.system = std::move(system);
  r.cosine_cs = cosine;
  r.ibleu = -cosine;
  return r;
}

AdequacyRecord rec(std::string uid, std::string system, AdequacyLabel label) {
  return {std::move(uid), std::move(system), label, "a1", ""};
}

TEST(AdequacyTest, PointsOverNonTrivial) {
  const std::vector<MetricRow> rows = {row("1", "A", 0.9), row("2", "A", 0.5), row("3", "A", 0.1),
                                       row("4", "A", 0.7), row("1", "B", 0.2)};
  const std::vector<AdequacyRecord> recs = {
      rec("1", "A", AdequacyLabel::Adequate), rec("2", "A", AdequacyLabel::Inadequate),
      rec("3", "A", AdequacyLabel::Trivial), rec("4", "A", AdequacyLabel::Adequate),
      rec("1", "B", AdequacyLabel::Trivial)};
  const auto points = adequacy_vs_metric(recs, rows, MetricKind::Cosine);
  ASSERT_EQ(points.size(), 2u);
  EXPECT_EQ(points[0].system, "A");
  EXPECT_EQ(points[0].records, 4u);
  EXPECT_EQ(points[0].nontrivial, 3u);
  EXPECT_EQ(points[0].adequate_pct, 50.0);
  ASSERT_TRUE(points[0].mean_metric);
  EXPECT_NEAR(*points[0].mean_metric, 0.7, 1e-15);
  EXPECT_EQ(points[1].adequate_pct, 0.0);
  EXPECT_FALSE(points[1].mean_metric);

  const auto csv = adequacy_points_to_csv(points, MetricKind::Cosine);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "system,adequate_pct,mean_cosine,records,nontrivial");

  EXPECT_THROW(adequacy_vs_metric({rec("5", "A", AdequacyLabel::Adequate)}, rows, MetricKind::Cosine), JoinFailure);
}

TEST(CorrelationTest, MonotoneSystemsGiveOne) {
  std::vector<AdequacyPoint> points;
  for (int i = 0; i < 6; ++i) {
    points.push_back({"sys" + std::to_string(i), 10, 10, 10.0 * i, 0.1 + 0.01 * i * i});
  }
  const auto cell = correlation_cell(points, QuestionKind::SingleFact, MetricKind::Cosine);
  EXPECT_EQ(cell.rho, 1.0);
  EXPECT_EQ(cell.systems, 6u);
  std::reverse(points.begin(), points.end());
  for (auto &p : points) p.mean_metric = -*p.mean_metric;
  EXPECT_EQ(correlation_cell(points, QuestionKind::SingleFact, MetricKind::Cosine).rho, -1.0);
}

TEST(CorrelationTest, TooFewSystems) {
  std::vector<AdequacyPoint> one = {{"a", 1, 1, 100.0, 0.5}};
  EXPECT_THROW(correlation_cell(one, QuestionKind::Ranking, MetricKind::Cosine), DegenerateInput);
  one.push_back({"b", 1, 0, 0.0, std::nullopt});
  EXPECT_THROW(correlation_cell(one, QuestionKind::Ranking, MetricKind::Cosine), DegenerateInput);
}

TEST(CorrelationTest, TableOverCorpus) {
  // Six systems over the SingleFact items; system i labels i of them Adequate
  // and scores i / 10 on cosine, so both metrics are monotone in adequacy.
  std::vector<std::string> uids;
  for (const auto &dp : corpus60().items()) {
    if (dp.qtype.kind == QuestionKind::SingleFact && uids.size() < 6) uids.push_back(dp.uid);
  }
  ASSERT_EQ(uids.size(), 6u);
  std::vector<AdequacyRecord> recs;
  std::vector<MetricRow> rows;
  for (int s = 0; s < 6; ++s) {
    const std::string sys = "sys" + std::to_string(s);
    for (int j = 0; j < 6; ++j) {
      recs.push_back(rec(uids[j], sys, j < s ? AdequacyLabel::Adequate : AdequacyLabel::Inadequate));
      rows.push_back(row(uids[j], sys, s / 10.0));
    }
  }
  const auto table = correlation_table(recs, rows, corpus60(), {MetricKind::Cosine, MetricKind::Ibleu});
  ASSERT_EQ(table.cells.size(), 2u);
  EXPECT_EQ(table.cells[0].rho, 1.0);
  EXPECT_EQ(table.cells[1].rho, -1.0);
  EXPECT_EQ(table.cells[0].qtype, QuestionKind::SingleFact);
  EXPECT_NE(table.to_text().find("SingleFact"), std::string::npos);
}

TEST(ErrorEffectTest, MatchesManifest) {
  const auto manifest = nlohmann::json::parse(testing::read_file(testing::fixture("adequacy.manifest.json")));
  const auto effect = error_effect(load_adequacy_records(testing::fixture("adequacy_clean.jsonl")),
                                   load_adequacy_records(testing::fixture("adequacy_error.jsonl")));
  for (AdequacyLabel l : kAllAdequacyLabels) {
    const std::string name(to_string(l));
    EXPECT_NEAR(effect.clean.percent(l), manifest["clean"][name].get<double>(), 1e-12) << name;
    EXPECT_NEAR(effect.error.percent(l), manifest["error"][name].get<double>(), 1e-12) << name;
  }
  EXPECT_EQ(effect.clean.total, 50u);
  EXPECT_GT(effect.error.percent(AdequacyLabel::Inadequate), effect.clean.percent(AdequacyLabel::Inadequate));
  EXPECT_EQ(effect.to_csv().substr(0, effect.to_csv().find('\n')), "set,label,count,percent");
}

TEST(ErrorEffectTest, EmptySets) {
  const std::vector<AdequacyRecord> some = {rec("1", "a", AdequacyLabel::Adequate)};
  EXPECT_THROW(error_effect({}, some), EmptySet);
  EXPECT_THROW(error_effect(some, {}), EmptySet);
}

}  // namespace
}  // namespace paraqa
