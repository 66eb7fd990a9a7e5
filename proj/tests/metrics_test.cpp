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

#include "paraqa/metrics.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "paraqa/error.hpp"

namespace paraqa {
namespace {

using testing::oracle_bleu;
using testing::oracle_spearman;
using Tokens = std::vector<std::string>;

IbleuConfig with_alpha(double a) {
  IbleuConfig cfg;
  cfg.alpha = a;
  return cfg;
}

BleuConfig bleu_cfg(int max_n, Smoothing smoothing, std::string tokenizer = "default") {
  BleuConfig cfg;
  cfg.max_n = max_n;
  cfg.smoothing = smoothing;
  cfg.tokenizer = std::move(tokenizer);
  return cfg;
}

std::string join(const Tokens &t) {
  std::string s;
  for (const auto &w : t) s += (s.empty() ? "" : " ") + w;
  return s;
}

TEST(BleuTest, PerfectOverlapIsOne) {
  EXPECT_DOUBLE_EQ(bleu("what is the capital of chad", "what is the capital of chad"), 1.0);
}

TEST(BleuTest, NoUnigramOverlapIsZero) {
  EXPECT_EQ(bleu("alpha beta gamma delta", "one two three four"), 0.0);
  EXPECT_EQ(bleu("alpha beta gamma delta", "one two three four",
                 bleu_cfg(4, Smoothing::AddOneAboveUnigram)),
            0.0);
}

TEST(BleuTest, EmptyCandidateIsZero) { EXPECT_EQ(bleu("", "a b c"), 0.0); }

TEST(BleuTest, UnsmoothedZeroHigherOrderIsZero) {
  EXPECT_EQ(bleu("a b", "b a", bleu_cfg(4, Smoothing::None)), 0.0);
  EXPECT_GT(bleu("a b", "b a"), 0.0);
}

TEST(BleuTest, MatchesBruteForceOracleOn25RandomPairs) {
  const Tokens vocab = {"what", "is", "the", "of", "capital", "france", "who", "how", "many", "river", "?", "a"};
  std::mt19937 gen(20260101);
  std::uniform_int_distribution<std::size_t> len(1, 12);
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  for (int i = 0; i < 25; ++i) {
    Tokens c(len(gen));
    Tokens r(len(gen));
    for (auto &w : c) w = vocab[word(gen)];
    for (auto &w : r) w = vocab[word(gen)];
    EXPECT_NEAR(bleu(join(c), join(r)), oracle_bleu(c, r), 1e-9) << join(c) << " | " << join(r);
    EXPECT_NEAR(bleu(c, r), oracle_bleu(c, r), 1e-9);
  }
}

TEST(BleuTest, NotAssumedSymmetric) {
  const double ab = bleu("the capital of france", "what is the capital of france ?");
  const double ba = bleu("what is the capital of france ?", "the capital of france");
  EXPECT_NE(ab, ba);
}

TEST(BleuTest, ConfigValidation) {
  EXPECT_THROW(bleu("a", "a", bleu_cfg(0, Smoothing::AddOneAboveUnigram)), InvalidConfig);
  EXPECT_THROW(bleu("a", "a", bleu_cfg(5, Smoothing::AddOneAboveUnigram)), InvalidConfig);
  EXPECT_THROW(bleu("a", "a", bleu_cfg(4, Smoothing::AddOneAboveUnigram, "x")),
               InvalidConfig);
}

TEST(IbleuTest, CandidateEqualsReferenceDisjointFromSource) {
  EXPECT_EQ(ibleu("what is the capital of chad", "what is the capital of chad", "xx yy zz"), 0.7);
}

TEST(IbleuTest, AllThreeEqualIsPointFour) {
  const std::string s = "who is the mayor of paris ?";
  EXPECT_EQ(ibleu(s, s, s), 0.4);
}

TEST(IbleuTest, AlphaZero) {
  const std::string s = "who is the mayor of paris ?";
  EXPECT_EQ(ibleu(s, "zz", s, with_alpha(0.0)), -1.0);
}

TEST(IbleuTest, AlphaOutOfRange) {
  EXPECT_THROW(ibleu("a", "a", "a", with_alpha(1.5)), InvalidConfig);
  EXPECT_THROW(ibleu("a", "a", "a", with_alpha(-0.1)), InvalidConfig);
}

TEST(IbleuTest, MetricRowIdentity) {
  const std::vector<std::array<std::string, 3>> triples = {
      {"what is australia 's capital ?", "which city is the capital of australia ?",
       "what is the capital of australia ?"},
      {"how many countries border mexico ?", "what is the number of countries bordering mexico ?",
       "how many countries border mexico ?"},
      {"paris ?", "is paris the capital ?", "is the capital paris ?"}};
  for (double alpha : {0.0, 0.3, 0.7, 0.9, 1.0}) {
    for (const auto &[c, r, s] : triples) {
      const MetricRow row = score_candidate("u", "sys", c, r, s, with_alpha(alpha));
      EXPECT_NEAR(row.ibleu, alpha * row.bleu_cr - (1 - alpha) * row.bleu_cs, 1e-12);
      EXPECT_GE(row.ibleu, -(1 - alpha) - 1e-12);
      EXPECT_LE(row.ibleu, alpha + 1e-12);
      EXPECT_EQ(row.ibleu, ibleu(c, r, s, with_alpha(alpha)));
    }
  }
}

TEST(MetricRowTest, JsonRoundTrip) {
  MetricRow row = score_candidate("7", "en-fr", "a b c", "a b", "c d");
  row.cosine_cs = 0.25;
  const MetricRow back = metric_row_from_json(metric_row_to_json(row));
  EXPECT_EQ(back.uid, "7");
  EXPECT_EQ(back.bleu_cr, row.bleu_cr);
  EXPECT_EQ(back.ibleu, row.ibleu);
  EXPECT_EQ(back.cosine_cs, 0.25);
  row.cosine_cs.reset();
  EXPECT_FALSE(metric_row_from_json(metric_row_to_json(row)).cosine_cs.has_value());
}

TEST(CosineTest, Examples) {
  EXPECT_EQ(cosine_similarity(Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 0)), 1.0);
  EXPECT_EQ(cosine_similarity(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)), 0.0);
  EXPECT_NEAR(cosine_similarity(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(-1, -2, -3)), -1.0, 1e-15);
}

TEST(CosineTest, ScaleInvariantAndSelfIsOne) {
  const Eigen::Vector4d u(0.3, -1.2, 4.0, 2.5);
  const Eigen::Vector4d v(1.0, 0.5, -0.25, 3.0);
  EXPECT_NEAR(cosine_similarity(u, u), 1.0, 1e-12);
  EXPECT_NEAR(cosine_similarity(u, v), cosine_similarity(Eigen::Vector4d(7.5 * u), v), 1e-12);
}

TEST(CosineTest, Errors) {
  EXPECT_THROW(cosine_similarity(Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(3)), DimensionMismatch);
  EXPECT_THROW(cosine_similarity(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)), ZeroVector);
}

TEST(SpearmanTest, MonotoneAndAntimonotone) {
  EXPECT_EQ(spearman_rho({1, 2, 3}, {10, 20, 30}), 1.0);
  EXPECT_EQ(spearman_rho({1, 2, 3}, {3, 2, 1}), -1.0);
}

TEST(SpearmanTest, TieFixture) {
  const std::vector<double> x = {1, 2, 2, 4};
  const std::vector<double> y = {1, 3, 2, 4};
  EXPECT_NEAR(spearman_rho(x, y), oracle_spearman(x, y), 1e-12);
  // Golden value: ranks x = 1, 2.5, 2.5, 4; y = 1, 3, 2, 4.
  EXPECT_NEAR(spearman_rho(x, y), 0.9486832980505138, 1e-12);
}

TEST(SpearmanTest, InvariantUnderMonotoneTransform) {
  const std::vector<double> x = {0.3, 1.7, 0.9, 2.2, 1.1, 0.5};
  const std::vector<double> y = {10, 14, 9, 30, 12, 11};
  std::vector<double> ex;
  for (double v : x) ex.push_back(std::exp(v));
  EXPECT_NEAR(spearman_rho(x, y), spearman_rho(ex, y), 1e-12);
  EXPECT_NEAR(spearman_rho(x, y), oracle_spearman(x, y), 1e-12);
}

TEST(SpearmanTest, Errors) {
  EXPECT_THROW(spearman_rho({1, 2}, {1, 2, 3}), LengthMismatch);
  EXPECT_THROW(spearman_rho({1}, {1}), DegenerateInput);
  EXPECT_THROW(spearman_rho({2, 2, 2}, {1, 2, 3}), DegenerateInput);
}

TEST(SpearmanTest, EigenOverload) {
  Eigen::VectorXd x(4), y(4);
  x << 1, 2, 3, 4;
  y << 2, 4, 6, 100;
  EXPECT_EQ(spearman_rho(x, y), 1.0);
}

TEST(MetricKindTest, Names) {
  for (MetricKind m : {MetricKind::Cosine, MetricKind::Ibleu, MetricKind::BleuCr, MetricKind::BleuCs}) {
    EXPECT_EQ(parse_metric_kind(to_string(m)), m);
  }
  EXPECT_FALSE(parse_metric_kind("rouge"));
}

}  // namespace
}  // namespace paraqa
