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

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "paraqa/error.hpp"

namespace paraqa {

enum class Smoothing { None, AddOneAboveUnigram };

struct BleuConfig {
  int max_n = 4;
  Smoothing smoothing = Smoothing::AddOneAboveUnigram;
  std::string tokenizer = "default";

  void validate() const;
};

struct IbleuConfig {
  double alpha = 0.7;
  BleuConfig bleu;

  void validate() const;
};

std::vector<std::string> tokenize(std::string_view text);

// Sentence-level, single-reference BLEU:
//   BP * exp(1/N * sum_n log p_n),  BP = min(1, exp(1 - |r| / |c|))
// p_n is the clipped n-gram precision m/M. Under AddOneAboveUnigram a zero
// count for n >= 2 becomes (m + 1) / (M + 1). An empty candidate scores 0.
double bleu(std::string_view candidate, std::string_view reference, const BleuConfig &cfg = {});
double bleu(const std::vector<std::string> &candidate, const std::vector<std::string> &reference,
            const BleuConfig &cfg = {});

// alpha * BLEU(c, r) - (1 - alpha) * BLEU(c, s)
double ibleu(std::string_view candidate, std::string_view reference, std::string_view source,
             const IbleuConfig &cfg = {});

struct MetricRow {
  std::string uid;
  std::string system;
  std::string candidate;
  double bleu_cr = 0.0;
  double bleu_cs = 0.0;
  double ibleu = 0.0;
  std::optional<double> cosine_cs;
};

// Computes bleu_cr, bleu_cs and ibleu; the cosine is filled in by the
// embeddings layer when a provider is available.
MetricRow score_candidate(std::string uid, std::string system, std::string candidate,
                          std::string_view reference, std::string_view source,
                          const IbleuConfig &cfg = {});

enum class MetricKind { Cosine, Ibleu, BleuCr, BleuCs };

std::string_view to_string(MetricKind metric);
std::optional<MetricKind> parse_metric_kind(std::string_view name);
std::optional<double> metric_value(const MetricRow &row, MetricKind metric);

std::string metric_row_to_json(const MetricRow &row);
MetricRow metric_row_from_json(std::string_view line);

// dot(u, v) / (|u| |v|), clamped to [-1, 1].
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_similarity(const Eigen::MatrixBase<DerivedA> &u,
                                            const Eigen::MatrixBase<DerivedB> &v) {
  using Scalar = typename DerivedA::Scalar;
  if (u.size() != v.size()) {
    throw DimensionMismatch("cosine_similarity: " + std::to_string(u.size()) + " vs " +
                            std::to_string(v.size()));
  }
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) throw ZeroVector("cosine_similarity: zero vector");
  const Scalar c = u.dot(v.template cast<Scalar>()) / (nu * nv);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

// Fractional ranks (1-based); ties share the mean of the ranks they span.
template <typename Derived>
Eigen::Matrix<double, Eigen::Dynamic, 1> fractional_ranks(const Eigen::MatrixBase<Derived> &x) {
  const Eigen::Index n = x.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return x(a) < x(b); });
  Eigen::Matrix<double, Eigen::Dynamic, 1> ranks(n);
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j + 1 < n && x(order[j + 1]) == x(order[i])) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index k = i; k <= j; ++k) ranks(order[k]) = r;
    i = j + 1;
  }
  return ranks;
}

// Pearson correlation of fractional ranks. Centred ranks are multiples of
// one half, so the sums below are exact and perfect (anti)monotone input
// yields exactly +1 / -1.
template <typename DerivedA, typename DerivedB>
double spearman_rho(const Eigen::MatrixBase<DerivedA> &x, const Eigen::MatrixBase<DerivedB> &y) {
  if (x.size() != y.size()) {
    throw LengthMismatch("spearman_rho: " + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
  }
  if (x.size() < 2) throw DegenerateInput("spearman_rho: need at least two observations");
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  const double mean = 0.5 * static_cast<double>(x.size() + 1);
  const Eigen::VectorXd cx = rx.array() - mean;
  const Eigen::VectorXd cy = ry.array() - mean;
  const double sxx = cx.squaredNorm();
  const double syy = cy.squaredNorm();
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("spearman_rho: constant input");
  return std::clamp(cx.dot(cy) / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double spearman_rho(const std::vector<double> &x, const std::vector<double> &y) {
  return spearman_rho(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())),
                      Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())));
}

}  // namespace paraqa
