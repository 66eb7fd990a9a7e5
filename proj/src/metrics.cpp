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

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <unordered_map>

#include "paraqa/text.hpp"

namespace paraqa {

void BleuConfig::validate() const {
  if (max_n < 1 || max_n > 4) throw InvalidConfig("BLEU max_n must be in [1, 4]");
  if (tokenizer != "default") throw InvalidConfig("unknown tokenizer '" + tokenizer + "'");
}

void IbleuConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidConfig("iBLEU alpha must be in [0, 1]");
  bleu.validate();
}

std::vector<std::string> tokenize(std::string_view text) { return text::tokenize(text); }

namespace {

using NgramCounts = std::unordered_map<std::string, int>;

NgramCounts count_ngrams(const std::vector<std::string> &tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

// alpha is applied as a decimal fixed-point weight (1e-9 resolution) so the
// two weights sum to exactly one: c = r = s at alpha 0.7 then yields the
// double nearest 0.4 instead of 0.7 - 0.30000000000000004.
double combine(double alpha, double bleu_cr, double bleu_cs) {
  constexpr double kScale = 1e9;
  const double a = std::round(alpha * kScale);
  return (a * bleu_cr - (kScale - a) * bleu_cs) / kScale;
}

}  // namespace

double bleu(const std::vector<std::string> &candidate, const std::vector<std::string> &reference,
            const BleuConfig &cfg) {
  cfg.validate();
  if (candidate.empty()) return 0.0;
  const auto c_len = static_cast<double>(candidate.size());
  const auto r_len = static_cast<double>(reference.size());

  double log_sum = 0.0;
  for (int order = 1; order <= cfg.max_n; ++order) {
    const auto n = static_cast<std::size_t>(order);
    const NgramCounts cand = count_ngrams(candidate, n);
    const NgramCounts ref = count_ngrams(reference, n);
    double matched = 0.0;
    for (const auto &[gram, count] : cand) {
      auto it = ref.find(gram);
      if (it != ref.end()) matched += std::min(count, it->second);
    }
    const double total = candidate.size() >= n ? static_cast<double>(candidate.size() - n + 1) : 0.0;
    double precision;
    if (matched > 0.0) {
      precision = matched / total;
    } else if (order >= 2 && cfg.smoothing == Smoothing::AddOneAboveUnigram) {
      precision = (matched + 1.0) / (total + 1.0);
    } else {
      return 0.0;
    }
    log_sum += std::log(precision);
  }
  const double bp = std::min(1.0, std::exp(1.0 - r_len / c_len));
  return std::clamp(bp * std::exp(log_sum / cfg.max_n), 0.0, 1.0);
}

double bleu(std::string_view candidate, std::string_view reference, const BleuConfig &cfg) {
  return bleu(tokenize(candidate), tokenize(reference), cfg);
}

double ibleu(std::string_view candidate, std::string_view reference, std::string_view source,
             const IbleuConfig &cfg) {
  cfg.validate();
  const auto c = tokenize(candidate);
  return combine(cfg.alpha, bleu(c, tokenize(reference), cfg.bleu), bleu(c, tokenize(source), cfg.bleu));
}

MetricRow score_candidate(std::string uid, std::string system, std::string candidate,
                          std::string_view reference, std::string_view source, const IbleuConfig &cfg) {
  cfg.validate();
  MetricRow row;
  const auto c = tokenize(candidate);
  row.uid = std::move(uid);
  row.system = std::move(system);
  row.candidate = std::move(candidate);
  row.bleu_cr = bleu(c, tokenize(reference), cfg.bleu);
  row.bleu_cs = bleu(c, tokenize(source), cfg.bleu);
  row.ibleu = combine(cfg.alpha, row.bleu_cr, row.bleu_cs);
  return row;
}

std::string_view to_string(MetricKind metric) {
  switch (metric) {
    case MetricKind::Cosine: return "cosine";
    case MetricKind::Ibleu: return "ibleu";
    case MetricKind::BleuCr: return "bleu_cr";
    case MetricKind::BleuCs: return "bleu_cs";
  }
  return "";
}

std::optional<MetricKind> parse_metric_kind(std::string_view name) {
  for (MetricKind m : {MetricKind::Cosine, MetricKind::Ibleu, MetricKind::BleuCr, MetricKind::BleuCs}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::optional<double> metric_value(const MetricRow &row, MetricKind metric) {
  switch (metric) {
    case MetricKind::Cosine: return row.cosine_cs;
    case MetricKind::Ibleu: return row.ibleu;
    case MetricKind::BleuCr: return row.bleu_cr;
    case MetricKind::BleuCs: return row.bleu_cs;
  }
  return std::nullopt;
}

std::string metric_row_to_json(const MetricRow &row) {
  nlohmann::ordered_json j;
  j["uid"] = row.uid;
  j["system"] = row.system;
  j["candidate"] = row.candidate;
  j["bleu_cr"] = row.bleu_cr;
  j["bleu_cs"] = row.bleu_cs;
  j["ibleu"] = row.ibleu;
  j["cosine_cs"] = row.cosine_cs ? nlohmann::ordered_json(*row.cosine_cs) : nlohmann::ordered_json();
  return j.dump();
}

MetricRow metric_row_from_json(std::string_view line) {
  const auto j = nlohmann::json::parse(line);
  MetricRow row;
  row.uid = j.at("uid").get<std::string>();
  row.system = j.at("system").get<std::string>();
  row.candidate = j.value("candidate", "");
  row.bleu_cr = j.value("bleu_cr", 0.0);
  row.bleu_cs = j.value("bleu_cs", 0.0);
  row.ibleu = j.value("ibleu", 0.0);
  if (j.contains("cosine_cs") && !j.at("cosine_cs").is_null()) row.cosine_cs = j.at("cosine_cs").get<double>();
  return row;
}

}  // namespace paraqa
