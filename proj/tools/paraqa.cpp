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

// paraqa: command-line front end for the question-paraphrase toolkit.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "paraqa/alist.hpp"
#include "paraqa/annosvc.hpp"
#include "paraqa/corpus.hpp"
#include "paraqa/embeddings.hpp"
#include "paraqa/error.hpp"
#include "paraqa/errscan.hpp"
#include "paraqa/harness.hpp"
#include "paraqa/metrics.hpp"
#include "paraqa/paragen.hpp"

namespace {

using namespace paraqa;

void emit(const std::string &out_path, const std::string &content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + out_path);
  out << content;
  if (!out) throw IoError("write failed for " + out_path);
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

QuestionKind require_kind(const std::string &name) {
  const auto k = parse_question_kind(name);
  if (!k) throw InvalidConfig("unknown question type '" + name + "'");
  return *k;
}

MetricKind require_metric(const std::string &name) {
  const auto m = parse_metric_kind(name);
  if (!m) throw InvalidConfig("unknown metric '" + name + "' (cosine, ibleu, bleu_cr, bleu_cs)");
  return *m;
}

struct CorpusArgs {
  std::string path;
  std::string format = "auto";
  std::string field_map;
  std::string rules;

  void add_to(CLI::App *cmd, bool positional) {
    if (positional) {
      cmd->add_option("path", path, "Dataset (JSON array or JSONL)")->required()->check(CLI::ExistingFile);
    } else {
      cmd->add_option("--corpus", path, "Dataset (JSON array or JSONL)")->required()->check(CLI::ExistingFile);
    }
    cmd->add_option(positional ? "--format" : "--corpus-format", format, "auto, json or jsonl")->capture_default_str();
    cmd->add_option("--field-map", field_map, "JSON field-name mapping")->check(CLI::ExistingFile);
    cmd->add_option("--rules", rules, "Question-type rule table (JSON)")->check(CLI::ExistingFile);
  }

  Corpus load(RuleTable &storage) const {
    LoadOptions opts;
    const auto fmt = parse_dataset_format(format);
    if (!fmt) throw InvalidConfig("unknown format '" + format + "'");
    opts.format = *fmt;
    if (!field_map.empty()) opts.fields = FieldMap::from_file(field_map);
    if (!rules.empty()) {
      storage = RuleTable::from_file(rules);
      opts.rules = &storage;
    }
    return load_dataset(path, opts);
  }
};

std::string corpus_stats(const Corpus &corpus) {
  std::ostringstream out;
  out << "items " << corpus.size() << '\n';
  for (QuestionKind k : kAllQuestionKinds) out << to_string(k) << ' ' << corpus.count(k) << '\n';
  return out.str();
}

std::unique_ptr<TranslationService> make_translation_service(const std::string &uri) {
  if (uri == "echo") return std::make_unique<EchoTranslationService>();
  if (uri.starts_with("recorded:")) return std::make_unique<RecordedTranslationService>(uri.substr(9));
  if (uri.starts_with("http:") || uri.starts_with("https:")) {
    std::string base = uri;
    if (uri.starts_with("http:") && !uri.starts_with("http://")) base = uri.substr(5);
    return std::make_unique<HttpTranslationService>(base);
  }
  throw InvalidConfig("translation service must be http://..., recorded:<file> or echo");
}

volatile std::sig_atomic_t g_stop_requested = 0;

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Question-paraphrase evaluation, dataset linting and alist recovery"};
  app.require_subcommand(1);

  // corpus ------------------------------------------------------------------
  auto *corpus_cmd = app.add_subcommand("corpus", "Load, normalize and sample datasets");
  corpus_cmd->require_subcommand(1);

  CorpusArgs load_args;
  bool load_stats = false;
  std::string load_out;
  auto *load_cmd = corpus_cmd->add_subcommand("load", "Re-serialize a dataset as canonical JSONL");
  load_args.add_to(load_cmd, true);
  load_cmd->add_flag("--stats", load_stats, "Print per-type counts instead of rows (rows still go to --out)");
  load_cmd->add_option("--out", load_out, "Output file (default stdout)");

  CorpusArgs sample_args;
  std::string sample_type;
  std::size_t sample_n = 0;
  std::uint64_t sample_seed = 0;
  std::string sample_out;
  auto *sample_cmd = corpus_cmd->add_subcommand("sample", "Draw a seeded sample of one question type");
  sample_args.add_to(sample_cmd, true);
  sample_cmd->add_option("--type", sample_type, "Question type")->required();
  sample_cmd->add_option("-n", sample_n, "Sample size")->required();
  sample_cmd->add_option("--seed", sample_seed, "PRNG seed")->required();
  sample_cmd->add_option("--out", sample_out, "Output file (default stdout)");

  // scan --------------------------------------------------------------------
  CorpusArgs scan_args;
  std::string scan_report;
  std::string scan_filtered;
  auto *scan_cmd = app.add_subcommand("scan", "Flag dataset errors");
  scan_args.add_to(scan_cmd, true);
  scan_cmd->add_option("--report", scan_report, "Report file; JSON when it ends in .json, else text (default: text on stdout)");
  scan_cmd->add_option("--filtered", scan_filtered, "Write the corpus without flagged items here");

  // score -------------------------------------------------------------------
  CorpusArgs score_args;
  std::string score_candidates;
  double score_alpha = 0.7;
  std::string score_embeddings;
  std::string score_out;
  auto *score_cmd = app.add_subcommand("score", "Score candidate paraphrases (BLEU, iBLEU, cosine)");
  score_args.add_to(score_cmd, false);
  score_cmd->add_option("--candidates", score_candidates, "Candidates JSONL {uid, system, text}")
      ->required()
      ->check(CLI::ExistingFile);
  score_cmd->add_option("--alpha", score_alpha, "iBLEU alpha")->capture_default_str();
  score_cmd->add_option("--embeddings", score_embeddings, "file:<store.jsonl> or http:<url> (default $PARAQA_EMBED_URI)");
  score_cmd->add_option("--out", score_out, "Output JSONL (default stdout)");

  // ppdb --------------------------------------------------------------------
  auto *ppdb_cmd = app.add_subcommand("ppdb", "Query a PPDB paraphrase table");
  ppdb_cmd->require_subcommand(1);
  std::string ppdb_index;
  std::string ppdb_phrase;
  std::size_t ppdb_k = 5;
  std::optional<double> ppdb_min_score;
  std::string ppdb_relations;
  auto *ppdb_query = ppdb_cmd->add_subcommand("query", "Top-k paraphrases of a phrase");
  ppdb_query->add_option("index", ppdb_index, "PPDB flat file")->required()->check(CLI::ExistingFile);
  ppdb_query->add_option("phrase", ppdb_phrase, "Phrase to look up")->required();
  ppdb_query->add_option("-k", ppdb_k, "Number of results")->capture_default_str();
  ppdb_query->add_option("--min-score", ppdb_min_score, "Drop entries below this score");
  ppdb_query->add_option("--relations", ppdb_relations, "Comma-separated entailment relations to keep");

  // parse / recover ---------------------------------------------------------
  std::string parse_text;
  std::string parse_templates;
  auto *parse_cmd = app.add_subcommand("parse", "Parse a question into an alist");
  parse_cmd->add_option("question", parse_text, "Question text")->required();
  parse_cmd->add_option("--templates", parse_templates, "Template file (default bundled)")->check(CLI::ExistingFile);

  std::string rec_cases;
  std::string rec_paraphraser = "identity";
  std::string rec_templates;
  std::string rec_ppdb;
  std::string rec_pivot = "fr";
  std::string rec_format = "json";
  std::string rec_out;
  auto *recover_cmd = app.add_subcommand("recover", "Run the alist recovery experiment");
  recover_cmd->add_option("--cases", rec_cases, "Recovery cases JSONL")->required()->check(CLI::ExistingFile);
  recover_cmd->add_option("--paraphraser", rec_paraphraser, "identity, oracle, file:<candidates.jsonl> or http:<url>")
      ->capture_default_str();
  recover_cmd->add_option("--templates", rec_templates, "Template file (default bundled)")->check(CLI::ExistingFile);
  recover_cmd->add_option("--pivot", rec_pivot, "Pivot language for an http: paraphraser")->capture_default_str();
  recover_cmd->add_option("--ppdb", rec_ppdb, "PPDB file for property alternatives")->check(CLI::ExistingFile);
  recover_cmd->add_option("--format", rec_format, "json or text")->capture_default_str();
  recover_cmd->add_option("--out", rec_out, "Output file (default stdout)");

  // report ------------------------------------------------------------------
  auto *report_cmd = app.add_subcommand("report", "Experiment reports");
  report_cmd->require_subcommand(1);

  CorpusArgs t3_args;
  std::string t3_scores;
  std::string t3_metric = "cosine";
  std::string t3_format = "text";
  std::string t3_out;
  auto *t3_cmd = report_cmd->add_subcommand("table3", "Mean and std of a metric per system and question type");
  t3_args.add_to(t3_cmd, false);
  t3_cmd->add_option("--scores", t3_scores, "Metric rows JSONL")->required()->check(CLI::ExistingFile);
  t3_cmd->add_option("--metric", t3_metric, "cosine, ibleu, bleu_cr or bleu_cs")->capture_default_str();
  t3_cmd->add_option("--format", t3_format, "text or json")->capture_default_str();
  t3_cmd->add_option("--out", t3_out, "Output file (default stdout)");

  CorpusArgs t2_args;
  std::string t2_scores;
  std::string t2_adequacy;
  std::string t2_metrics = "cosine,ibleu";
  std::string t2_format = "text";
  std::string t2_out;
  auto *t2_cmd = report_cmd->add_subcommand("table2", "Spearman rho of adequacy against metrics per question type");
  t2_args.add_to(t2_cmd, false);
  t2_cmd->add_option("--scores", t2_scores, "Metric rows JSONL")->required()->check(CLI::ExistingFile);
  t2_cmd->add_option("--adequacy", t2_adequacy, "Adequacy records JSONL")->required()->check(CLI::ExistingFile);
  t2_cmd->add_option("--metrics", t2_metrics, "Comma-separated metrics")->capture_default_str();
  t2_cmd->add_option("--format", t2_format, "text or json")->capture_default_str();
  t2_cmd->add_option("--out", t2_out, "Output file (default stdout)");

  std::string f1_scores;
  std::string f1_adequacy;
  std::string f1_metric = "cosine";
  std::string f1_out;
  auto *f1_cmd = report_cmd->add_subcommand("fig1", "Adequate % against mean metric per system (CSV)");
  f1_cmd->add_option("--scores", f1_scores, "Metric rows JSONL")->required()->check(CLI::ExistingFile);
  f1_cmd->add_option("--adequacy", f1_adequacy, "Adequacy records JSONL")->required()->check(CLI::ExistingFile);
  f1_cmd->add_option("--metric", f1_metric, "Metric")->capture_default_str();
  f1_cmd->add_option("--out", f1_out, "Output file (default stdout)");

  std::string f4_clean;
  std::string f4_error;
  std::string f4_format = "csv";
  std::string f4_out;
  auto *f4_cmd = report_cmd->add_subcommand("fig4", "Label frequencies for clean against erroneous sources");
  f4_cmd->add_option("--clean", f4_clean, "Adequacy records for clean sources")->required()->check(CLI::ExistingFile);
  f4_cmd->add_option("--error", f4_error, "Adequacy records for erroneous sources")->required()->check(CLI::ExistingFile);
  f4_cmd->add_option("--format", f4_format, "csv, json or text")->capture_default_str();
  f4_cmd->add_option("--out", f4_out, "Output file (default stdout)");

  // annotate ----------------------------------------------------------------
  auto *annotate_cmd = app.add_subcommand("annotate", "Annotation service");
  annotate_cmd->require_subcommand(1);
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  std::string serve_data;
  std::string serve_corpus;
  std::string serve_static;
  auto *serve_cmd = annotate_cmd->add_subcommand("serve", "Serve labeling sessions over HTTP");
  serve_cmd->add_option("--host", serve_host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", serve_port, "Port (0 picks a free one)")->capture_default_str();
  serve_cmd->add_option("--data", serve_data, "Journal directory")->required();
  serve_cmd->add_option("--corpus", serve_corpus, "Dataset used to resolve item uids")->check(CLI::ExistingFile);
  serve_cmd->add_option("--static", serve_static, "Directory of UI assets to serve at /")->check(CLI::ExistingDirectory);

  // backtranslate -----------------------------------------------------------
  CorpusArgs bt_args;
  std::string bt_pivot;
  std::string bt_service;
  std::size_t bt_in_flight = 4;
  std::string bt_out;
  auto *bt_cmd = app.add_subcommand("backtranslate", "Generate en-<pivot>-en candidates through a translation service");
  bt_args.add_to(bt_cmd, false);
  bt_cmd->add_option("--pivot", bt_pivot, "Pivot language (de, fr, hi, ru, zh)")->required();
  bt_cmd->add_option("--service", bt_service, "http://<host:port>, recorded:<file> or echo")->required();
  bt_cmd->add_option("--max-in-flight", bt_in_flight, "Concurrent requests")->capture_default_str();
  bt_cmd->add_option("--out", bt_out, "Output JSONL (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    RuleTable rules_storage;

    if (*load_cmd) {
      const Corpus corpus = load_args.load(rules_storage);
      if (load_stats) {
        std::cout << corpus_stats(corpus);
        if (!load_out.empty()) emit(load_out, to_jsonl(corpus));
      } else {
        emit(load_out, to_jsonl(corpus));
      }
    } else if (*sample_cmd) {
      const Corpus corpus = sample_args.load(rules_storage);
      const auto items = sample(corpus, require_kind(sample_type), sample_n, sample_seed);
      emit(sample_out, to_jsonl(subset(corpus, items)));
    } else if (*scan_cmd) {
      const Corpus corpus = scan_args.load(rules_storage);
      const ErrorReport report = scan(corpus);
      const bool as_json = scan_report.ends_with(".json");
      emit(scan_report, as_json ? report_to_json(report) : report_to_text(report));
      if (!scan_filtered.empty()) emit(scan_filtered, to_jsonl(filter_rejected(corpus, report)));
    } else if (*score_cmd) {
      const Corpus corpus = score_args.load(rules_storage);
      const CandidateSet candidates = load_candidates(score_candidates, &corpus);
      for (const auto &uid : candidates.unknown_uids) std::cerr << "paraqa: skipping unknown uid " << uid << '\n';
      IbleuConfig cfg;
      cfg.alpha = score_alpha;
      cfg.validate();
      std::optional<ProviderConfig> provider_cfg =
          score_embeddings.empty() ? ProviderConfig::from_env() : ProviderConfig::from_uri(score_embeddings);
      std::unique_ptr<EmbeddingProvider> provider = provider_cfg ? make_provider(*provider_cfg) : nullptr;
      std::string out;
      for (const auto &c : candidates.candidates) {
        const DataPoint *dp = corpus.find(c.uid);
        if (dp == nullptr) continue;
        MetricRow row = score_candidate(c.uid, c.system, c.text, dp->paraphrase, dp->question, cfg);
        if (provider) row.cosine_cs = similarity_cs(c.text, dp->question, *provider);
        out += metric_row_to_json(row) + "\n";
      }
      emit(score_out, out);
    } else if (*ppdb_query) {
      PpdbFilter filter;
      if (ppdb_min_score) filter.min_score = *ppdb_min_score;
      if (!ppdb_relations.empty()) {
        filter.relations.clear();
        for (const auto &name : split_list(ppdb_relations)) {
          const auto rel = parse_ppdb_relation(name);
          if (!rel) throw InvalidConfig("unknown PPDB relation '" + name + "'");
          filter.relations.insert(*rel);
        }
      }
      const PpdbIndex index = ppdb_load(ppdb_index, filter);
      if (index.skipped_lines() > 0) std::cerr << "paraqa: skipped " << index.skipped_lines() << " malformed lines\n";
      for (const auto &e : ppdb_paraphrase(index, ppdb_phrase, ppdb_k)) {
        std::cout << e.rhs_phrase << '\t' << e.score << '\t' << to_string(e.relation) << '\n';
      }
    } else if (*parse_cmd) {
      const TemplateSet templates = parse_templates.empty() ? TemplateSet::bundled() : load_templates(parse_templates);
      const ParseResult r = parse_question(parse_text, templates);
      if (const Alist *a = parsed_alist(r)) {
        std::cout << to_json(*a) << '\n';
      } else {
        const auto &e = std::get<ParseError>(r);
        std::cout << "ParseError(" << to_string(e.reason) << ")" << (e.detail.empty() ? "" : ": " + e.detail) << '\n';
        return 3;
      }
    } else if (*recover_cmd) {
      const TemplateSet templates = rec_templates.empty() ? TemplateSet::bundled() : load_templates(rec_templates);
      const auto cases = load_recovery_cases(rec_cases);
      CandidateSet candidate_storage;
      std::unique_ptr<TranslationService> service;
      Paraphraser paraphraser;
      if (rec_paraphraser == "identity") {
        paraphraser = identity_paraphraser();
      } else if (rec_paraphraser == "oracle") {
        paraphraser = oracle_paraphraser();
      } else if (rec_paraphraser.starts_with("file:")) {
        candidate_storage = load_candidates(rec_paraphraser.substr(5));
        paraphraser = candidate_paraphraser(candidate_storage);
      } else if (rec_paraphraser.starts_with("http:") || rec_paraphraser.starts_with("https:")) {
        service = make_translation_service(rec_paraphraser);
        paraphraser = backtranslation_paraphraser(*service, rec_pivot);
      } else {
        throw InvalidConfig("unknown paraphraser '" + rec_paraphraser + "'");
      }
      std::optional<PpdbIndex> ppdb;
      RecoveryOptions options;
      if (!rec_ppdb.empty()) {
        ppdb = ppdb_load(rec_ppdb);
        options.ppdb = &*ppdb;
      }
      const RecoveryReport report = recovery_experiment(cases, paraphraser, templates, options);
      if (rec_format == "json") {
        emit(rec_out, report.to_json());
      } else if (rec_format == "text") {
        emit(rec_out, report.to_text());
      } else {
        throw InvalidConfig("--format must be json or text");
      }
    } else if (*t3_cmd) {
      const Corpus corpus = t3_args.load(rules_storage);
      const auto report = aggregate_by_type(load_metric_rows(t3_scores), corpus, require_metric(t3_metric));
      emit(t3_out, t3_format == "json" ? report.to_json() : report.to_text());
    } else if (*t2_cmd) {
      const Corpus corpus = t2_args.load(rules_storage);
      std::vector<MetricKind> metrics;
      for (const auto &m : split_list(t2_metrics)) metrics.push_back(require_metric(m));
      const auto table =
          correlation_table(load_adequacy_records(t2_adequacy), load_metric_rows(t2_scores), corpus, metrics);
      emit(t2_out, t2_format == "json" ? table.to_json() : table.to_text());
    } else if (*f1_cmd) {
      const MetricKind metric = require_metric(f1_metric);
      const auto points = adequacy_vs_metric(load_adequacy_records(f1_adequacy), load_metric_rows(f1_scores), metric);
      emit(f1_out, adequacy_points_to_csv(points, metric));
    } else if (*f4_cmd) {
      const auto effect = error_effect(load_adequacy_records(f4_clean), load_adequacy_records(f4_error));
      if (f4_format == "csv") {
        emit(f4_out, effect.to_csv());
      } else if (f4_format == "json") {
        emit(f4_out, effect.to_json());
      } else {
        emit(f4_out, effect.to_text());
      }
    } else if (*serve_cmd) {
      std::optional<Corpus> corpus;
      if (!serve_corpus.empty()) {
        LoadOptions opts;
        corpus = load_dataset(serve_corpus, opts);
      }
      AnnotationStore store(serve_data, corpus ? &*corpus : nullptr);
      std::optional<std::filesystem::path> static_dir;
      if (!serve_static.empty()) static_dir = serve_static;
      AnnotationServer server(store, static_dir);
      const int port = serve_port == 0 ? server.bind_to_any_port(serve_host) : serve_port;
      std::signal(SIGINT, [](int) { g_stop_requested = 1; });
      std::signal(SIGTERM, [](int) { g_stop_requested = 1; });
      std::thread watcher([&server] {
        while (!g_stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        server.stop();
      });
      std::thread announce([&server, &serve_host, port] {
        server.wait_until_ready();
        std::cout << "listening on " << serve_host << ":" << port << std::endl;
      });
      const bool ok = serve_port == 0 ? server.listen_after_bind() : server.listen(serve_host, serve_port);
      g_stop_requested = 1;
      watcher.join();
      announce.join();
      if (!ok) throw ServiceUnavailable("cannot listen on " + serve_host + ":" + std::to_string(port));
    } else if (*bt_cmd) {
      const Corpus corpus = bt_args.load(rules_storage);
      const auto service = make_translation_service(bt_service);
      const auto out = backtranslate_all(corpus.items(), bt_pivot, *service, bt_in_flight);
      std::string text;
      for (const auto &c : out) text += candidate_to_json(c) + "\n";
      emit(bt_out, text);
    }
  } catch (const Error &e) {
    std::cerr << "paraqa: " << e.code() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "paraqa: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
