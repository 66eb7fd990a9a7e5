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

// Acceptance checks. One line per criterion: PASS, FAIL or SKIP.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "paraqa/alist.hpp"
#include "paraqa/annosvc.hpp"
#include "paraqa/corpus.hpp"
#include "paraqa/errscan.hpp"
#include "paraqa/harness.hpp"
#include "paraqa/metrics.hpp"
#include "test_support.hpp"

// After the project headers: <resolv.h> defines a _res macro that breaks Eigen.
#include <httplib.h>

using namespace paraqa;
using nlohmann::json;

namespace {

struct Outcome {
  enum { Pass, Fail, Skip } status = Pass;
  std::string detail;
};

// Collects failures; the first few are kept as the detail text.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string &what) {
    if (!ok) failures.push_back(what);
  }
  Outcome outcome() const {
    if (failures.empty()) return {};
    std::string d;
    for (std::size_t i = 0; i < failures.size() && i < 3; ++i) d += (i ? "; " : "") + failures[i];
    if (failures.size() > 3) d += "; +" + std::to_string(failures.size() - 3) + " more";
    return {Outcome::Fail, d};
  }
};

IbleuConfig with_alpha(double a) {
  IbleuConfig cfg;
  cfg.alpha = a;
  return cfg;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

Outcome ibleu_identities() {
  Check c;
  const double a = ibleu("what is the capital of chad", "what is the capital of chad", "zz yy xx ww", with_alpha(0.7));
  c.expect(a == 0.7, "c=r, disjoint s gave " + num(a));
  const std::string s = "who is the mayor of paris ?";
  const double b = ibleu(s, s, s, with_alpha(0.7));
  c.expect(b == 0.4, "c=r=s gave " + num(b));
  return c.outcome();
}

Outcome bleu_oracle() {
  Check c;
  const std::vector<std::string> vocab = {"what", "is", "the", "of", "capital", "france", "who", "how", "many", "?"};
  std::mt19937 gen(1234);
  std::uniform_int_distribution<std::size_t> len(1, 12);
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  for (int i = 0; i < 25; ++i) {
    testing::Tokens cand(len(gen));
    testing::Tokens ref(len(gen));
    for (auto &w : cand) w = vocab[word(gen)];
    for (auto &w : ref) w = vocab[word(gen)];
    const double got = bleu(cand, ref);
    const double want = testing::oracle_bleu(cand, ref);
    c.expect(std::abs(got - want) <= 1e-9, "pair " + std::to_string(i) + ": " + num(got) + " vs " + num(want));
  }
  return c.outcome();
}

Outcome spearman() {
  Check c;
  c.expect(spearman_rho({1, 2, 3, 4, 5}, {2, 4, 8, 16, 32}) == 1.0, "monotone is not 1.0");
  c.expect(spearman_rho({1, 2, 3, 4, 5}, {9, 7, 5, 3, 1}) == -1.0, "antimonotone is not -1.0");
  const std::vector<double> x = {1, 2, 2, 4, 5, 5, 5};
  const std::vector<double> y = {3, 1, 4, 1, 5, 9, 2};
  const double got = spearman_rho(x, y);
  const double want = testing::oracle_spearman(x, y);
  c.expect(std::abs(got - want) <= 1e-12, "ties: " + num(got) + " vs " + num(want));
  return c.outcome();
}

Outcome error_scanner() {
  Check c;
  const Corpus corpus = load_dataset(testing::fixture("corpus60.json"));
  const auto manifest = json::parse(testing::read_file(testing::fixture("corpus60.manifest.json")));
  const ErrorReport report = scan(corpus);
  for (ErrorKind k : kAllErrorKinds) {
    const std::string name(to_string(k));
    std::vector<std::string> planted = manifest["categories"][name];
    const auto found = report.uids_with(k);
    std::size_t tp = 0;
    for (const auto &u : found) tp += std::count(planted.begin(), planted.end(), u);
    const double precision = found.empty() ? 0.0 : double(tp) / found.size();
    const double recall = planted.empty() ? 1.0 : double(tp) / planted.size();
    c.expect(precision == 1.0 && recall == 1.0,
             name + " precision " + num(precision) + " recall " + num(recall));
  }
  c.expect(report.rejected.percent == 10.0, "total " + num(report.rejected.percent) + "%");
  const ErrorReport again = scan(filter_rejected(corpus, report));
  c.expect(again.rejected.percent == 0.0, "filtered corpus total " + num(again.rejected.percent) + "%");
  return c.outcome();
}

Outcome lcquad_scan() {
  const char *path = std::getenv("PARAQA_LCQUAD");
  if (path == nullptr || !std::filesystem::exists(path)) {
    return {Outcome::Skip, "set PARAQA_LCQUAD to the dataset file to run"};
  }
  Check c;
  const auto start = std::chrono::steady_clock::now();
  const ErrorReport report = scan(load_dataset(path));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::map<ErrorKind, double> expected = {{ErrorKind::FileExtension, 0.1},
                                                {ErrorKind::EmptyField, 0.5},
                                                {ErrorKind::MissingAccents, 1.0},
                                                {ErrorKind::TemplateTerm, 5.8},
                                                {ErrorKind::IdenticalParaphrase, 6.8}};
  for (const auto &[k, want] : expected) {
    const double got = report.categories.count(k) ? report.categories.at(k).percent : 0.0;
    c.expect(std::abs(got - want) <= 0.5 + 1e-9, std::string(to_string(k)) + " " + num(got) + "%");
  }
  c.expect(std::abs(report.rejected.percent - 13.5) <= 1.0 + 1e-9, "total " + num(report.rejected.percent) + "%");
  c.expect(secs < 60.0, "scan took " + num(secs) + " s");
  return c.outcome();
}

Outcome alist_round_trip() {
  Check c;
  const TemplateSet &set = TemplateSet::bundled();
  struct Fill {
    std::string s, p, o;
    std::int64_t t;
  };
  const std::vector<Fill> fills = {{"France", "population", "the population of Spain", 2028},
                                   {"New Zealand", "area", "the area of Chile", 1999},
                                   {"Lake Victoria", "border", "ten thousand", 2010}};
  std::size_t total = 0;
  for (const auto &tmpl : set.templates()) {
    for (const auto &f : fills) {
      ++total;
      Alist a;
      for (const auto &[attr, rhs] : tmpl.skeleton) {
        if (rhs == "<s>") a.set(attr, f.s);
        else if (rhs == "<p>") a.set(attr, f.p);
        else if (rhs == "<o>") a.set(attr, f.o);
        else if (rhs == "<t>") a.set(attr, f.t);
        else if (rhs.starts_with("?")) a.set(attr, Variable{rhs.substr(1)});
        else a.set(attr, rhs);
      }
      try {
        const auto r = parse_question(render_question(a, tmpl), set);
        const Alist *back = parsed_alist(r);
        c.expect(back != nullptr && alist_equivalent(*back, a), tmpl.id + " did not round-trip");
      } catch (const Error &e) {
        c.expect(false, tmpl.id + ": " + e.what());
      }
    }
  }
  c.expect(total == set.size() * 3 && total > 0, "instantiation count " + std::to_string(total));
  const auto eq1 = parse_question("What will the population of France be in 2028?", set);
  const Alist *a = parsed_alist(eq1);
  c.expect(a != nullptr && to_json(*a) == R"({"s":"France","p":"population","o":"?y0","t":2028,"h":"value","v":"?y0"})",
           "worked example did not parse byte-for-byte");
  const auto counter = parse_question("How many people will be living in France in 2028?", set);
  c.expect(std::holds_alternative<ParseError>(counter), "counterexample parsed");
  return c.outcome();
}

Outcome recovery_harness() {
  Check c;
  const auto cases = load_recovery_cases(testing::fixture("recovery20.jsonl"));
  const auto identity = recovery_experiment(cases, identity_paraphraser(), TemplateSet::bundled());
  const auto oracle = recovery_experiment(cases, oracle_paraphraser(), TemplateSet::bundled());
  c.expect(cases.size() == 20, std::to_string(cases.size()) + " cases");
  c.expect(identity.successes == 0, "identity recovered " + std::to_string(identity.successes));
  c.expect(oracle.successes == 20, "oracle recovered " + std::to_string(oracle.successes));
  const auto identity2 = recovery_experiment(cases, identity_paraphraser(), TemplateSet::bundled());
  c.expect(identity.to_json() == identity2.to_json() && identity.to_text() == identity2.to_text(),
           "report differs between runs");
  const auto doc = json::parse(oracle.to_json());
  c.expect(doc.contains("total") && doc.contains("successes") && doc.contains("rate") && doc.contains("cases"),
           "report is missing keys");
  return c.outcome();
}

Outcome aggregation() {
  Check c;
  const Corpus corpus = load_dataset(testing::fixture("corpus60.json"));
  const auto rows = load_metric_rows(testing::fixture("scores50.jsonl"));
  const auto report = aggregate_by_type(rows, corpus, MetricKind::Cosine);
  std::istringstream csv(testing::read_file(testing::fixture("aggregate_expected.csv")));
  std::string line;
  std::getline(csv, line);
  std::size_t i = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> f;
    std::istringstream fields(line);
    for (std::string x; std::getline(fields, x, ',');) f.push_back(x);
    if (i >= report.rows.size()) {
      c.expect(false, "missing row for " + line);
      break;
    }
    const auto &r = report.rows[i++];
    const std::string qtype = r.qtype ? std::string(to_string(*r.qtype)) : "Average";
    const std::string key = r.system + "/" + qtype;
    c.expect(r.system == f[0] && qtype == f[1], "row order: " + key + " vs " + f[0] + "/" + f[1]);
    c.expect(std::abs(r.mean - std::stod(f[2])) <= 1e-9, key + " mean " + num(r.mean));
    c.expect(std::abs(r.std - std::stod(f[3])) <= 1e-9, key + " std " + num(r.std));
    c.expect(r.n == std::stoul(f[4]), key + " n " + std::to_string(r.n));
  }
  c.expect(i == report.rows.size(), "row count " + std::to_string(report.rows.size()));
  const auto again = aggregate_by_type(rows, corpus, MetricKind::Cosine);
  c.expect(report.to_json() == again.to_json() && report.to_text() == again.to_text(), "output not byte-stable");
  return c.outcome();
}

Outcome error_effect_fixtures() {
  Check c;
  const auto manifest = json::parse(testing::read_file(testing::fixture("adequacy.manifest.json")));
  const auto effect = error_effect(load_adequacy_records(testing::fixture("adequacy_clean.jsonl")),
                                   load_adequacy_records(testing::fixture("adequacy_error.jsonl")));
  for (AdequacyLabel l : kAllAdequacyLabels) {
    const std::string name(to_string(l));
    c.expect(effect.clean.percent(l) == manifest["clean"][name].get<double>(), "clean " + name);
    c.expect(effect.error.percent(l) == manifest["error"][name].get<double>(), "error " + name);
  }
  c.expect(effect.error.percent(AdequacyLabel::Inadequate) > effect.clean.percent(AdequacyLabel::Inadequate),
           "inadequate(error) <= inadequate(clean)");
  return c.outcome();
}

// `paraqa annotate serve` as a child process.
class ServerProcess {
 public:
  explicit ServerProcess(const std::filesystem::path &data) {
    int fds[2];
    if (::pipe(fds) != 0) throw std::runtime_error("pipe failed");
    pid_ = ::fork();
    if (pid_ < 0) throw std::runtime_error("fork failed");
    if (pid_ == 0) {
      ::dup2(fds[1], STDOUT_FILENO);
      ::close(fds[0]);
      ::close(fds[1]);
      const std::string cli = testing::cli_path();
      const std::string dir = data.string();
      ::execl(cli.c_str(), cli.c_str(), "annotate", "serve", "--port", "0", "--data", dir.c_str(),
              static_cast<char *>(nullptr));
      ::_exit(127);
    }
    ::close(fds[1]);
    FILE *out = ::fdopen(fds[0], "r");
    char buf[256];
    const std::string prefix = "listening on ";
    while (std::fgets(buf, sizeof buf, out) != nullptr) {
      const std::string line(buf);
      if (line.starts_with(prefix)) {
        port_ = std::stoi(line.substr(line.rfind(':') + 1));
        break;
      }
    }
    std::fclose(out);
    if (port_ == 0) {
      kill();
      throw std::runtime_error("server did not report a port");
    }
  }
  ~ServerProcess() { kill(); }

  void kill() {
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      int status = 0;
      ::waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }
  int port() const { return port_; }

 private:
  pid_t pid_ = -1;
  int port_ = 0;
};

Outcome annotation_durability() {
  Check c;
  testing::TempDir dir;
  const std::vector<std::string> labels = {"Adequate", "Inadequate", "Trivial", "Adequate", "Adequate",
                                           "Trivial",  "Inadequate", "Adequate", "Trivial", "Inadequate"};
  json items = json::array();
  for (int i = 0; i < 10; ++i) items.push_back({{"uid", std::to_string(100 + i)}, {"system", "en-fr"}});
  std::string session;
  std::vector<std::string> submitted;

  auto submit = [&](httplib::Client &cli, std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) {
      auto next = cli.Get("/sessions/" + session + "/next");
      if (!next || next->status != 200) return c.expect(false, "GET next failed");
      const std::string item_id = json::parse(next->body)["item_id"];
      const json body = {{"item_id", item_id}, {"label", labels[i]}, {"annotator", "ann"}};
      auto r = cli.Post("/sessions/" + session + "/labels", body.dump(), "application/json");
      if (!r || r->status != 200) return c.expect(false, "label " + std::to_string(i) + " rejected");
      submitted.push_back(item_id);
    }
  };

  // First process: create and label six items, then kill it.
  {
    ServerProcess server(dir.path());
    httplib::Client cli("127.0.0.1", server.port());
    auto r = cli.Post("/sessions", json{{"task", "adequacy"}, {"items", items}}.dump(), "application/json");
    if (!r || r->status != 200) return {Outcome::Fail, "session create failed"};
    session = json::parse(r->body)["session_id"];
    submit(cli, 0, 6);
    server.kill();
  }
  {
    AnnotationStore replay(dir.path());
    const auto snap = replay.snapshot(session);
    c.expect(snap.labels.size() == 6, "after first kill: " + std::to_string(snap.labels.size()) + " labels");
    c.expect(snap.cursor == 6, "after first kill: cursor " + std::to_string(snap.cursor));
  }

  // Second process resumes the session and finishes it.
  std::string http_export;
  {
    ServerProcess server(dir.path());
    httplib::Client cli("127.0.0.1", server.port());
    submit(cli, 6, 10);
    auto r = cli.Get("/sessions/" + session + "/export");
    if (r && r->status == 200) http_export = r->body;
    server.kill();
  }

  std::istringstream lines(http_export);
  std::vector<json> rows;
  for (std::string line; std::getline(lines, line);) rows.push_back(json::parse(line));
  c.expect(rows.size() == 10, "export has " + std::to_string(rows.size()) + " records");
  for (std::size_t i = 0; i < rows.size() && i < submitted.size(); ++i) {
    c.expect(rows[i]["item_id"] == submitted[i] && rows[i]["label"] == labels[i],
             "export record " + std::to_string(i) + " out of order");
  }

  AnnotationStore replay(dir.path());
  const auto snap = replay.snapshot(session);
  c.expect(replay.export_jsonl(session) == http_export, "replayed export differs");
  c.expect(snap.labels.size() == 10 && snap.state == SessionState::Complete, "replayed session not complete");
  for (std::size_t i = 0; i < submitted.size(); ++i) {
    auto it = snap.labels.find(submitted[i]);
    c.expect(it != snap.labels.end() && it->second.label == labels[i], "replayed label " + std::to_string(i));
  }
  AnnotationStore replay2(dir.path());
  c.expect(replay2.snapshot(session) == snap, "two replays disagree");
  return c.outcome();
}

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
  double max_seconds = 0;  // 0: no runtime bound
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"ibleu-identities", ibleu_identities, 1.0},
      {"bleu-oracle-equivalence", bleu_oracle, 1.0},
      {"spearman-exact", spearman},
      {"error-scanner-planted-fixture", error_scanner},
      {"lcquad-scan-distribution", lcquad_scan},
      {"alist-round-trip", alist_round_trip},
      {"recovery-harness", recovery_harness, 1.0},
      {"aggregation-oracle", aggregation},
      {"error-effect-fixtures", error_effect_fixtures},
      {"annotation-durability", annotation_durability},
  };
  int failures = 0;
  for (const auto &cr : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = cr.run();
    } catch (const std::exception &e) {
      o = {Outcome::Fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.status == Outcome::Pass && cr.max_seconds > 0 && secs >= cr.max_seconds) {
      o = {Outcome::Fail, "took " + num(secs) + " s"};
    }
    const char *tag = o.status == Outcome::Pass ? "PASS" : o.status == Outcome::Fail ? "FAIL" : "SKIP";
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.3fs", secs);
    std::cout << tag << "  " << cr.name << "  (" << timing << ")" << (o.detail.empty() ? "" : "  " + o.detail)
              << std::endl;
    if (o.status == Outcome::Fail) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
