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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "paraqa/corpus.hpp"
#include "paraqa/paragen.hpp"

namespace paraqa {

// Alist attributes: subject, property, object, time, inference function
// (operation), value.
enum class Attribute : std::uint8_t { S, P, O, T, H, V };

inline constexpr std::array<Attribute, 6> kAllAttributes = {Attribute::S, Attribute::P, Attribute::O,
                                                           Attribute::T, Attribute::H, Attribute::V};

std::string_view to_string(Attribute attr);
std::optional<Attribute> parse_attribute(std::string_view key);

// Closed set of inference functions accepted in h.
inline constexpr std::array<std::string_view, 6> kOperations = {"value", "max", "min", "count", "comp", "regress"};

struct Variable {
  std::string name;  // without the leading '?'

  friend bool operator==(const Variable &, const Variable &) = default;
};

// A string literal, an integer, a real, or a variable written "?name".
using AlistValue = std::variant<std::string, std::int64_t, double, Variable>;

bool is_variable_name(std::string_view s);  // "?[a-z][a-z0-9]*"
std::string to_string(const AlistValue &v);

class Alist {
 public:
  Alist() = default;
  Alist(std::initializer_list<std::pair<const Attribute, AlistValue>> init) : attrs_(init) {}

  bool has(Attribute a) const { return attrs_.contains(a); }
  const AlistValue *get(Attribute a) const;
  void set(Attribute a, AlistValue v) { attrs_[a] = std::move(v); }
  void erase(Attribute a) { attrs_.erase(a); }
  const std::map<Attribute, AlistValue> &attributes() const { return attrs_; }

  friend bool operator==(const Alist &, const Alist &) = default;

 private:
  std::map<Attribute, AlistValue> attrs_;
};

// Throws InvalidAlist unless: h is present and in kOperations, t (when
// present) is an integer year, every variable name is well formed, and a
// variable in v also occurs in s, p, o or t. o is a binding position.
void validate(const Alist &alist);
bool is_well_formed(const Alist &alist);

// Compact JSON keyed s, p, o, t, h, v in that order; variables as "?name".
std::string to_json(const Alist &alist);
Alist alist_from_json(std::string_view json_text);

// Same attribute set and values after renaming variables by order of first
// appearance (s, p, o, t, h, v); strings compare case-insensitively,
// numbers numerically.
bool alist_equivalent(const Alist &a, const Alist &b);

// --- templates -------------------------------------------------------------

struct Template {
  std::string id;
  QuestionKind qtype = QuestionKind::Other;
  std::string pattern;                        // e.g. "What is the <p> of <s>?"
  std::vector<std::pair<Attribute, std::string>> skeleton;  // raw right-hand sides
  std::vector<std::string> slots;             // slot names in pattern order
};

class TemplateSet {
 public:
  TemplateSet() = default;

  const std::vector<Template> &templates() const { return templates_; }
  const Template *find(std::string_view id) const;
  std::size_t size() const { return templates_.size(); }
  bool empty() const { return templates_.empty(); }

  static const TemplateSet &bundled();

 private:
  friend TemplateSet load_templates_from_string(std::string_view content);
  friend class TemplateMatcher;

  std::vector<Template> templates_;
  std::vector<std::regex> matchers_;
};

// Block format, blocks separated by blank lines, '#' starts a comment:
//
//   template <id> <QuestionType>
//   <pattern with <slot> markers>
//   <attr> = <literal | ?var | <slot>>
//   ...
TemplateSet load_templates(const std::filesystem::path &path);
TemplateSet load_templates_from_string(std::string_view content);

enum class ParseErrorReason { NoTemplate, BadTime, EmptySlot };

std::string_view to_string(ParseErrorReason reason);

struct ParseError {
  ParseErrorReason reason = ParseErrorReason::NoTemplate;
  std::string detail;
  std::string template_id;  // set when a template matched but instantiation failed
};

using ParseResult = std::variant<Alist, ParseError>;

// Total: returns an Alist or a ParseError value, never throws on input text.
ParseResult parse_question(std::string_view text, const TemplateSet &templates);
const Alist *parsed_alist(const ParseResult &r);

// Fills the template pattern from the alist. Throws UnificationFailure when
// the skeleton does not unify or the rendered text would not parse back
// through the same template.
std::string render_question(const Alist &alist, const Template &tmpl);

// Up to k copies of `alist` with p replaced by ranked PPDB paraphrases of
// the current property; the original property is excluded.
std::vector<Alist> paraphrase_property(const Alist &alist, const PpdbIndex &index, std::size_t k);

// --- recovery experiment ---------------------------------------------------

struct RecoveryCase {
  std::string uid;
  std::string question;
  Alist gold_alist;
  std::string hard_paraphrase;
};

std::vector<RecoveryCase> load_recovery_cases(const std::filesystem::path &path);
std::vector<RecoveryCase> load_recovery_cases_from_string(std::string_view jsonl);

using Paraphraser = std::function<std::string(const RecoveryCase &)>;

Paraphraser identity_paraphraser();
Paraphraser oracle_paraphraser();
// Looks up the candidate for the case uid; uids without a candidate keep
// their hard paraphrase.
Paraphraser candidate_paraphraser(const CandidateSet &candidates, std::string system = {});
Paraphraser backtranslation_paraphraser(TranslationService &service, std::string pivot);

enum class RecoveryOutcome { Success, ParseFailed, ParsedInequivalent };

std::string_view to_string(RecoveryOutcome outcome);

struct RecoveryCaseResult {
  std::string uid;
  std::string candidate;
  RecoveryOutcome outcome = RecoveryOutcome::ParseFailed;
  std::optional<Alist> parsed;
  std::optional<ParseError> error;
  std::vector<Alist> property_alternatives;  // filled when a PPDB index is supplied
};

struct RecoveryReport {
  std::vector<RecoveryCaseResult> cases;
  std::size_t successes = 0;

  double rate() const { return cases.empty() ? 0.0 : static_cast<double>(successes) / cases.size(); }
  std::string to_json() const;
  std::string to_text() const;
};

struct RecoveryOptions {
  const PpdbIndex *ppdb = nullptr;
  std::size_t ppdb_k = 5;
};

// Validates every case up front (InvalidCase), then paraphrases each hard
// paraphrase and checks whether the candidate parses to the gold alist.
RecoveryReport recovery_experiment(const std::vector<RecoveryCase> &cases, const Paraphraser &paraphraser,
                                   const TemplateSet &templates, const RecoveryOptions &options = {});

}  // namespace paraqa
