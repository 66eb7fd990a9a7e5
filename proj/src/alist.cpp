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

#include "paraqa/alist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "bundled.hpp"
#include "paraqa/error.hpp"
#include "paraqa/text.hpp"

namespace paraqa {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Attribute attr) {
  switch (attr) {
    case Attribute::S: return "s";
    case Attribute::P: return "p";
    case Attribute::O: return "o";
    case Attribute::T: return "t";
    case Attribute::H: return "h";
    case Attribute::V: return "v";
  }
  return "";
}

std::optional<Attribute> parse_attribute(std::string_view key) {
  for (Attribute a : kAllAttributes) {
    if (to_string(a) == key) return a;
  }
  return std::nullopt;
}

bool is_variable_name(std::string_view s) {
  if (s.size() < 2 || s[0] != '?' || !(s[1] >= 'a' && s[1] <= 'z')) return false;
  return std::all_of(s.begin() + 2, s.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); });
}

namespace {

std::string format_double(double d) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, d);
  return {buf, res.ptr};
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string_view trim_ascii(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

AlistValue value_from_text(std::string_view raw) {
  if (is_variable_name(raw)) return Variable{std::string(raw.substr(1))};
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') return std::string(raw.substr(1, raw.size() - 2));
  std::int64_t i = 0;
  if (auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), i); ec == std::errc() && p == raw.data() + raw.size()) {
    return i;
  }
  double d = 0.0;
  if (auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), d);
      ec == std::errc() && p == raw.data() + raw.size() && std::isfinite(d)) {
    return d;
  }
  return std::string(raw);
}

ordered_json value_to_json(const AlistValue &v) {
  return std::visit(
      [](const auto &x) -> ordered_json {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, Variable>) {
          return "?" + x.name;
        } else {
          return x;
        }
      },
      v);
}

// Canonical form used by the equivalence check.
struct CanonicalValue {
  enum class Kind { String, Number, Variable } kind;
  std::string text;
  double number = 0.0;
};

std::map<Attribute, CanonicalValue> canonicalize(const Alist &alist) {
  std::map<std::string, std::string> renames;
  std::map<Attribute, CanonicalValue> out;
  for (const auto &[attr, value] : alist.attributes()) {
    CanonicalValue cv{};
    if (const auto *s = std::get_if<std::string>(&value)) {
      cv.kind = CanonicalValue::Kind::String;
      cv.text = text::to_lower(text::collapse_whitespace(*s));
    } else if (const auto *i = std::get_if<std::int64_t>(&value)) {
      cv.kind = CanonicalValue::Kind::Number;
      cv.number = static_cast<double>(*i);
    } else if (const auto *d = std::get_if<double>(&value)) {
      cv.kind = CanonicalValue::Kind::Number;
      cv.number = *d;
    } else {
      const auto &var = std::get<Variable>(value);
      auto [it, inserted] = renames.emplace(var.name, "y" + std::to_string(renames.size()));
      cv.kind = CanonicalValue::Kind::Variable;
      cv.text = it->second;
    }
    out.emplace(attr, std::move(cv));
  }
  return out;
}

bool values_match(const AlistValue &a, const AlistValue &b) {
  Alist x;
  x.set(Attribute::S, a);
  Alist y;
  y.set(Attribute::S, b);
  return alist_equivalent(x, y);
}

}  // namespace

std::string to_string(const AlistValue &v) {
  return std::visit(
      [](const auto &x) -> std::string {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<X, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<X, double>) {
          return format_double(x);
        } else {
          return "?" + x.name;
        }
      },
      v);
}

const AlistValue *Alist::get(Attribute a) const {
  auto it = attrs_.find(a);
  return it == attrs_.end() ? nullptr : &it->second;
}

void validate(const Alist &alist) {
  const auto *h = alist.get(Attribute::H);
  if (h == nullptr) throw InvalidAlist("alist has no h attribute");
  const auto *op = std::get_if<std::string>(h);
  if (op == nullptr || std::find(kOperations.begin(), kOperations.end(), *op) == kOperations.end()) {
    throw InvalidAlist("h must be one of value, max, min, count, comp, regress (got '" + to_string(*h) + "')");
  }
  if (const auto *t = alist.get(Attribute::T)) {
    const auto *year = std::get_if<std::int64_t>(t);
    if (year == nullptr || *year < 0 || *year > 9999) throw InvalidAlist("t must be an integer year");
  }
  std::set<std::string> bound;
  for (const auto &[attr, value] : alist.attributes()) {
    const auto *var = std::get_if<Variable>(&value);
    if (var == nullptr) continue;
    if (!is_variable_name("?" + var->name)) throw InvalidAlist("bad variable name '?" + var->name + "'");
    if (attr != Attribute::V && attr != Attribute::H) bound.insert(var->name);
  }
  if (const auto *v = alist.get(Attribute::V)) {
    if (const auto *var = std::get_if<Variable>(v); var != nullptr && !bound.contains(var->name)) {
      throw InvalidAlist("variable ?" + var->name + " in v is not bound by s, p, o or t");
    }
  }
}

bool is_well_formed(const Alist &alist) {
  try {
    validate(alist);
    return true;
  } catch (const InvalidAlist &) {
    return false;
  }
}

std::string to_json(const Alist &alist) {
  ordered_json j = ordered_json::object();
  for (Attribute a : kAllAttributes) {
    if (const auto *v = alist.get(a)) j[std::string(to_string(a))] = value_to_json(*v);
  }
  return j.dump();
}

namespace {

Alist alist_from(const json &doc) {
  if (!doc.is_object()) throw InvalidAlist("alist must be a JSON object");
  Alist alist;
  for (const auto &[key, value] : doc.items()) {
    const auto attr = parse_attribute(key);
    if (!attr) throw InvalidAlist("unknown alist attribute '" + key + "'");
    if (value.is_string()) {
      const auto s = value.get<std::string>();
      if (is_variable_name(s)) {
        alist.set(*attr, Variable{s.substr(1)});
      } else {
        alist.set(*attr, s);
      }
    } else if (value.is_number_integer()) {
      alist.set(*attr, value.get<std::int64_t>());
    } else if (value.is_number()) {
      alist.set(*attr, value.get<double>());
    } else {
      throw InvalidAlist("alist attribute '" + key + "' must be a string or a number");
    }
  }
  validate(alist);
  return alist;
}

}  // namespace

Alist alist_from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception &e) {
    throw InvalidAlist(std::string("alist is not valid JSON: ") + e.what());
  }
  return alist_from(doc);
}

bool alist_equivalent(const Alist &a, const Alist &b) {
  const auto ca = canonicalize(a);
  const auto cb = canonicalize(b);
  if (ca.size() != cb.size()) return false;
  for (const auto &[attr, va] : ca) {
    auto it = cb.find(attr);
    if (it == cb.end()) return false;
    const auto &vb = it->second;
    if (va.kind != vb.kind) return false;
    if (va.kind == CanonicalValue::Kind::Number ? va.number != vb.number : va.text != vb.text) return false;
  }
  return true;
}

// --- templates -------------------------------------------------------------

namespace {

struct PatternPiece {
  bool is_slot = false;
  std::string text;
};

std::vector<PatternPiece> split_pattern(std::string_view pattern) {
  std::vector<PatternPiece> pieces;
  std::size_t i = 0;
  while (i < pattern.size()) {
    if (pattern[i] == '<') {
      const auto close = pattern.find('>', i);
      if (close != std::string_view::npos) {
        const auto name = pattern.substr(i + 1, close - i - 1);
        const bool valid = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
          return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        });
        if (valid) {
          pieces.push_back({true, std::string(name)});
          i = close + 1;
          continue;
        }
      }
    }
    if (pieces.empty() || pieces.back().is_slot) pieces.push_back({false, {}});
    pieces.back().text += pattern[i++];
  }
  return pieces;
}

bool is_regex_special(char c) {
  return std::string_view("\\^$.|?*+()[]{}/").find(c) != std::string_view::npos;
}

bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

// Literal whitespace matches any whitespace run; punctuation may be
// preceded by optional whitespace; a trailing '?' is optional.
std::regex compile_pattern(const std::vector<PatternPiece> &pieces) {
  std::string re = "^\\s*";
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const auto &piece = pieces[p];
    if (piece.is_slot) {
      re += "(.+?)";
      continue;
    }
    const bool last_piece = p + 1 == pieces.size();
    std::string_view lit = piece.text;
    bool optional_question = false;
    if (last_piece) {
      const auto trimmed = trim_ascii(lit);
      if (!trimmed.empty() && trimmed.back() == '?') {
        optional_question = true;
        lit = lit.substr(0, lit.rfind('?'));
      }
    }
    bool in_space = false;
    for (char c : lit) {
      if (c == ' ' || c == '\t') {
        if (!in_space) re += "\\s+";
        in_space = true;
        continue;
      }
      in_space = false;
      if (is_ascii_punct(c)) re += "\\s*";
      if (is_regex_special(c)) re += '\\';
      re += c;
    }
    if (optional_question) re += "\\s*\\??";
  }
  re += "\\s*$";
  return std::regex(re, std::regex::ECMAScript | std::regex::icase);
}

std::string normalize_question(std::string_view text) {
  std::string s = text::nfc(text::collapse_whitespace(text));
  // Typographic apostrophes are folded so "France’s" matches "'s" patterns.
  const std::string curly = "\xE2\x80\x99";
  for (auto pos = s.find(curly); pos != std::string::npos; pos = s.find(curly, pos + 1)) s.replace(pos, curly.size(), "'");
  return s;
}

struct Instantiated {
  std::optional<Alist> alist;
  std::optional<ParseError> error;
};

Instantiated instantiate(const Template &tmpl, const std::smatch &m) {
  std::map<std::string, std::string> slot_values;
  for (std::size_t i = 0; i < tmpl.slots.size(); ++i) {
    const std::string value = text::trim(m[static_cast<int>(i + 1)].str());
    if (value.empty()) return {std::nullopt, ParseError{ParseErrorReason::EmptySlot, tmpl.slots[i], tmpl.id}};
    slot_values[tmpl.slots[i]] = value;
  }
  Alist alist;
  for (const auto &[attr, rhs] : tmpl.skeleton) {
    if (rhs.size() > 2 && rhs.front() == '<' && rhs.back() == '>') {
      const std::string &raw = slot_values.at(rhs.substr(1, rhs.size() - 2));
      if (attr == Attribute::T) {
        const bool year = raw.size() == 4 && std::all_of(raw.begin(), raw.end(), [](char c) { return c >= '0' && c <= '9'; });
        if (!year) return {std::nullopt, ParseError{ParseErrorReason::BadTime, raw, tmpl.id}};
        alist.set(attr, static_cast<std::int64_t>(std::stoi(raw)));
      } else if (attr == Attribute::P) {
        alist.set(attr, text::to_lower(raw));
      } else {
        alist.set(attr, raw);
      }
    } else {
      alist.set(attr, value_from_text(rhs));
    }
  }
  return {std::move(alist), std::nullopt};
}

std::string normalized_pattern_key(const std::vector<PatternPiece> &pieces) {
  std::string key;
  for (const auto &p : pieces) key += p.is_slot ? std::string("<>") : text::to_lower(p.text);
  return text::collapse_whitespace(key);
}

std::string probe_question(const std::vector<PatternPiece> &pieces, const Template &tmpl) {
  static const std::array<std::string_view, 6> kWords = {"alpha", "bravo", "charlie", "delta", "echo", "foxtrot"};
  std::string out;
  std::size_t slot = 0;
  for (const auto &p : pieces) {
    if (!p.is_slot) {
      out += p.text;
      continue;
    }
    bool is_time = false;
    for (const auto &[attr, rhs] : tmpl.skeleton) {
      if (attr == Attribute::T && rhs == "<" + p.text + ">") is_time = true;
    }
    out += is_time ? std::to_string(2001 + slot) : std::string(kWords[slot % kWords.size()]);
    ++slot;
  }
  return out;
}

}  // namespace

const Template *TemplateSet::find(std::string_view id) const {
  for (const auto &t : templates_) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

TemplateSet load_templates_from_string(std::string_view content) {
  std::vector<std::vector<std::string>> blocks(1);
  std::istringstream lines{std::string(content)};
  std::string line;
  while (std::getline(lines, line)) {
    const auto trimmed = trim_ascii(line);
    if (trimmed.starts_with("#")) continue;
    if (trimmed.empty()) {
      if (!blocks.back().empty()) blocks.emplace_back();
      continue;
    }
    blocks.back().emplace_back(trimmed);
  }
  if (blocks.back().empty()) blocks.pop_back();

  TemplateSet set;
  std::map<std::string, std::string> seen_patterns;
  for (const auto &block : blocks) {
    std::istringstream header(block[0]);
    std::string keyword, id, qtype_name, extra;
    header >> keyword >> id >> qtype_name;
    const std::string where = id.empty() ? block[0] : id;
    if (keyword != "template" || id.empty() || qtype_name.empty() || (header >> extra)) {
      throw MalformedTemplate(where + ": expected 'template <id> <QuestionType>'");
    }
    if (set.find(id) != nullptr) throw MalformedTemplate(id + ": duplicate template id");
    const auto kind = parse_question_kind(qtype_name);
    if (!kind) throw MalformedTemplate(id + ": unknown question type '" + qtype_name + "'");
    if (block.size() < 2) throw MalformedTemplate(id + ": missing pattern line");

    Template t;
    t.id = id;
    t.qtype = *kind;
    t.pattern = block[1];
    const auto pieces = split_pattern(t.pattern);
    std::set<std::string> pattern_slots;
    for (const auto &p : pieces) {
      if (!p.is_slot) continue;
      if (!pattern_slots.insert(p.text).second) throw MalformedTemplate(id + ": slot <" + p.text + "> repeated");
      t.slots.push_back(p.text);
    }

    std::set<Attribute> attrs;
    std::set<std::string> skeleton_slots;
    for (std::size_t i = 2; i < block.size(); ++i) {
      const auto eq = block[i].find('=');
      if (eq == std::string::npos) throw MalformedTemplate(id + ": expected 'key = value', got '" + block[i] + "'");
      const auto key = trim_ascii(std::string_view(block[i]).substr(0, eq));
      const auto rhs = std::string(trim_ascii(std::string_view(block[i]).substr(eq + 1)));
      const auto attr = parse_attribute(key);
      if (!attr) throw MalformedTemplate(id + ": unknown attribute '" + std::string(key) + "'");
      if (!attrs.insert(*attr).second) throw MalformedTemplate(id + ": attribute '" + std::string(key) + "' repeated");
      if (rhs.empty()) throw MalformedTemplate(id + ": empty value for '" + std::string(key) + "'");
      if (rhs.size() > 2 && rhs.front() == '<' && rhs.back() == '>') {
        const auto slot = rhs.substr(1, rhs.size() - 2);
        if (!pattern_slots.contains(slot)) throw MalformedTemplate(id + ": slot <" + slot + "> not in pattern");
        if (!skeleton_slots.insert(slot).second) throw MalformedTemplate(id + ": slot <" + slot + "> used twice");
      }
      t.skeleton.emplace_back(*attr, rhs);
    }
    if (skeleton_slots != pattern_slots) throw MalformedTemplate(id + ": pattern slots missing from the skeleton");
    std::stable_sort(t.skeleton.begin(), t.skeleton.end(),
                     [](const auto &a, const auto &b) { return a.first < b.first; });

    // The skeleton with placeholder values must itself be a valid alist.
    Alist shape;
    for (const auto &[attr, rhs] : t.skeleton) {
      if (rhs.front() == '<' && rhs.back() == '>') {
        shape.set(attr, attr == Attribute::T ? AlistValue{std::int64_t{2000}} : AlistValue{std::string("x")});
      } else {
        shape.set(attr, value_from_text(rhs));
      }
    }
    try {
      validate(shape);
    } catch (const InvalidAlist &e) {
      throw MalformedTemplate(id + ": " + e.what());
    }

    const std::string pattern_key = normalized_pattern_key(pieces);
    if (auto it = seen_patterns.find(pattern_key); it != seen_patterns.end()) {
      throw AmbiguousTemplates(it->second + ", " + id + ": identical patterns");
    }
    seen_patterns.emplace(pattern_key, id);

    set.matchers_.push_back(compile_pattern(pieces));
    set.templates_.push_back(std::move(t));
  }

  // A template whose own probe question is claimed by an earlier template
  // can never be reached; later overlaps are resolved by file order.
  for (std::size_t i = 0; i < set.templates_.size(); ++i) {
    const auto pieces = split_pattern(set.templates_[i].pattern);
    const std::string probe = normalize_question(probe_question(pieces, set.templates_[i]));
    for (std::size_t j = 0; j < i; ++j) {
      std::smatch m;
      if (std::regex_match(probe, m, set.matchers_[j]) && instantiate(set.templates_[j], m).alist) {
        throw AmbiguousTemplates(set.templates_[j].id + ", " + set.templates_[i].id + ": '" + probe +
                                 "' matches both");
      }
    }
  }
  return set;
}

TemplateSet load_templates(const std::filesystem::path &path) { return load_templates_from_string(read_file(path)); }

const TemplateSet &TemplateSet::bundled() {
  static const TemplateSet set = load_templates_from_string(bundled::templates_text());
  return set;
}

std::string_view to_string(ParseErrorReason reason) {
  switch (reason) {
    case ParseErrorReason::NoTemplate: return "NoTemplate";
    case ParseErrorReason::BadTime: return "BadTime";
    case ParseErrorReason::EmptySlot: return "EmptySlot";
  }
  return "";
}

// Friend of TemplateSet so matching can reach the compiled patterns.
class TemplateMatcher {
 public:
  static ParseResult parse(std::string_view text, const TemplateSet &set) {
    std::string question;
    try {
      question = normalize_question(text);
    } catch (const std::exception &e) {
      return ParseError{ParseErrorReason::NoTemplate, e.what(), {}};
    }
    std::optional<ParseError> first_failure;
    for (std::size_t i = 0; i < set.templates_.size(); ++i) {
      std::smatch m;
      bool matched = false;
      try {
        matched = std::regex_match(question, m, set.matchers_[i]);
      } catch (const std::regex_error &) {
        matched = false;  // complexity limits on pathological input
      }
      if (!matched) continue;
      auto inst = instantiate(set.templates_[i], m);
      if (inst.alist) return std::move(*inst.alist);
      if (!first_failure) first_failure = std::move(inst.error);
    }
    if (first_failure) return std::move(*first_failure);
    return ParseError{ParseErrorReason::NoTemplate, {}, {}};
  }

  static bool reparses_to(const std::string &question, const Template &tmpl, const TemplateSet *owner,
                          const Alist &expected) {
    std::regex re = compile_pattern(split_pattern(tmpl.pattern));
    if (owner != nullptr) {
      for (std::size_t i = 0; i < owner->templates_.size(); ++i) {
        if (&owner->templates_[i] == &tmpl) re = owner->matchers_[i];
      }
    }
    std::smatch m;
    const std::string normalized = normalize_question(question);
    if (!std::regex_match(normalized, m, re)) return false;
    const auto inst = instantiate(tmpl, m);
    return inst.alist && alist_equivalent(*inst.alist, expected);
  }
};

ParseResult parse_question(std::string_view text, const TemplateSet &templates) {
  return TemplateMatcher::parse(text, templates);
}

const Alist *parsed_alist(const ParseResult &r) { return std::get_if<Alist>(&r); }

std::string render_question(const Alist &alist, const Template &tmpl) {
  std::map<std::string, std::string> fill;
  std::map<std::string, std::string> var_map;  // template var -> alist var
  std::set<Attribute> covered;
  for (const auto &[attr, rhs] : tmpl.skeleton) {
    covered.insert(attr);
    const AlistValue *value = alist.get(attr);
    const std::string key(to_string(attr));
    if (value == nullptr) throw UnificationFailure(tmpl.id + ": alist has no '" + key + "'");
    if (rhs.size() > 2 && rhs.front() == '<' && rhs.back() == '>') {
      if (std::holds_alternative<Variable>(*value)) {
        throw UnificationFailure(tmpl.id + ": slot for '" + key + "' cannot take a variable");
      }
      fill[rhs.substr(1, rhs.size() - 2)] = to_string(*value);
      continue;
    }
    const AlistValue literal = value_from_text(rhs);
    if (const auto *tv = std::get_if<Variable>(&literal)) {
      const auto *av = std::get_if<Variable>(value);
      if (av == nullptr) throw UnificationFailure(tmpl.id + ": '" + key + "' must be a variable");
      auto [it, inserted] = var_map.emplace(tv->name, av->name);
      if (it->second != av->name) throw UnificationFailure(tmpl.id + ": inconsistent variable binding");
      continue;
    }
    if (!values_match(literal, *value)) {
      throw UnificationFailure(tmpl.id + ": '" + key + "' is " + to_string(*value) + ", template requires " + rhs);
    }
  }
  for (const auto &[attr, value] : alist.attributes()) {
    if (!covered.contains(attr)) {
      throw UnificationFailure(tmpl.id + ": template has no '" + std::string(to_string(attr)) + "'");
    }
  }
  std::string out;
  for (const auto &piece : split_pattern(tmpl.pattern)) out += piece.is_slot ? fill.at(piece.text) : piece.text;
  if (!TemplateMatcher::reparses_to(out, tmpl, nullptr, alist)) {
    throw UnificationFailure(tmpl.id + ": rendered '" + out + "' does not parse back to the alist");
  }
  return out;
}

std::vector<Alist> paraphrase_property(const Alist &alist, const PpdbIndex &index, std::size_t k) {
  std::vector<Alist> out;
  const auto *p = alist.get(Attribute::P);
  const auto *property = p != nullptr ? std::get_if<std::string>(p) : nullptr;
  if (property == nullptr || k == 0) return out;
  const std::string original = PpdbIndex::key(*property);
  for (const auto &entry : index.lookup(*property)) {
    if (out.size() >= k) break;
    if (PpdbIndex::key(entry.rhs_phrase) == original) continue;
    Alist copy = alist;
    copy.set(Attribute::P, entry.rhs_phrase);
    out.push_back(std::move(copy));
  }
  return out;
}

// --- recovery experiment ---------------------------------------------------

std::vector<RecoveryCase> load_recovery_cases_from_string(std::string_view jsonl) {
  std::vector<RecoveryCase> cases;
  std::istringstream lines{std::string(jsonl)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto row = json::parse(line);
      RecoveryCase c;
      c.uid = row.at("uid").is_string() ? row.at("uid").get<std::string>() : row.at("uid").dump();
      c.question = row.at("question").get<std::string>();
      c.gold_alist = alist_from(row.at("gold_alist"));
      c.hard_paraphrase = row.at("hard_paraphrase").get<std::string>();
      cases.push_back(std::move(c));
    } catch (const json::exception &e) {
      throw MalformedRow("case line " + std::to_string(lineno) + ": " + e.what());
    } catch (const InvalidAlist &e) {
      throw MalformedRow("case line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cases;
}

std::vector<RecoveryCase> load_recovery_cases(const std::filesystem::path &path) {
  return load_recovery_cases_from_string(read_file(path));
}

Paraphraser identity_paraphraser() {
  return [](const RecoveryCase &c) { return c.hard_paraphrase; };
}

Paraphraser oracle_paraphraser() {
  return [](const RecoveryCase &c) { return c.question; };
}

Paraphraser candidate_paraphraser(const CandidateSet &candidates, std::string system) {
  std::map<std::string, std::string> by_uid;
  for (const auto &c : candidates.candidates) {
    if (!system.empty() && c.system != system) continue;
    by_uid.emplace(c.uid, c.text);
  }
  return [by_uid = std::move(by_uid)](const RecoveryCase &c) {
    auto it = by_uid.find(c.uid);
    return it == by_uid.end() ? c.hard_paraphrase : it->second;
  };
}

Paraphraser backtranslation_paraphraser(TranslationService &service, std::string pivot) {
  return [&service, pivot = std::move(pivot)](const RecoveryCase &c) {
    return backtranslate(c.hard_paraphrase, pivot, service, c.uid).text;
  };
}

std::string_view to_string(RecoveryOutcome outcome) {
  switch (outcome) {
    case RecoveryOutcome::Success: return "success";
    case RecoveryOutcome::ParseFailed: return "parse-failed";
    case RecoveryOutcome::ParsedInequivalent: return "parsed-inequivalent";
  }
  return "";
}

RecoveryReport recovery_experiment(const std::vector<RecoveryCase> &cases, const Paraphraser &paraphraser,
                                   const TemplateSet &templates, const RecoveryOptions &options) {
  for (const auto &c : cases) {
    const auto q = parse_question(c.question, templates);
    const Alist *qa = parsed_alist(q);
    if (qa == nullptr || !alist_equivalent(*qa, c.gold_alist)) {
      throw InvalidCase(c.uid + ": question does not parse to its gold alist");
    }
    if (parsed_alist(parse_question(c.hard_paraphrase, templates)) != nullptr) {
      throw InvalidCase(c.uid + ": hard paraphrase is parsable");
    }
  }

  RecoveryReport report;
  for (const auto &c : cases) {
    RecoveryCaseResult r;
    r.uid = c.uid;
    r.candidate = paraphraser(c);
    auto parsed = parse_question(r.candidate, templates);
    if (const Alist *a = parsed_alist(parsed)) {
      r.outcome = alist_equivalent(*a, c.gold_alist) ? RecoveryOutcome::Success : RecoveryOutcome::ParsedInequivalent;
      if (options.ppdb != nullptr) r.property_alternatives = paraphrase_property(*a, *options.ppdb, options.ppdb_k);
      r.parsed = *a;
    } else {
      r.outcome = RecoveryOutcome::ParseFailed;
      r.error = std::get<ParseError>(parsed);
    }
    if (r.outcome == RecoveryOutcome::Success) ++report.successes;
    report.cases.push_back(std::move(r));
  }
  return report;
}

std::string RecoveryReport::to_json() const {
  ordered_json doc;
  doc["total"] = cases.size();
  doc["successes"] = successes;
  doc["rate"] = rate();
  doc["cases"] = ordered_json::array();
  for (const auto &r : cases) {
    ordered_json item;
    item["uid"] = r.uid;
    item["candidate"] = r.candidate;
    item["outcome"] = to_string(r.outcome);
    if (r.parsed) item["alist"] = ordered_json::parse(paraqa::to_json(*r.parsed));
    if (r.error) {
      item["error"] = {{"reason", to_string(r.error->reason)}, {"detail", r.error->detail}};
    }
    if (!r.property_alternatives.empty()) {
      item["property_alternatives"] = ordered_json::array();
      for (const auto &alt : r.property_alternatives) {
        item["property_alternatives"].push_back(ordered_json::parse(paraqa::to_json(alt)));
      }
    }
    doc["cases"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

std::string RecoveryReport::to_text() const {
  std::ostringstream out;
  std::size_t width = 3;
  for (const auto &r : cases) width = std::max(width, r.uid.size());
  for (const auto &r : cases) {
    out << r.uid << std::string(width - r.uid.size() + 2, ' ') << to_string(r.outcome);
    out << std::string(22 - to_string(r.outcome).size(), ' ') << r.candidate << '\n';
  }
  out << "recovered " << successes << "/" << cases.size() << '\n';
  return out.str();
}

}  // namespace paraqa
