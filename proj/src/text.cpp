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

#include "paraqa/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <stdexcept>

namespace paraqa::text {
namespace {

const icu::Normalizer2 &nfc_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  return *n;
}

const icu::Normalizer2 &nfd_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *n = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFD normalizer unavailable");
  return *n;
}

icu::UnicodeString from_utf8(std::string_view s) {
  return icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
}

std::string to_utf8(const icu::UnicodeString &u) {
  std::string out;
  u.toUTF8String(out);
  return out;
}

icu::UnicodeString normalize(const icu::Normalizer2 &n, const icu::UnicodeString &u) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = n.normalize(u, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");
  return out;
}

bool is_combining(UChar32 c) {
  const int8_t type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK ||
         type == U_ENCLOSING_MARK;
}

bool is_word_char(UChar32 c) { return u_isalnum(c) || is_combining(c); }

bool is_apostrophe(UChar32 c) { return c == 0x27 || c == 0x2019; }

bool is_space(UChar32 c) { return u_isUWhiteSpace(c); }

}  // namespace

std::string nfc(std::string_view s) { return to_utf8(normalize(nfc_instance(), from_utf8(s))); }

std::string nfd(std::string_view s) { return to_utf8(normalize(nfd_instance(), from_utf8(s))); }

std::string to_lower(std::string_view s) {
  icu::UnicodeString u = from_utf8(s);
  u.toLower(icu::Locale::getRoot());
  return to_utf8(u);
}

std::string strip_diacritics(std::string_view s) {
  const icu::UnicodeString decomposed = normalize(nfd_instance(), from_utf8(s));
  icu::UnicodeString kept;
  for (int32_t i = 0; i < decomposed.length();) {
    const UChar32 c = decomposed.char32At(i);
    if (!is_combining(c)) kept.append(c);
    i += U16_LENGTH(c);
  }
  return to_utf8(normalize(nfc_instance(), kept));
}

bool has_diacritic(std::string_view s) {
  const icu::UnicodeString decomposed = normalize(nfd_instance(), from_utf8(s));
  for (int32_t i = 0; i < decomposed.length();) {
    const UChar32 c = decomposed.char32At(i);
    if (is_combining(c)) return true;
    i += U16_LENGTH(c);
  }
  return false;
}

std::string trim(std::string_view s) {
  const icu::UnicodeString u = from_utf8(s);
  int32_t begin = 0;
  int32_t end = u.length();
  while (begin < end && is_space(u.char32At(begin))) begin += U16_LENGTH(u.char32At(begin));
  while (end > begin) {
    const int32_t prev = u.moveIndex32(end, -1);
    if (!is_space(u.char32At(prev))) break;
    end = prev;
  }
  return to_utf8(u.tempSubStringBetween(begin, end));
}

std::string collapse_whitespace(std::string_view s) {
  const icu::UnicodeString u = from_utf8(s);
  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < u.length();) {
    const UChar32 c = u.char32At(i);
    i += U16_LENGTH(c);
    if (is_space(c)) {
      pending_space = !out.isEmpty();
      continue;
    }
    if (pending_space) out.append(static_cast<UChar32>(' '));
    pending_space = false;
    out.append(c);
  }
  return to_utf8(out);
}

std::vector<std::string> tokenize(std::string_view s, TokenizeOptions options) {
  icu::UnicodeString u = normalize(nfc_instance(), from_utf8(s));
  if (options.lowercase) u.toLower(icu::Locale::getRoot());

  std::vector<UChar32> cps;
  cps.reserve(static_cast<size_t>(u.length()));
  for (int32_t i = 0; i < u.length();) {
    const UChar32 c = u.char32At(i);
    cps.push_back(c);
    i += U16_LENGTH(c);
  }

  std::vector<std::string> tokens;
  icu::UnicodeString current;
  auto flush = [&] {
    if (!current.isEmpty()) tokens.push_back(to_utf8(current));
    current.remove();
  };

  const size_t n = cps.size();
  for (size_t i = 0; i < n; ++i) {
    const UChar32 c = cps[i];
    if (is_space(c)) {
      flush();
      continue;
    }
    if (is_word_char(c)) {
      current.append(c);
      continue;
    }
    const bool prev_word = i > 0 && is_word_char(cps[i - 1]);
    const bool next_word = i + 1 < n && is_word_char(cps[i + 1]);
    if (is_apostrophe(c) && prev_word && i + 1 < n && u_isalpha(cps[i + 1])) {
      flush();
      current.append(c);
      continue;
    }
    if ((c == '.' || c == ',') && prev_word && next_word && u_isdigit(cps[i - 1]) &&
        u_isdigit(cps[i + 1])) {
      current.append(c);
      continue;
    }
    flush();
    tokens.push_back(to_utf8(icu::UnicodeString(c)));
  }
  flush();
  return tokens;
}

}  // namespace paraqa::text
