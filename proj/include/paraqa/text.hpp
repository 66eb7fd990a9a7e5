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

#include <string>
#include <string_view>
#include <vector>

// Unicode helpers shared by the detectors and the metrics. All strings are
// UTF-8; invalid sequences are replaced with U+FFFD on the way through ICU.
namespace paraqa::text {

std::string nfc(std::string_view s);
std::string nfd(std::string_view s);
std::string to_lower(std::string_view s);

// NFD, drop every combining mark (general categories Mn, Mc, Me), NFC.
std::string strip_diacritics(std::string_view s);

// True iff the canonical decomposition of `s` contains a combining mark.
bool has_diacritic(std::string_view s);

// Trim, collapse internal whitespace runs to one ASCII space.
std::string collapse_whitespace(std::string_view s);
std::string trim(std::string_view s);

struct TokenizeOptions {
  bool lowercase = true;
};

// NFC-normalize, optionally lowercase, split on whitespace and split
// punctuation into standalone tokens. An apostrophe between a word and a
// following letter run starts a clitic token ("who's" -> "who", "'s");
// '.' and ',' between two digits stay inside the number token.
std::vector<std::string> tokenize(std::string_view s, TokenizeOptions options = {});

}  // namespace paraqa::text
