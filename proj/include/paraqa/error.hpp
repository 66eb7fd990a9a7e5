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

#include <stdexcept>
#include <string>
#include <utility>

namespace paraqa {

// Base for every fault raised by the library. `code()` is the stable
// machine-readable name used in JSON error payloads.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string &message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string &code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define PARAQA_DEFINE_ERROR(Name)                                  \
  class Name : public ::paraqa::Error {                            \
   public:                                                         \
    explicit Name(const std::string &message) : Error(#Name, message) {} \
  }

// corpus
PARAQA_DEFINE_ERROR(MalformedRecord);
PARAQA_DEFINE_ERROR(DuplicateUid);
PARAQA_DEFINE_ERROR(InsufficientItems);
PARAQA_DEFINE_ERROR(MalformedRules);
PARAQA_DEFINE_ERROR(IoError);

// metrics
PARAQA_DEFINE_ERROR(DimensionMismatch);
PARAQA_DEFINE_ERROR(ZeroVector);
PARAQA_DEFINE_ERROR(LengthMismatch);
PARAQA_DEFINE_ERROR(DegenerateInput);
PARAQA_DEFINE_ERROR(InvalidConfig);

// embeddings / services
PARAQA_DEFINE_ERROR(MissingEmbedding);
PARAQA_DEFINE_ERROR(ServiceUnavailable);
PARAQA_DEFINE_ERROR(MalformedResponse);
PARAQA_DEFINE_ERROR(MalformedStore);

// paragen
PARAQA_DEFINE_ERROR(MalformedRow);
PARAQA_DEFINE_ERROR(UnsupportedPivot);

// alist
PARAQA_DEFINE_ERROR(AmbiguousTemplates);
PARAQA_DEFINE_ERROR(MalformedTemplate);
PARAQA_DEFINE_ERROR(UnificationFailure);
PARAQA_DEFINE_ERROR(InvalidAlist);
PARAQA_DEFINE_ERROR(InvalidCase);

// harness
PARAQA_DEFINE_ERROR(UnknownUid);
PARAQA_DEFINE_ERROR(JoinFailure);
PARAQA_DEFINE_ERROR(EmptySet);

// annosvc
PARAQA_DEFINE_ERROR(EmptyItems);
PARAQA_DEFINE_ERROR(UnknownSession);
PARAQA_DEFINE_ERROR(UnknownItem);
PARAQA_DEFINE_ERROR(InvalidLabel);
PARAQA_DEFINE_ERROR(AlreadyLabeled);
PARAQA_DEFINE_ERROR(AnnotatorMismatch);
PARAQA_DEFINE_ERROR(InvalidRequest);

#undef PARAQA_DEFINE_ERROR

}  // namespace paraqa
