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

namespace paraqa::detail {

struct HttpResponse {
  int status = 0;
  std::string body;
};

// POSTs a JSON body to base_url + path. Transport failures raise
// ServiceUnavailable; HTTP status codes are returned to the caller.
HttpResponse post_json(std::string_view base_url, std::string_view path, const std::string &body,
                       int timeout_seconds);

}  // namespace paraqa::detail
