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

#include "http_client.hpp"

#include <httplib.h>

#include "paraqa/error.hpp"

namespace paraqa::detail {
namespace {

struct SplitUrl {
  std::string origin;
  std::string prefix;
};

SplitUrl split(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw ServiceUnavailable("not an absolute http URL: " + std::string(url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), {}};
  std::string prefix(url.substr(path_start));
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {std::string(url.substr(0, path_start)), prefix};
}

}  // namespace

HttpResponse post_json(std::string_view base_url, std::string_view path, const std::string &body,
                       int timeout_seconds) {
  const SplitUrl url = split(base_url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(timeout_seconds, 0);
  client.set_read_timeout(timeout_seconds, 0);
  client.set_write_timeout(timeout_seconds, 0);
  auto result = client.Post(url.prefix + std::string(path), body, "application/json");
  if (!result) {
    throw ServiceUnavailable(std::string(base_url) + std::string(path) + ": " +
                             httplib::to_string(result.error()));
  }
  return {result->status, result->body};
}

}  // namespace paraqa::detail
