// Copyright 2026 The screenkit Authors
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

#include <chrono>
#include <cstdlib>
#include <string>
#include <string_view>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

#include "screenkit/llm/client.hpp"

namespace screenkit::llm {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

inline Endpoint split_endpoint(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw UsageError("endpoint must be an absolute URL");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

// Chat-completions over HTTP(S). A fresh connection per request keeps the
// object shareable across worker threads.
class HttpChatClient final : public ChatClient {
 public:
  HttpChatClient(std::string endpoint, std::string api_key, std::chrono::milliseconds timeout)
      : endpoint_(split_endpoint(endpoint)), api_key_(std::move(api_key)), timeout_(timeout) {}

  static HttpChatClient from_config(const LlmConfig& config) {
    const char* key = std::getenv(config.api_key_env.c_str());
    return HttpChatClient(config.endpoint, key ? key : "", config.request_timeout);
  }

  ChatResponse complete(const ChatRequest& request) override {
    httplib::Client cli(endpoint_.base);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = cli.Post(endpoint_.path, headers, request_body(request).dump(), "application/json");
    if (!res) {
      throw TransportError("request failed: " + httplib::to_string(res.error()), true);
    }
    if (res->status < 200 || res->status >= 300) {
      const bool retryable = res->status == 408 || res->status == 429 || res->status >= 500;
      throw TransportError("endpoint answered HTTP " + std::to_string(res->status), retryable);
    }
    return parse_response_body(res->body);
  }

 private:
  Endpoint endpoint_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
};

}  // namespace screenkit::llm
