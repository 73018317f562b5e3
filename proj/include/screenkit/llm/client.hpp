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
#include <cstddef>
#include <cstdlib>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "screenkit/error.hpp"
#include "screenkit/llm/config.hpp"

namespace screenkit::llm {

struct ChatRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.0;
  std::size_t max_tokens = 3;
};

struct ChatResponse {
  std::string content;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
};

// A failed exchange with the endpoint. Retryable failures (timeouts,
// connection errors, 429 and 5xx) are retried by screen_batch.
class TransportError : public EndpointError {
 public:
  TransportError(const std::string& what, bool retryable)
      : EndpointError(what), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

// Implementations must be callable from several threads at once.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

inline ChatRequest make_request(const LlmConfig& config, std::string prompt) {
  return ChatRequest{config.model_name, std::move(prompt), config.temperature, config.max_tokens};
}

// {model, messages:[{role:"user", content}], temperature, max_tokens}
inline nlohmann::ordered_json request_body(const ChatRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = request.model;
  body["messages"] = nlohmann::ordered_json::array(
      {nlohmann::ordered_json{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  return body;
}

inline ChatResponse parse_response_body(std::string_view body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    throw TransportError("endpoint returned malformed JSON", true);
  }
  ChatResponse r;
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    r.content = content.is_null() ? std::string() : content.get<std::string>();
    if (j.contains("usage") && j["usage"].is_object()) {
      r.prompt_tokens = j["usage"].value("prompt_tokens", std::size_t{0});
      r.completion_tokens = j["usage"].value("completion_tokens", std::size_t{0});
    }
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("unexpected response shape: ") + e.what(), true);
  }
  return r;
}

}  // namespace screenkit::llm
