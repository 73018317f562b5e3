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
#include <string>

#include "screenkit/decision.hpp"
#include "screenkit/error.hpp"

namespace screenkit::llm {

// Hyperparameters of the screening queries. Temperature 0 asks for the most
// repeatable answer; three tokens leave room for "Include"/"Exclude",
// which did not reliably fit in two.
struct LlmConfig {
  std::string model_name = "gpt-3.5-turbo";
  double temperature = 0.0;
  std::size_t max_tokens = 3;
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::milliseconds request_timeout{30'000};
  // Total attempts per prompt, shared by transport errors and unparseable
  // answers.
  std::size_t max_retries = 3;
  std::chrono::milliseconds backoff_initial{1'000};
  std::size_t parallelism = 4;
  // Decision used when no attempt produced a parseable answer.
  Decision parse_failure_fallback = Decision::Include;

  void validate() const {
    if (model_name.empty()) throw UsageError("model name must not be empty");
    if (!(temperature >= 0.0 && temperature <= 1.0)) throw UsageError("temperature must lie in [0, 1]");
    if (max_tokens < 1) throw UsageError("max_tokens must be at least 1");
    if (max_retries < 1) throw UsageError("max_retries must be at least 1");
    if (parallelism < 1) throw UsageError("parallelism must be at least 1");
  }
};

}  // namespace screenkit::llm
