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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "screenkit/error.hpp"
#include "screenkit/llm/client.hpp"
#include "screenkit/llm/config.hpp"
#include "screenkit/llm/parse_decision.hpp"
#include "screenkit/llm/replay_cache.hpp"
#include "screenkit/prompt.hpp"

namespace screenkit::llm {

struct ScreenOutcome {
  std::string record_key;
  ParsedDecision parsed = ParseFailure{};
  // The parsed decision, or the fallback when parsing never succeeded.
  Decision decision = Decision::Include;
  std::string raw_response;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  std::chrono::milliseconds latency{0};
  std::size_t attempt_count = 0;

  bool parse_failure() const noexcept { return is_failure(parsed); }
};

struct ScreenOptions {
  std::size_t run_index = 0;
  std::string include_word = "Include";
  std::string exclude_word = "Exclude";
  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };
};

// Some prompts could not be screened. Outcomes of the others are kept.
class BatchError : public EndpointError {
 public:
  BatchError(std::vector<std::optional<ScreenOutcome>> partial, std::vector<std::string> failed_keys,
             std::vector<std::string> reasons)
      : EndpointError(describe(partial, failed_keys, reasons)),
        partial_(std::move(partial)),
        failed_keys_(std::move(failed_keys)),
        reasons_(std::move(reasons)) {}

  const std::vector<std::optional<ScreenOutcome>>& partial() const noexcept { return partial_; }
  const std::vector<std::string>& failed_keys() const noexcept { return failed_keys_; }
  const std::vector<std::string>& reasons() const noexcept { return reasons_; }
  std::vector<std::string> completed_keys() const {
    std::vector<std::string> keys;
    for (const auto& o : partial_) {
      if (o) keys.push_back(o->record_key);
    }
    return keys;
  }

 private:
  static std::string describe(const std::vector<std::optional<ScreenOutcome>>& partial,
                              const std::vector<std::string>& failed,
                              const std::vector<std::string>& reasons) {
    std::string msg = std::to_string(failed.size()) + " of " + std::to_string(partial.size()) +
                      " prompts failed";
    if (!failed.empty()) msg += " (first: '" + failed.front() + "': " + reasons.front() + ")";
    return msg;
  }

  std::vector<std::optional<ScreenOutcome>> partial_;
  std::vector<std::string> failed_keys_;
  std::vector<std::string> reasons_;
};

namespace detail {

struct PromptResult {
  std::optional<ScreenOutcome> outcome;
  std::string failure;
};

inline PromptResult screen_one(ChatClient* client, const LlmConfig& config, const RenderedPrompt& prompt,
                               ReplayCache& cache, const ScreenOptions& options) {
  const ChatRequest request = make_request(config, prompt.text);
  const std::string key = cache_key(request);
  ScreenOutcome out;
  out.record_key = prompt.record_key;

  for (std::size_t attempt = 0; attempt < config.max_retries; ++attempt) {
    out.attempt_count = attempt + 1;
    ChatResponse response;
    if (cache.mode() == ReplayCache::Mode::Replay) {
      auto hit = cache.lookup(key, options.run_index, attempt);
      if (!hit) return {std::nullopt, "no recorded response for prompt"};
      response = {hit->response, hit->prompt_tokens, hit->completion_tokens};
      out.latency = hit->latency;
    } else {
      if (client == nullptr) return {std::nullopt, "no client configured"};
      const auto started = std::chrono::steady_clock::now();
      try {
        response = client->complete(request);
      } catch (const TransportError& e) {
        if (!e.retryable() || attempt + 1 == config.max_retries) {
          return {std::nullopt, e.what()};
        }
        options.sleep(config.backoff_initial * (std::int64_t{1} << attempt));
        continue;
      }
      out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - started);
      if (cache.mode() == ReplayCache::Mode::Record) {
        CachedExchange entry;
        entry.key_hash = key;
        entry.run = options.run_index;
        entry.attempt = attempt;
        entry.request = request_body(request);
        entry.response = response.content;
        entry.prompt_tokens = response.prompt_tokens;
        entry.completion_tokens = response.completion_tokens;
        entry.latency = out.latency;
        cache.append(std::move(entry));
      }
    }
    out.raw_response = response.content;
    out.prompt_tokens = response.prompt_tokens;
    out.completion_tokens = response.completion_tokens;
    out.parsed = parse_decision(response.content, options.include_word, options.exclude_word);
    if (!is_failure(out.parsed)) {
      out.decision = std::get<Decision>(out.parsed);
      return {std::move(out), {}};
    }
  }
  out.decision = config.parse_failure_fallback;
  return {std::move(out), {}};
}

}  // namespace detail

// Screens every prompt; outcome i belongs to prompt i whatever the
// parallelism. Transport failures back off exponentially and, like
// unparseable answers, consume the attempt budget. Answers that never parse
// resolve to the configured fallback with the failure kept in `parsed`.
inline std::vector<ScreenOutcome> screen_batch(ChatClient* client, const LlmConfig& config,
                                               std::span<const RenderedPrompt> prompts,
                                               ReplayCache& cache,
                                               const ScreenOptions& options = {}) {
  config.validate();
  std::vector<detail::PromptResult> results(prompts.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < prompts.size(); i = next++) {
      try {
        results[i] = detail::screen_one(client, config, prompts[i], cache, options);
      } catch (const std::exception& e) {
        results[i] = {std::nullopt, e.what()};
      }
    }
  };
  const std::size_t workers = std::min(config.parallelism, prompts.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::vector<std::optional<ScreenOutcome>> partial;
  std::vector<std::string> failed;
  std::vector<std::string> reasons;
  partial.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].outcome) {
      failed.push_back(prompts[i].record_key);
      reasons.push_back(results[i].failure);
    }
    partial.push_back(std::move(results[i].outcome));
  }
  if (!failed.empty()) throw BatchError(std::move(partial), std::move(failed), std::move(reasons));
  std::vector<ScreenOutcome> outcomes;
  outcomes.reserve(partial.size());
  for (auto& o : partial) outcomes.push_back(std::move(*o));
  return outcomes;
}

inline std::vector<Decision> decisions_of(std::span<const ScreenOutcome> outcomes) {
  std::vector<Decision> d;
  d.reserve(outcomes.size());
  for (const auto& o : outcomes) d.push_back(o.decision);
  return d;
}

}  // namespace screenkit::llm
