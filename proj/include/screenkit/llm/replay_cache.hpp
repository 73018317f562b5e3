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
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenkit/corpus.hpp"
#include "screenkit/error.hpp"
#include "screenkit/llm/client.hpp"
#include "screenkit/llm/sha256.hpp"

namespace screenkit::llm {

// SHA-256 over (model, temperature, max_tokens, prompt). Fixtures are thus
// found by content, independent of file order.
inline std::string cache_key(const ChatRequest& request) {
  const nlohmann::json material = {request.model, request.temperature, request.max_tokens,
                                   request.prompt};
  return sha256_hex(material.dump());
}

struct CachedExchange {
  std::string key_hash;
  std::size_t run = 0;
  std::size_t attempt = 0;
  nlohmann::ordered_json request;
  std::string response;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  std::chrono::milliseconds latency{0};

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["key_hash"] = key_hash;
    j["run"] = run;
    j["attempt"] = attempt;
    j["request"] = request;
    j["response"] = response;
    j["usage"] = {{"prompt_tokens", prompt_tokens}, {"completion_tokens", completion_tokens}};
    j["latency_ms"] = latency.count();
    return j;
  }

  static CachedExchange from_json(const nlohmann::json& j) {
    CachedExchange e;
    e.key_hash = j.at("key_hash").get<std::string>();
    e.run = j.value("run", std::size_t{0});
    e.attempt = j.value("attempt", std::size_t{0});
    if (j.contains("request")) e.request = j["request"];
    e.response = j.at("response").get<std::string>();
    if (j.contains("usage")) {
      e.prompt_tokens = j["usage"].value("prompt_tokens", std::size_t{0});
      e.completion_tokens = j["usage"].value("completion_tokens", std::size_t{0});
    }
    e.latency = std::chrono::milliseconds(j.value("latency_ms", std::int64_t{0}));
    return e;
  }
};

// Append-only JSONL store of request/response pairs.
//
// Record mode appends every exchange (to memory and, when a path is set, to
// disk). Replay mode serves lookups only and never touches the network;
// after load it is read-only, so concurrent lookups need no lock.
class ReplayCache {
 public:
  enum class Mode { Off, Record, Replay };

  ReplayCache() = default;
  explicit ReplayCache(Mode mode) : mode_(mode) {}

  static ReplayCache replay_file(const std::string& path) {
    ReplayCache cache(Mode::Replay);
    cache.load(read_file(path));
    return cache;
  }

  // Keeps existing entries of the file and appends new ones.
  static ReplayCache record_file(const std::string& path) {
    ReplayCache cache(Mode::Record);
    std::ifstream probe(path);
    if (probe) cache.load(read_file(path));
    cache.path_ = path;
    return cache;
  }

  static ReplayCache replay_text(std::string_view jsonl) {
    ReplayCache cache(Mode::Replay);
    cache.load(jsonl);
    return cache;
  }

  Mode mode() const noexcept { return mode_; }
  const std::vector<CachedExchange>& entries() const noexcept { return entries_; }

  // Exact (run, attempt) match first; otherwise the latest attempt recorded
  // for that run, then the same rules for the lowest recorded run.
  std::optional<CachedExchange> lookup(const std::string& key_hash, std::size_t run,
                                       std::size_t attempt) const {
    const auto it = index_.find(key_hash);
    if (it == index_.end()) return std::nullopt;
    const auto& ids = it->second;
    auto best_for_run = [&](std::size_t r) -> std::optional<std::size_t> {
      std::optional<std::size_t> best;
      for (auto id : ids) {
        const auto& e = entries_[id];
        if (e.run != r) continue;
        if (e.attempt == attempt) return id;
        if (e.attempt < attempt && (!best || entries_[*best].attempt < e.attempt)) best = id;
      }
      return best;
    };
    if (auto id = best_for_run(run)) return entries_[*id];
    std::size_t lowest = entries_[ids.front()].run;
    for (auto id : ids) lowest = std::min(lowest, entries_[id].run);
    if (auto id = best_for_run(lowest)) return entries_[*id];
    return entries_[ids.front()];
  }

  void append(CachedExchange entry) {
    std::lock_guard lock(*write_mutex_);
    if (!path_.empty()) {
      std::ofstream out(path_, std::ios::app | std::ios::binary);
      if (!out) throw DataError("cannot append to cache '" + path_ + "'");
      out << entry.to_json().dump() << '\n';
    }
    index_[entry.key_hash].push_back(entries_.size());
    entries_.push_back(std::move(entry));
  }

  std::string to_jsonl() const {
    std::string out;
    for (const auto& e : entries_) out += e.to_json().dump() + "\n";
    return out;
  }

 private:
  void load(std::string_view jsonl) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < jsonl.size()) {
      std::size_t end = jsonl.find('\n', start);
      if (end == std::string_view::npos) end = jsonl.size();
      ++line_no;
      const auto line = text::trim(jsonl.substr(start, end - start));
      start = end + 1;
      if (line.empty()) continue;
      try {
        auto entry = CachedExchange::from_json(nlohmann::json::parse(line));
        index_[entry.key_hash].push_back(entries_.size());
        entries_.push_back(std::move(entry));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(line_no, std::string("bad cache entry: ") + e.what());
      }
    }
  }

  Mode mode_ = Mode::Off;
  std::string path_;
  std::vector<CachedExchange> entries_;
  std::unordered_map<std::string, std::vector<std::size_t>> index_;
  std::unique_ptr<std::mutex> write_mutex_ = std::make_unique<std::mutex>();
};

}  // namespace screenkit::llm
