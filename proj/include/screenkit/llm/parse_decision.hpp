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

#include <string>
#include <string_view>
#include <variant>

#include "screenkit/decision.hpp"
#include "screenkit/text.hpp"

namespace screenkit::llm {

struct ParseFailure {
  std::string raw;
  bool operator==(const ParseFailure&) const = default;
};

using ParsedDecision = std::variant<Decision, ParseFailure>;

namespace detail {

inline bool is_edge_punct(char c) noexcept {
  switch (c) {
    case '.': case ',': case '!': case '?': case ';': case ':':
    case '"': case '\'': case '`': case '*':
      return true;
    default:
      return false;
  }
}

inline std::string normalize_answer(std::string_view raw) {
  std::string_view s = text::trim(raw);
  while (!s.empty() && (is_edge_punct(s.back()) || text::is_space(s.back()))) s.remove_suffix(1);
  while (!s.empty() && (is_edge_punct(s.front()) || text::is_space(s.front()))) s.remove_prefix(1);
  return text::to_lower(s);
}

}  // namespace detail

// Exact match of the expected literals after trimming whitespace and edge
// punctuation and case-folding. "Include." parses, "I would include" and
// a truncated "Inc" do not.
inline ParsedDecision parse_decision(std::string_view raw, std::string_view include_word,
                                     std::string_view exclude_word) {
  const std::string answer = detail::normalize_answer(raw);
  if (!answer.empty()) {
    if (answer == detail::normalize_answer(include_word)) return Decision::Include;
    if (answer == detail::normalize_answer(exclude_word)) return Decision::Exclude;
  }
  return ParseFailure{std::string(raw)};
}

inline bool is_failure(const ParsedDecision& p) noexcept {
  return std::holds_alternative<ParseFailure>(p);
}

}  // namespace screenkit::llm
