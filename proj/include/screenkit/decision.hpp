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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "screenkit/text.hpp"

namespace screenkit {

// Binary screening decision. The numeric values are the ones used in the
// confusion evaluator: 1 = include, 0 = exclude.
enum class Decision : std::uint8_t { Exclude = 0, Include = 1 };

constexpr int to_int(Decision d) noexcept { return static_cast<int>(d); }

constexpr Decision flip(Decision d) noexcept {
  return d == Decision::Include ? Decision::Exclude : Decision::Include;
}

inline std::string_view to_string(Decision d) noexcept {
  return d == Decision::Include ? "include" : "exclude";
}

// Case-insensitive "include" / "exclude"; anything else is nullopt.
inline std::optional<Decision> decision_from_string(std::string_view s) {
  const std::string folded = text::to_lower(text::trim(s));
  if (folded == "include") return Decision::Include;
  if (folded == "exclude") return Decision::Exclude;
  return std::nullopt;
}

}  // namespace screenkit
