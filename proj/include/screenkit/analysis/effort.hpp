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

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "screenkit/error.hpp"
#include "screenkit/metrics.hpp"
#include "screenkit/text.hpp"
#include "screenkit/analysis/money.hpp"

namespace screenkit::analysis {

struct EffortReport {
  std::int64_t total_papers = 0;
  double minutes_per_paper = 1.0;
  double total_screening_hours = 0.0;
  double wss = 0.0;
  std::int64_t saved_papers = 0;
  double saved_hours = 0.0;
  // WSS below zero: the classifier costs work, nothing is reported as saved.
  bool negative_wss = false;
};

// Effort from a known WSS value, e.g. one printed in a results table.
inline EffortReport effort_from_wss(std::int64_t total_papers, double wss, double minutes_per_paper = 1.0) {
  if (!(minutes_per_paper > 0.0)) throw UsageError("minutes per paper must be positive");
  if (total_papers < 0) throw UsageError("paper count must be non-negative");
  if (!std::isfinite(wss) || wss > 1.0) throw DataError("WSS must be a finite value at most 1");
  EffortReport e;
  e.total_papers = total_papers;
  e.minutes_per_paper = minutes_per_paper;
  e.total_screening_hours = static_cast<double>(total_papers) * minutes_per_paper / 60.0;
  e.wss = wss;
  if (wss < 0.0) {
    e.negative_wss = true;
  } else {
    // The epsilon absorbs representation error in products that are whole
    // numbers in exact arithmetic.
    e.saved_papers = static_cast<std::int64_t>(std::floor(wss * static_cast<double>(total_papers) + 1e-9));
  }
  e.saved_hours = static_cast<double>(e.saved_papers) * minutes_per_paper / 60.0;
  return e;
}

inline EffortReport effort_report(const ConfusionMatrix& cm, double minutes_per_paper = 1.0) {
  if (!(minutes_per_paper > 0.0)) throw UsageError("minutes per paper must be positive");
  return effort_from_wss(static_cast<std::int64_t>(cm.total()), wss_at_recall(cm), minutes_per_paper);
}

enum class CostMode {
  // Costs only the papers WSS did not save and prices the full screening
  // time as the "Hours" column, as the published token table does.
  PaperCompat,
  // Costs every paper, since the model screened all of them.
  FullCorpus,
};

inline std::string_view to_string(CostMode m) noexcept {
  return m == CostMode::PaperCompat ? "paper-compat" : "full-corpus";
}

inline CostMode cost_mode_from_string(std::string_view s) {
  const auto v = text::to_lower(text::trim(s));
  if (v == "paper-compat" || v == "paper_compat" || v == "paper") return CostMode::PaperCompat;
  if (v == "full-corpus" || v == "full_corpus" || v == "full") return CostMode::FullCorpus;
  throw UsageError("unknown cost mode '" + std::string(s) + "'");
}

struct CostReport {
  CostMode mode = CostMode::PaperCompat;
  Decimal mean_tokens_per_paper;
  std::int64_t papers_costed = 0;
  std::int64_t sum_tokens = 0;
  Money usd;
  // Screening-time column and its full-time-equivalent days (8 h each).
  // Paper-compat rounds the hours to one decimal before dividing.
  double hours = 0.0;
  Decimal fte_days;
  // The same conversion applied to the time actually saved.
  double saved_hours = 0.0;
  Decimal saved_fte_days;
};

inline constexpr std::int64_t kHoursPerFteDay = 8;

namespace detail {

inline Decimal hours_to_fte_days(double hours) {
  return Decimal::from_double(hours).divided_by(kHoursPerFteDay);
}

}  // namespace detail

inline CostReport cost_report(const EffortReport& effort, Decimal mean_tokens, Money usd_per_1k_tokens,
                              CostMode mode = CostMode::PaperCompat) {
  CostReport c;
  c.mode = mode;
  c.mean_tokens_per_paper = mean_tokens;
  c.papers_costed = mode == CostMode::PaperCompat ? effort.total_papers - effort.saved_papers : effort.total_papers;
  c.sum_tokens = mean_tokens.times(c.papers_costed).round_to_integer();
  c.usd = token_cost(c.sum_tokens, usd_per_1k_tokens);
  c.saved_hours = effort.saved_hours;
  c.saved_fte_days = detail::hours_to_fte_days(effort.saved_hours);
  if (mode == CostMode::PaperCompat) {
    const auto tenths = static_cast<std::int64_t>(std::floor(effort.total_screening_hours * 10.0 + 0.5 + 1e-9));
    c.hours = static_cast<double>(tenths) / 10.0;
    c.fte_days = Decimal::from_integer(tenths).divided_by(10 * kHoursPerFteDay);
  } else {
    c.hours = effort.total_screening_hours;
    c.fte_days = detail::hours_to_fte_days(effort.total_screening_hours);
  }
  return c;
}

inline nlohmann::ordered_json to_json(const EffortReport& e) {
  return {{"total_papers", e.total_papers},
          {"minutes_per_paper", e.minutes_per_paper},
          {"total_screening_hours", e.total_screening_hours},
          {"wss", e.wss},
          {"saved_papers", e.saved_papers},
          {"saved_hours", e.saved_hours},
          {"negative_wss", e.negative_wss}};
}

inline EffortReport effort_from_json(const nlohmann::ordered_json& j) {
  EffortReport e;
  e.total_papers = j.at("total_papers").get<std::int64_t>();
  e.minutes_per_paper = j.at("minutes_per_paper").get<double>();
  e.total_screening_hours = j.at("total_screening_hours").get<double>();
  e.wss = j.at("wss").get<double>();
  e.saved_papers = j.at("saved_papers").get<std::int64_t>();
  e.saved_hours = j.at("saved_hours").get<double>();
  e.negative_wss = j.at("negative_wss").get<bool>();
  return e;
}

// Decimal quantities are written as strings at full precision.
inline nlohmann::ordered_json to_json(const CostReport& c) {
  return {{"mode", std::string(to_string(c.mode))},
          {"mean_tokens_per_paper", c.mean_tokens_per_paper.to_string()},
          {"papers_costed", c.papers_costed},
          {"sum_tokens", c.sum_tokens},
          {"usd", c.usd.to_string()},
          {"hours", c.hours},
          {"fte_days", c.fte_days.to_string()},
          {"saved_hours", c.saved_hours},
          {"saved_fte_days", c.saved_fte_days.to_string()}};
}

inline CostReport cost_from_json(const nlohmann::ordered_json& j) {
  CostReport c;
  c.mode = cost_mode_from_string(j.at("mode").get<std::string>());
  c.mean_tokens_per_paper = Decimal::parse(j.at("mean_tokens_per_paper").get<std::string>());
  c.papers_costed = j.at("papers_costed").get<std::int64_t>();
  c.sum_tokens = j.at("sum_tokens").get<std::int64_t>();
  c.usd = Decimal::parse(j.at("usd").get<std::string>());
  c.hours = j.at("hours").get<double>();
  c.fte_days = Decimal::parse(j.at("fte_days").get<std::string>());
  c.saved_hours = j.at("saved_hours").get<double>();
  c.saved_fte_days = Decimal::parse(j.at("saved_fte_days").get<std::string>());
  return c;
}

}  // namespace screenkit::analysis
