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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenkit/decision.hpp"
#include "screenkit/error.hpp"
#include "screenkit/metrics.hpp"

namespace screenkit::analysis {

struct RunResult {
  std::string label;
  std::uint64_t seed = 0;
  std::vector<std::string> keys;
  std::vector<Decision> truth;
  std::vector<Decision> predicted;
  ConfusionMatrix confusion;
  MetricsReport metrics;
  // Prompt plus completion tokens the run consumed; 0 for baselines.
  std::uint64_t tokens = 0;

  double mean_tokens_per_paper() const noexcept {
    return keys.empty() ? 0.0 : static_cast<double>(tokens) / static_cast<double>(keys.size());
  }
};

inline RunResult make_run(std::string label, std::uint64_t seed, std::vector<std::string> keys,
                          std::vector<Decision> truth, std::vector<Decision> predicted) {
  if (keys.size() != truth.size() || keys.size() != predicted.size()) {
    throw DataError("run '" + label + "': keys, labels and decisions differ in length");
  }
  RunResult r;
  r.label = std::move(label);
  r.seed = seed;
  r.keys = std::move(keys);
  r.truth = std::move(truth);
  r.predicted = std::move(predicted);
  r.confusion = confusion_from_pairs(r.truth, r.predicted);
  r.metrics = metrics_report(r.confusion);
  return r;
}

struct RunSeries {
  std::string name;
  std::vector<RunResult> runs;

  std::size_t size() const noexcept { return runs.size(); }

  // True when every run covers the same set of record keys.
  bool same_records() const {
    if (runs.empty()) return true;
    std::unordered_map<std::string, std::size_t> first;
    for (std::size_t i = 0; i < runs.front().keys.size(); ++i) first.emplace(runs.front().keys[i], i);
    if (first.size() != runs.front().keys.size()) return false;
    for (const auto& r : runs) {
      if (r.keys.size() != first.size()) return false;
      for (const auto& k : r.keys) {
        if (!first.contains(k)) return false;
      }
    }
    return true;
  }
};

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json metric_to_json(Metric m) {
  return m ? nlohmann::ordered_json(*m) : nlohmann::ordered_json(nullptr);
}

inline Metric metric_from_json(const nlohmann::ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

inline nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (auto id : kMetricColumns) j[std::string(metric_key(id))] = metric_to_json(get(r, id));
  return j;
}

inline MetricsReport metrics_from_json(const nlohmann::ordered_json& j) {
  MetricsReport r;
  for (auto id : kMetricColumns) {
    const std::string key(metric_key(id));
    get(r, id) = j.contains(key) ? metric_from_json(j.at(key)) : std::nullopt;
  }
  return r;
}

inline nlohmann::ordered_json to_json(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}};
}

inline ConfusionMatrix confusion_from_json(const nlohmann::ordered_json& j) {
  ConfusionMatrix cm;
  cm.tp = j.at("tp").get<std::uint64_t>();
  cm.tn = j.at("tn").get<std::uint64_t>();
  cm.fp = j.at("fp").get<std::uint64_t>();
  cm.fn = j.at("fn").get<std::uint64_t>();
  return cm;
}

inline nlohmann::ordered_json decisions_to_json(std::span<const Decision> d) {
  auto a = nlohmann::ordered_json::array();
  for (auto v : d) a.push_back(to_int(v));
  return a;
}

inline std::vector<Decision> decisions_from_json(const nlohmann::ordered_json& j) {
  std::vector<Decision> d;
  for (const auto& v : j) d.push_back(v.get<int>() != 0 ? Decision::Include : Decision::Exclude);
  return d;
}

inline nlohmann::ordered_json to_json(const RunResult& r) {
  return {{"label", r.label},
          {"seed", r.seed},
          {"keys", r.keys},
          {"truth", decisions_to_json(r.truth)},
          {"predicted", decisions_to_json(r.predicted)},
          {"confusion", to_json(r.confusion)},
          {"metrics", to_json(r.metrics)},
          {"tokens", r.tokens}};
}

inline RunResult run_from_json(const nlohmann::ordered_json& j) {
  RunResult r;
  r.label = j.at("label").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.keys = j.at("keys").get<std::vector<std::string>>();
  r.truth = decisions_from_json(j.at("truth"));
  r.predicted = decisions_from_json(j.at("predicted"));
  r.confusion = confusion_from_json(j.at("confusion"));
  r.metrics = metrics_from_json(j.at("metrics"));
  r.tokens = j.value("tokens", std::uint64_t{0});
  return r;
}

inline nlohmann::ordered_json to_json(const RunSeries& s) {
  auto runs = nlohmann::ordered_json::array();
  for (const auto& r : s.runs) runs.push_back(to_json(r));
  return {{"name", s.name}, {"runs", std::move(runs)}};
}

inline RunSeries series_from_json(const nlohmann::ordered_json& j) {
  RunSeries s;
  s.name = j.at("name").get<std::string>();
  for (const auto& r : j.at("runs")) s.runs.push_back(run_from_json(r));
  return s;
}

}  // namespace screenkit::analysis
