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
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenkit/error.hpp"
#include "screenkit/metrics.hpp"
#include "screenkit/analysis/series.hpp"

namespace screenkit::analysis {

struct MetricDispersion {
  MetricId metric = MetricId::Recall;
  // Runs on which the metric was defined.
  std::size_t defined_runs = 0;
  DispersionStats stats;
};

// Records on which the runs did not all agree.
struct DisagreementCensus {
  std::size_t records = 0;
  std::size_t deviating = 0;
  // Deviations on truly excluded records produce false positives in some
  // runs; on truly included records, false negatives.
  std::size_t fp_direction = 0;
  std::size_t fn_direction = 0;

  double fraction() const noexcept {
    return records == 0 ? 0.0 : static_cast<double>(deviating) / static_cast<double>(records);
  }
};

struct ConsistencyReport {
  std::size_t runs = 0;
  std::vector<MetricDispersion> dispersion;
  AgreementResult agreement;
  DisagreementCensus census;
};

// Per-metric dispersion across runs. Works for any series, including
// baseline runs evaluated on different test splits.
inline std::vector<MetricDispersion> metric_dispersion(const RunSeries& series) {
  std::vector<MetricDispersion> out;
  for (auto id : kMetricColumns) {
    std::vector<double> values;
    for (const auto& r : series.runs) {
      if (auto v = get(r.metrics, id)) values.push_back(*v);
    }
    out.push_back({id, values.size(), dispersion_stats(values)});
  }
  return out;
}

// Dispersion, Fleiss' kappa with each run as a rater, and the census of
// records where at least one run deviates from the others.
inline ConsistencyReport consistency_report(const RunSeries& series) {
  if (series.size() < 2) {
    throw DataError("consistency analysis needs at least 2 runs, got " + std::to_string(series.size()));
  }
  if (!series.same_records()) throw DataError("runs cover different record sets");
  const auto& base = series.runs.front();
  const std::size_t n = base.keys.size();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(base.keys[i], i);

  std::vector<std::vector<Decision>> votes(n);
  for (const auto& r : series.runs) {
    for (std::size_t i = 0; i < r.keys.size(); ++i) {
      const std::size_t at = index.at(r.keys[i]);
      if (r.truth[i] != base.truth[at]) {
        throw DataError("runs disagree on the ground truth of record '" + r.keys[i] + "'");
      }
      votes[at].push_back(r.predicted[i]);
    }
  }

  ConsistencyReport rep;
  rep.runs = series.size();
  rep.dispersion = metric_dispersion(series);
  rep.agreement = fleiss_kappa(votes);
  rep.census.records = n;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t inc = 0;
    for (auto d : votes[i]) inc += d == Decision::Include ? 1 : 0;
    if (inc == 0 || inc == votes[i].size()) continue;
    ++rep.census.deviating;
    if (base.truth[i] == Decision::Exclude) {
      ++rep.census.fp_direction;
    } else {
      ++rep.census.fn_direction;
    }
  }
  return rep;
}

inline nlohmann::ordered_json to_json(const DispersionStats& s) {
  return {{"mean", metric_to_json(s.mean)},
          {"median", metric_to_json(s.median)},
          {"std_dev", metric_to_json(s.std_dev)},
          {"iqr", metric_to_json(s.iqr)},
          {"excess_kurtosis", metric_to_json(s.excess_kurtosis)}};
}

inline DispersionStats dispersion_from_json(const nlohmann::ordered_json& j) {
  DispersionStats s;
  s.mean = metric_from_json(j.at("mean"));
  s.median = metric_from_json(j.at("median"));
  s.std_dev = metric_from_json(j.at("std_dev"));
  s.iqr = metric_from_json(j.at("iqr"));
  s.excess_kurtosis = metric_from_json(j.at("excess_kurtosis"));
  return s;
}

inline MetricId metric_id_from_key(const std::string& key) {
  for (auto id : kMetricColumns) {
    if (metric_key(id) == key) return id;
  }
  throw DataError("unknown metric '" + key + "'");
}

inline nlohmann::ordered_json to_json(const std::vector<MetricDispersion>& d) {
  auto a = nlohmann::ordered_json::array();
  for (const auto& m : d) {
    a.push_back({{"metric", std::string(metric_key(m.metric))},
                 {"defined_runs", m.defined_runs},
                 {"stats", to_json(m.stats)}});
  }
  return a;
}

inline std::vector<MetricDispersion> metric_dispersion_from_json(const nlohmann::ordered_json& j) {
  std::vector<MetricDispersion> d;
  for (const auto& m : j) {
    d.push_back({metric_id_from_key(m.at("metric").get<std::string>()), m.at("defined_runs").get<std::size_t>(),
                 dispersion_from_json(m.at("stats"))});
  }
  return d;
}

inline nlohmann::ordered_json to_json(const AgreementResult& a) {
  return {{"kappa", a.kappa},
          {"p_o", a.p_o},
          {"p_e", a.p_e},
          {"band", std::string(to_string(a.band))},
          {"degenerate", a.degenerate}};
}

inline AgreementResult agreement_from_json(const nlohmann::ordered_json& j) {
  AgreementResult a;
  a.kappa = j.at("kappa").get<double>();
  a.p_o = j.at("p_o").get<double>();
  a.p_e = j.at("p_e").get<double>();
  a.band = agreement_band(a.kappa);
  a.degenerate = j.at("degenerate").get<bool>();
  return a;
}

inline nlohmann::ordered_json to_json(const ConsistencyReport& c) {
  return {{"runs", c.runs},
          {"dispersion", to_json(c.dispersion)},
          {"agreement", to_json(c.agreement)},
          {"census",
           {{"records", c.census.records},
            {"deviating", c.census.deviating},
            {"fp_direction", c.census.fp_direction},
            {"fn_direction", c.census.fn_direction},
            {"fraction", c.census.fraction()}}}};
}

inline ConsistencyReport consistency_from_json(const nlohmann::ordered_json& j) {
  ConsistencyReport c;
  c.runs = j.at("runs").get<std::size_t>();
  c.dispersion = metric_dispersion_from_json(j.at("dispersion"));
  c.agreement = agreement_from_json(j.at("agreement"));
  const auto& k = j.at("census");
  c.census.records = k.at("records").get<std::size_t>();
  c.census.deviating = k.at("deviating").get<std::size_t>();
  c.census.fp_direction = k.at("fp_direction").get<std::size_t>();
  c.census.fn_direction = k.at("fn_direction").get<std::size_t>();
  return c;
}

// ---------------------------------------------------------------------------
// Cross-dataset aggregation

struct DatasetRow {
  std::string dataset;
  MetricsReport metrics;
};

struct AggregateTable {
  std::vector<DatasetRow> rows;
  // One entry per metric column, in table order.
  std::vector<MetricDispersion> summary;
};

inline AggregateTable aggregate_generalizability(std::vector<DatasetRow> rows) {
  if (rows.size() < 2) {
    throw DataError("cross-dataset aggregation needs at least 2 datasets, got " + std::to_string(rows.size()));
  }
  AggregateTable t;
  t.rows = std::move(rows);
  for (auto id : kMetricColumns) {
    std::vector<double> values;
    for (const auto& r : t.rows) {
      if (auto v = get(r.metrics, id)) values.push_back(*v);
    }
    t.summary.push_back({id, values.size(), dispersion_stats(values)});
  }
  return t;
}

inline nlohmann::ordered_json to_json(const AggregateTable& t) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) rows.push_back({{"dataset", r.dataset}, {"metrics", to_json(r.metrics)}});
  return {{"rows", std::move(rows)}, {"summary", to_json(t.summary)}};
}

inline AggregateTable aggregate_from_json(const nlohmann::ordered_json& j) {
  AggregateTable t;
  for (const auto& r : j.at("rows")) {
    t.rows.push_back({r.at("dataset").get<std::string>(), metrics_from_json(r.at("metrics"))});
  }
  t.summary = metric_dispersion_from_json(j.at("summary"));
  return t;
}

}  // namespace screenkit::analysis
