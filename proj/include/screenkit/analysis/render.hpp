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

#include <array>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenkit/csv.hpp"
#include "screenkit/error.hpp"
#include "screenkit/metrics.hpp"
#include "screenkit/text.hpp"
#include "screenkit/analysis/consistency.hpp"
#include "screenkit/analysis/effort.hpp"
#include "screenkit/analysis/series.hpp"

namespace screenkit::analysis {

enum class ReportFormat { Markdown, Csv, Json };

inline ReportFormat report_format_from_string(std::string_view s) {
  const auto v = text::to_lower(text::trim(s));
  if (v == "markdown" || v == "md") return ReportFormat::Markdown;
  if (v == "csv") return ReportFormat::Csv;
  if (v == "json") return ReportFormat::Json;
  throw UsageError("unknown report format '" + std::string(s) + "' (expected markdown, csv or json)");
}

template <class T>
struct Labeled {
  std::string label;
  T value;
};

// Everything a report can show. Empty parts are omitted from the output.
struct ReportArtifacts {
  std::string title;
  std::vector<DatasetRow> metrics;
  std::optional<RunSeries> series;
  std::optional<ConsistencyReport> consistency;
  std::vector<Labeled<EffortReport>> effort;
  std::vector<Labeled<CostReport>> cost;
  std::optional<AggregateTable> aggregate;
};

inline nlohmann::ordered_json to_json(const ReportArtifacts& a) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  j["title"] = a.title;
  auto metrics = nlohmann::ordered_json::array();
  for (const auto& r : a.metrics) metrics.push_back({{"label", r.dataset}, {"metrics", to_json(r.metrics)}});
  j["metrics"] = std::move(metrics);
  j["series"] = a.series ? to_json(*a.series) : nlohmann::ordered_json(nullptr);
  j["consistency"] = a.consistency ? to_json(*a.consistency) : nlohmann::ordered_json(nullptr);
  auto effort = nlohmann::ordered_json::array();
  for (const auto& e : a.effort) effort.push_back({{"label", e.label}, {"effort", to_json(e.value)}});
  j["effort"] = std::move(effort);
  auto cost = nlohmann::ordered_json::array();
  for (const auto& c : a.cost) cost.push_back({{"label", c.label}, {"cost", to_json(c.value)}});
  j["cost"] = std::move(cost);
  j["aggregate"] = a.aggregate ? to_json(*a.aggregate) : nlohmann::ordered_json(nullptr);
  return j;
}

inline ReportArtifacts artifacts_from_json(const nlohmann::ordered_json& j) {
  try {
    ReportArtifacts a;
    a.title = j.value("title", std::string());
    if (j.contains("metrics")) {
      for (const auto& r : j.at("metrics")) {
        a.metrics.push_back({r.at("label").get<std::string>(), metrics_from_json(r.at("metrics"))});
      }
    }
    if (j.contains("series") && !j.at("series").is_null()) a.series = series_from_json(j.at("series"));
    if (j.contains("consistency") && !j.at("consistency").is_null()) {
      a.consistency = consistency_from_json(j.at("consistency"));
    }
    if (j.contains("effort")) {
      for (const auto& e : j.at("effort")) {
        a.effort.push_back({e.at("label").get<std::string>(), effort_from_json(e.at("effort"))});
      }
    }
    if (j.contains("cost")) {
      for (const auto& c : j.at("cost")) {
        a.cost.push_back({c.at("label").get<std::string>(), cost_from_json(c.at("cost"))});
      }
    }
    if (j.contains("aggregate") && !j.at("aggregate").is_null()) a.aggregate = aggregate_from_json(j.at("aggregate"));
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report artifacts: ") + e.what());
  }
}

namespace detail {

inline constexpr std::string_view kUndefinedCell = "\xE2\x80\x94";

inline std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  // Avoid "-0.000".
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

inline std::string full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string md_cell(Metric m) { return m ? fixed(*m) : std::string(kUndefinedCell); }
inline std::string csv_cell(Metric m) { return m ? full(*m) : std::string(); }

inline std::string md_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

class MarkdownTable {
 public:
  MarkdownTable(std::vector<std::string> header, std::size_t left_aligned = 1)
      : header_(std::move(header)), left_(left_aligned) {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string str() const {
    std::string out = line(header_);
    out += '|';
    for (std::size_t i = 0; i < header_.size(); ++i) out += i < left_ ? " --- |" : " ---: |";
    out += '\n';
    for (const auto& r : rows_) out += line(r);
    return out;
  }

 private:
  static std::string line(const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& c : cells) out += " " + md_escape(c) + " |";
    return out + "\n";
  }

  std::vector<std::string> header_;
  std::size_t left_;
  std::vector<std::vector<std::string>> rows_;
};

inline std::vector<std::string> metric_header(std::string first) {
  std::vector<std::string> h{std::move(first)};
  for (auto id : kMetricColumns) h.emplace_back(metric_name(id));
  return h;
}

inline void append_metric_cells(std::vector<std::string>& row, const MetricsReport& r, bool csv) {
  for (auto id : kMetricColumns) row.push_back(csv ? csv_cell(get(r, id)) : md_cell(get(r, id)));
}

inline constexpr std::array<std::pair<std::string_view, Metric DispersionStats::*>, 5> kMomentRows{{
    {"Mean", &DispersionStats::mean},
    {"Std", &DispersionStats::std_dev},
    {"Median", &DispersionStats::median},
    {"IQR", &DispersionStats::iqr},
    {"Kurtosis", &DispersionStats::excess_kurtosis},
}};

inline std::string render_markdown(const ReportArtifacts& a) {
  std::string out;
  if (!a.title.empty()) out += "# " + a.title + "\n\n";
  if (!a.metrics.empty()) {
    MarkdownTable t(metric_header("Classifier"));
    for (const auto& r : a.metrics) {
      std::vector<std::string> row{r.dataset};
      append_metric_cells(row, r.metrics, false);
      t.add(std::move(row));
    }
    out += "## Metrics\n\n" + t.str() + "\n";
  }
  if (a.series) {
    auto header = metric_header("Run");
    header.insert(header.begin() + 1, {"Seed", "TP", "TN", "FP", "FN"});
    MarkdownTable t(header);
    for (const auto& r : a.series->runs) {
      std::vector<std::string> row{r.label, std::to_string(r.seed), std::to_string(r.confusion.tp),
                                   std::to_string(r.confusion.tn), std::to_string(r.confusion.fp),
                                   std::to_string(r.confusion.fn)};
      append_metric_cells(row, r.metrics, false);
      t.add(std::move(row));
    }
    out += "## Runs";
    if (!a.series->name.empty()) out += ": " + a.series->name;
    out += "\n\n" + t.str() + "\n";
  }
  if (a.consistency) {
    const auto& c = *a.consistency;
    MarkdownTable t({"Metric", "Runs", "Mean", "Std", "Median", "IQR", "Kurtosis"});
    for (const auto& d : c.dispersion) {
      std::vector<std::string> row{std::string(metric_name(d.metric)), std::to_string(d.defined_runs)};
      for (const auto& [name, field] : kMomentRows) row.push_back(md_cell(d.stats.*field));
      t.add(std::move(row));
    }
    out += "## Consistency\n\n" + t.str() + "\n";
    out += "Fleiss' kappa over " + std::to_string(c.runs) + " runs: " + fixed(c.agreement.kappa) + " (" +
           std::string(to_string(c.agreement.band)) + ")";
    if (c.agreement.degenerate) out += ", all decisions in one category";
    out += "\n\n";
    out += "Records with at least one deviating run: " + std::to_string(c.census.deviating) + " of " +
           std::to_string(c.census.records) + " (" + fixed(100.0 * c.census.fraction(), 1) + "%); " +
           std::to_string(c.census.fp_direction) + " toward false positives, " +
           std::to_string(c.census.fn_direction) + " toward false negatives\n\n";
  }
  if (!a.effort.empty()) {
    MarkdownTable t({"Classifier", "Papers", "Screening time", "WSS", "Saved papers", "Saved time"});
    for (const auto& [label, e] : a.effort) {
      t.add({label, std::to_string(e.total_papers), fixed(e.total_screening_hours, 1) + " h", fixed(e.wss),
             e.negative_wss ? std::string("N/A") : std::to_string(e.saved_papers), fixed(e.saved_hours, 1) + " h"});
    }
    out += "## Effort\n\n" + t.str() + "\n";
  }
  if (!a.cost.empty()) {
    MarkdownTable t({"Dataset", "Mode", "Mean tokens", "Papers costed", "Sum tokens", "USD", "Hours", "FTE days",
                     "Saved hours", "Saved FTE days"},
                    2);
    for (const auto& [label, c] : a.cost) {
      t.add({label, std::string(to_string(c.mode)), c.mean_tokens_per_paper.to_string(3),
             std::to_string(c.papers_costed), std::to_string(c.sum_tokens), c.usd.to_string(3), fixed(c.hours, 1),
             c.fte_days.to_string(3), fixed(c.saved_hours, 1), c.saved_fte_days.to_string(3)});
    }
    out += "## Cost\n\n" + t.str() + "\n";
  }
  if (a.aggregate) {
    MarkdownTable t(metric_header("Dataset"));
    for (const auto& r : a.aggregate->rows) {
      std::vector<std::string> row{r.dataset};
      append_metric_cells(row, r.metrics, false);
      t.add(std::move(row));
    }
    for (const auto& [name, field] : kMomentRows) {
      std::vector<std::string> row{std::string(name)};
      for (const auto& d : a.aggregate->summary) row.push_back(md_cell(d.stats.*field));
      t.add(std::move(row));
    }
    out += "## Across datasets\n\n" + t.str() + "\n";
  }
  while (out.size() >= 2 && out[out.size() - 1] == '\n' && out[out.size() - 2] == '\n') out.pop_back();
  return out;
}

inline void csv_row(std::string& out, const std::vector<std::string>& cells) { csv::append_row(out, cells); }

inline std::string render_csv(const ReportArtifacts& a) {
  std::vector<std::string> sections;
  if (!a.metrics.empty()) {
    std::string s;
    auto h = metric_header("label");
    h.insert(h.begin(), "section");
    csv_row(s, h);
    for (const auto& r : a.metrics) {
      std::vector<std::string> row{"metrics", r.dataset};
      append_metric_cells(row, r.metrics, true);
      csv_row(s, row);
    }
    sections.push_back(std::move(s));
  }
  if (a.series) {
    std::string s;
    auto h = metric_header("run");
    h.insert(h.begin(), "section");
    h.insert(h.begin() + 2, {"series", "seed", "tp", "tn", "fp", "fn"});
    csv_row(s, h);
    for (const auto& r : a.series->runs) {
      std::vector<std::string> row{"runs",
                                   r.label,
                                   a.series->name,
                                   std::to_string(r.seed),
                                   std::to_string(r.confusion.tp),
                                   std::to_string(r.confusion.tn),
                                   std::to_string(r.confusion.fp),
                                   std::to_string(r.confusion.fn)};
      append_metric_cells(row, r.metrics, true);
      csv_row(s, row);
    }
    sections.push_back(std::move(s));
  }
  if (a.consistency) {
    const auto& c = *a.consistency;
    std::string s;
    csv_row(s, {"section", "metric", "defined_runs", "mean", "std_dev", "median", "iqr", "excess_kurtosis"});
    for (const auto& d : c.dispersion) {
      std::vector<std::string> row{"consistency", std::string(metric_key(d.metric)), std::to_string(d.defined_runs)};
      for (const auto& [name, field] : kMomentRows) row.push_back(csv_cell(d.stats.*field));
      csv_row(s, row);
    }
    sections.push_back(std::move(s));
    std::string k;
    csv_row(k, {"section", "runs", "kappa", "p_o", "p_e", "band", "degenerate", "records", "deviating",
                "fp_direction", "fn_direction"});
    csv_row(k, {"agreement", std::to_string(c.runs), full(c.agreement.kappa), full(c.agreement.p_o),
                full(c.agreement.p_e), std::string(to_string(c.agreement.band)),
                c.agreement.degenerate ? "true" : "false", std::to_string(c.census.records),
                std::to_string(c.census.deviating), std::to_string(c.census.fp_direction),
                std::to_string(c.census.fn_direction)});
    sections.push_back(std::move(k));
  }
  if (!a.effort.empty()) {
    std::string s;
    csv_row(s, {"section", "label", "total_papers", "minutes_per_paper", "total_screening_hours", "wss",
                "saved_papers", "saved_hours", "negative_wss"});
    for (const auto& [label, e] : a.effort) {
      csv_row(s, {"effort", label, std::to_string(e.total_papers), full(e.minutes_per_paper),
                  full(e.total_screening_hours), full(e.wss), std::to_string(e.saved_papers), full(e.saved_hours),
                  e.negative_wss ? "true" : "false"});
    }
    sections.push_back(std::move(s));
  }
  if (!a.cost.empty()) {
    std::string s;
    csv_row(s, {"section", "label", "mode", "mean_tokens_per_paper", "papers_costed", "sum_tokens", "usd", "hours",
                "fte_days", "saved_hours", "saved_fte_days"});
    for (const auto& [label, c] : a.cost) {
      csv_row(s, {"cost", label, std::string(to_string(c.mode)), c.mean_tokens_per_paper.to_string(),
                  std::to_string(c.papers_costed), std::to_string(c.sum_tokens), c.usd.to_string(), full(c.hours),
                  c.fte_days.to_string(), full(c.saved_hours), c.saved_fte_days.to_string()});
    }
    sections.push_back(std::move(s));
  }
  if (a.aggregate) {
    std::string s;
    auto h = metric_header("label");
    h.insert(h.begin(), "section");
    csv_row(s, h);
    for (const auto& r : a.aggregate->rows) {
      std::vector<std::string> row{"aggregate", r.dataset};
      append_metric_cells(row, r.metrics, true);
      csv_row(s, row);
    }
    for (const auto& [name, field] : kMomentRows) {
      std::vector<std::string> row{"aggregate_summary", text::to_lower(name)};
      for (const auto& d : a.aggregate->summary) row.push_back(csv_cell(d.stats.*field));
      csv_row(s, row);
    }
    sections.push_back(std::move(s));
  }
  std::string out;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    if (i > 0) out += '\n';
    out += sections[i];
  }
  return out;
}

}  // namespace detail

inline std::string render_report(const ReportArtifacts& artifacts, ReportFormat format) {
  switch (format) {
    case ReportFormat::Markdown: return detail::render_markdown(artifacts);
    case ReportFormat::Csv: return detail::render_csv(artifacts);
    case ReportFormat::Json: return to_json(artifacts).dump(2) + "\n";
  }
  throw UsageError("unknown report format");
}

inline std::string render_report(const ReportArtifacts& artifacts, std::string_view format) {
  return render_report(artifacts, report_format_from_string(format));
}

}  // namespace screenkit::analysis
