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
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenkit/csv.hpp"
#include "screenkit/decision.hpp"
#include "screenkit/error.hpp"
#include "screenkit/rng.hpp"
#include "screenkit/text.hpp"

namespace screenkit {

// One screened article. The input is expected to be collapsed already: one
// row per article, with the reviewers' resolved decision as ground truth.
struct ScreeningRecord {
  std::string project;
  std::string key;
  std::string title;
  std::string abstract;
  std::optional<std::string> doi;
  // Empty while reviewers have not decided yet; such records never survive
  // filter_records().
  std::optional<Decision> decision;
  std::vector<std::string> exclusion_criteria;
  std::int64_t reviewers = 0;
  bool conflict = false;
  // Columns / keys outside the schema, carried through untouched.
  nlohmann::ordered_json extras = nlohmann::ordered_json::object();

  Decision label() const {
    if (!decision) throw DataError("record '" + key + "' has no decision");
    return *decision;
  }

  bool operator==(const ScreeningRecord&) const = default;
};

struct Corpus {
  std::vector<ScreeningRecord> records;
  std::string provenance;
  // Header order of a CSV source; empty for JSONL. Used to write CSV back
  // in the same layout.
  std::vector<std::string> csv_columns;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
};

enum class CorpusFormat { Jsonl, Csv };

inline constexpr std::array<std::string_view, 9> kCorpusColumns{
    "project", "key", "title", "abstract", "doi",
    "decision", "exclusion_criteria", "reviewers", "conflict"};
inline constexpr std::array<std::string_view, 5> kRequiredColumns{
    "project", "key", "title", "abstract", "decision"};

namespace detail {

inline bool is_schema_column(std::string_view name) {
  return std::find(kCorpusColumns.begin(), kCorpusColumns.end(), name) != kCorpusColumns.end();
}

inline std::optional<bool> parse_bool(std::string_view s) {
  const std::string v = text::to_lower(text::trim(s));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no" || v.empty()) return false;
  return std::nullopt;
}

// "pending", empty and null all mean "not decided yet".
inline std::optional<Decision> parse_decision_cell(std::string_view s, std::size_t row) {
  const std::string v = text::to_lower(text::trim(s));
  if (v.empty() || v == "pending" || v == "null") return std::nullopt;
  if (v == "1") return Decision::Include;
  if (v == "0") return Decision::Exclude;
  if (auto d = decision_from_string(v)) return d;
  throw ParseError(row, "invalid decision '" + std::string(s) + "'");
}

inline std::string json_scalar_to_string(const nlohmann::json& v, std::string_view field,
                                         std::size_t row) {
  if (v.is_null()) return {};
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw ParseError(row, "field '" + std::string(field) + "' must be a string");
}

inline ScreeningRecord record_from_json(const nlohmann::ordered_json& obj, std::size_t row) {
  if (!obj.is_object()) throw ParseError(row, "expected a JSON object");
  for (auto name : kRequiredColumns) {
    if (!obj.contains(std::string(name))) throw SchemaError(std::string(name));
  }
  ScreeningRecord r;
  for (const auto& [name, value] : obj.items()) {
    if (name == "project") {
      r.project = json_scalar_to_string(value, name, row);
    } else if (name == "key") {
      r.key = json_scalar_to_string(value, name, row);
    } else if (name == "title") {
      r.title = json_scalar_to_string(value, name, row);
    } else if (name == "abstract") {
      r.abstract = json_scalar_to_string(value, name, row);
    } else if (name == "doi") {
      if (!value.is_null()) r.doi = json_scalar_to_string(value, name, row);
    } else if (name == "decision") {
      if (value.is_null()) {
        r.decision = std::nullopt;
      } else if (value.is_string()) {
        r.decision = parse_decision_cell(value.get<std::string>(), row);
      } else if (value.is_boolean()) {
        r.decision = value.get<bool>() ? Decision::Include : Decision::Exclude;
      } else if (value.is_number_integer() &&
                 (value.get<std::int64_t>() == 0 || value.get<std::int64_t>() == 1)) {
        r.decision = value.get<std::int64_t>() == 1 ? Decision::Include : Decision::Exclude;
      } else {
        throw ParseError(row, "invalid decision " + value.dump());
      }
    } else if (name == "exclusion_criteria") {
      if (value.is_array()) {
        for (const auto& c : value) {
          if (!c.is_string()) throw ParseError(row, "exclusion_criteria must hold strings");
          r.exclusion_criteria.push_back(c.get<std::string>());
        }
      } else if (value.is_string()) {
        if (!value.get<std::string>().empty()) {
          r.exclusion_criteria.push_back(value.get<std::string>());
        }
      } else if (!value.is_null()) {
        throw ParseError(row, "exclusion_criteria must be an array");
      }
    } else if (name == "reviewers") {
      if (value.is_null()) continue;
      if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
        throw ParseError(row, "reviewers must be a non-negative integer");
      }
      r.reviewers = value.get<std::int64_t>();
    } else if (name == "conflict") {
      if (value.is_boolean()) {
        r.conflict = value.get<bool>();
      } else if (value.is_number_integer()) {
        r.conflict = value.get<std::int64_t>() != 0;
      } else if (!value.is_null()) {
        throw ParseError(row, "conflict must be a boolean");
      }
    } else {
      r.extras[name] = value;
    }
  }
  return r;
}

inline nlohmann::ordered_json record_to_json(const ScreeningRecord& r) {
  nlohmann::ordered_json obj;
  obj["project"] = r.project;
  obj["key"] = r.key;
  obj["title"] = r.title;
  obj["abstract"] = r.abstract;
  obj["doi"] = r.doi ? nlohmann::ordered_json(*r.doi) : nlohmann::ordered_json(nullptr);
  obj["decision"] = r.decision ? nlohmann::ordered_json(std::string(to_string(*r.decision)))
                               : nlohmann::ordered_json(nullptr);
  obj["exclusion_criteria"] = r.exclusion_criteria;
  obj["reviewers"] = r.reviewers;
  obj["conflict"] = r.conflict;
  for (const auto& [name, value] : r.extras.items()) obj[name] = value;
  return obj;
}

inline Corpus parse_jsonl(std::string_view input) {
  Corpus corpus;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= input.size()) {
    std::size_t end = input.find('\n', start);
    if (end == std::string_view::npos) end = input.size();
    ++line_no;
    std::string_view line = input.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!text::is_blank(line)) {
      nlohmann::ordered_json obj;
      try {
        obj = nlohmann::ordered_json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
      }
      corpus.records.push_back(record_from_json(obj, line_no));
    }
    if (end == input.size()) break;
    start = end + 1;
  }
  return corpus;
}

inline Corpus parse_csv(std::string_view input) {
  const auto rows = csv::parse(input);
  Corpus corpus;
  if (rows.empty()) return corpus;
  const auto& header = rows.front().fields;
  corpus.csv_columns = header;
  for (auto name : kRequiredColumns) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw SchemaError(std::string(name));
    }
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    // A trailing empty line parses as a single empty field.
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (row.fields.size() != header.size()) {
      throw ParseError(row.line, "expected " + std::to_string(header.size()) + " fields, found " +
                                     std::to_string(row.fields.size()));
    }
    ScreeningRecord rec;
    for (std::size_t c = 0; c < header.size(); ++c) {
      const std::string& name = header[c];
      const std::string& cell = row.fields[c];
      if (name == "project") {
        rec.project = cell;
      } else if (name == "key") {
        rec.key = cell;
      } else if (name == "title") {
        rec.title = cell;
      } else if (name == "abstract") {
        rec.abstract = cell;
      } else if (name == "doi") {
        if (!cell.empty()) rec.doi = cell;
      } else if (name == "decision") {
        rec.decision = parse_decision_cell(cell, row.line);
      } else if (name == "exclusion_criteria") {
        if (!cell.empty()) rec.exclusion_criteria = text::split(cell, ';');
      } else if (name == "reviewers") {
        if (cell.empty()) continue;
        try {
          std::size_t used = 0;
          const long long v = std::stoll(cell, &used);
          if (used != cell.size() || v < 0) throw std::invalid_argument("reviewers");
          rec.reviewers = v;
        } catch (const std::exception&) {
          throw ParseError(row.line, "reviewers must be a non-negative integer");
        }
      } else if (name == "conflict") {
        auto b = parse_bool(cell);
        if (!b) throw ParseError(row.line, "conflict must be a boolean");
        rec.conflict = *b;
      } else {
        rec.extras[name] = cell;
      }
    }
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

}  // namespace detail

// Parses a corpus from raw bytes. Records keep their text verbatim; LaTeX
// cleanup happens later, at featurization or prompt rendering.
inline Corpus parse_corpus(std::string_view source, CorpusFormat format) {
  if (!text::is_valid_utf8(source)) throw DataError("corpus source is not valid UTF-8");
  return format == CorpusFormat::Jsonl ? detail::parse_jsonl(source) : detail::parse_csv(source);
}

inline std::string serialize_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& r : corpus.records) {
    out += detail::record_to_json(r).dump();
    out.push_back('\n');
  }
  return out;
}

inline std::string serialize_csv(const Corpus& corpus) {
  std::vector<std::string> columns = corpus.csv_columns;
  if (columns.empty()) {
    columns.assign(kCorpusColumns.begin(), kCorpusColumns.end());
    std::set<std::string> seen(columns.begin(), columns.end());
    for (const auto& r : corpus.records) {
      for (const auto& [name, _] : r.extras.items()) {
        if (seen.insert(name).second) columns.push_back(name);
      }
    }
  }
  std::string out;
  csv::append_row(out, columns);
  for (const auto& r : corpus.records) {
    std::vector<std::string> fields;
    fields.reserve(columns.size());
    for (const auto& name : columns) {
      if (name == "project") {
        fields.push_back(r.project);
      } else if (name == "key") {
        fields.push_back(r.key);
      } else if (name == "title") {
        fields.push_back(r.title);
      } else if (name == "abstract") {
        fields.push_back(r.abstract);
      } else if (name == "doi") {
        fields.push_back(r.doi.value_or(""));
      } else if (name == "decision") {
        fields.emplace_back(r.decision ? to_string(*r.decision) : "");
      } else if (name == "exclusion_criteria") {
        std::string joined;
        for (std::size_t i = 0; i < r.exclusion_criteria.size(); ++i) {
          if (i > 0) joined.push_back(';');
          joined += r.exclusion_criteria[i];
        }
        fields.push_back(std::move(joined));
      } else if (name == "reviewers") {
        fields.push_back(std::to_string(r.reviewers));
      } else if (name == "conflict") {
        fields.emplace_back(r.conflict ? "true" : "false");
      } else if (r.extras.contains(name)) {
        const auto& v = r.extras[name];
        fields.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      } else {
        fields.emplace_back();
      }
    }
    csv::append_row(out, fields);
  }
  return out;
}

inline std::string serialize_corpus(const Corpus& corpus, CorpusFormat format) {
  return format == CorpusFormat::Jsonl ? serialize_jsonl(corpus) : serialize_csv(corpus);
}

inline CorpusFormat format_for_path(std::string_view path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() &&
           text::to_lower(path.substr(path.size() - suffix.size())) == suffix;
  };
  if (ends_with(".csv")) return CorpusFormat::Csv;
  return CorpusFormat::Jsonl;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Corpus load_corpus(const std::string& path) {
  Corpus c = parse_corpus(read_file(path), format_for_path(path));
  c.provenance = path;
  return c;
}

// ---------------------------------------------------------------------------
// Retention filter

struct FilterPolicy {
  bool require_title = true;
  bool require_abstract = true;
  bool require_decision = true;
  bool drop_duplicates = true;
};

struct DroppedRecord {
  std::size_t index = 0;  // position in the input corpus
  std::string project;
  std::string key;
  std::string reason;
};

struct FilterLog {
  std::vector<DroppedRecord> dropped;
  bool empty() const noexcept { return dropped.empty(); }
};

// Keeps records with a non-blank title and abstract and a decision. Among
// those, the first occurrence of each (project, key) wins.
inline std::pair<Corpus, FilterLog> filter_records(const Corpus& corpus,
                                                   const FilterPolicy& policy = {}) {
  Corpus kept;
  kept.provenance = corpus.provenance;
  kept.csv_columns = corpus.csv_columns;
  FilterLog log;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& r = corpus.records[i];
    std::string reason;
    if (policy.require_abstract && text::is_blank(r.abstract)) {
      reason = "missing abstract";
    } else if (policy.require_title && text::is_blank(r.title)) {
      reason = "missing title";
    } else if (policy.require_decision && !r.decision) {
      reason = "missing decision";
    } else if (policy.drop_duplicates && !seen.emplace(r.project, r.key).second) {
      reason = "duplicate key";
    }
    if (reason.empty()) {
      kept.records.push_back(r);
    } else {
      log.dropped.push_back({i, r.project, r.key, std::move(reason)});
    }
  }
  return {std::move(kept), std::move(log)};
}

// ---------------------------------------------------------------------------
// Profiling

struct DatasetProfile {
  std::size_t size = 0;
  std::size_t included = 0;
  std::size_t excluded = 0;
  double inclusion_ratio = 0.0;
  std::size_t conflicts = 0;
  double conflict_ratio = 0.0;
};

inline DatasetProfile profile(const Corpus& corpus) {
  if (corpus.empty()) throw DataError("cannot profile empty corpus");
  DatasetProfile p;
  p.size = corpus.size();
  for (const auto& r : corpus.records) {
    if (r.label() == Decision::Include) {
      ++p.included;
    } else {
      ++p.excluded;
    }
    if (r.conflict) ++p.conflicts;
  }
  p.inclusion_ratio = static_cast<double>(p.included) / static_cast<double>(p.size);
  p.conflict_ratio = static_cast<double>(p.conflicts) / static_cast<double>(p.size);
  return p;
}

// ---------------------------------------------------------------------------
// Sampling and splitting

// Round half up for non-negative values; the epsilon absorbs products such
// as 0.15 * 30 landing just below .5 in binary.
inline std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5 + 1e-9));
}

namespace detail {

inline Corpus subset(const Corpus& corpus, std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  Corpus out;
  out.provenance = corpus.provenance;
  out.csv_columns = corpus.csv_columns;
  out.records.reserve(indices.size());
  for (auto i : indices) out.records.push_back(corpus.records[i]);
  return out;
}

}  // namespace detail

// Draws exactly round(size * inclusion_ratio) included records and fills the
// rest with excluded ones, uniformly at random within each stratum. Output
// keeps corpus order.
inline Corpus sample_stratified(const Corpus& corpus, std::size_t size, double inclusion_ratio,
                                std::uint64_t seed) {
  if (!(inclusion_ratio >= 0.0 && inclusion_ratio <= 1.0)) {
    throw UsageError("inclusion ratio must lie in [0, 1]");
  }
  const std::size_t want_included = std::min(size, round_half_up(size * inclusion_ratio));
  const std::size_t want_excluded = size - want_included;

  std::vector<std::size_t> included;
  std::vector<std::size_t> excluded;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    (corpus.records[i].label() == Decision::Include ? included : excluded).push_back(i);
  }
  if (want_included > included.size()) {
    throw DataError("stratum 'include' short by " + std::to_string(want_included - included.size()) +
                    " records (requested " + std::to_string(want_included) + ", available " +
                    std::to_string(included.size()) + ")");
  }
  if (want_excluded > excluded.size()) {
    throw DataError("stratum 'exclude' short by " + std::to_string(want_excluded - excluded.size()) +
                    " records (requested " + std::to_string(want_excluded) + ", available " +
                    std::to_string(excluded.size()) + ")");
  }

  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(included));
  rng.shuffle(std::span<std::size_t>(excluded));
  std::vector<std::size_t> chosen(included.begin(), included.begin() + static_cast<std::ptrdiff_t>(want_included));
  chosen.insert(chosen.end(), excluded.begin(), excluded.begin() + static_cast<std::ptrdiff_t>(want_excluded));
  return detail::subset(corpus, std::move(chosen));
}

inline std::size_t train_size_for(std::size_t n, double train_fraction) {
  const std::size_t raw = round_half_up(train_fraction * static_cast<double>(n));
  return std::clamp<std::size_t>(raw, 1, n - 1);
}

// Random disjoint partition; train gets round(train_fraction * n) records,
// clamped so that both sides are non-empty.
inline std::pair<Corpus, Corpus> split_train_test(const Corpus& corpus, double train_fraction,
                                                  std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw UsageError("train fraction must lie strictly between 0 and 1");
  }
  if (corpus.size() < 2) throw DataError("corpus too small to split (need at least 2 records)");
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const std::size_t n_train = train_size_for(corpus.size(), train_fraction);
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return {detail::subset(corpus, std::move(train)), detail::subset(corpus, std::move(test))};
}

inline std::vector<Decision> labels_of(const Corpus& corpus) {
  std::vector<Decision> labels;
  labels.reserve(corpus.size());
  for (const auto& r : corpus.records) labels.push_back(r.label());
  return labels;
}

}  // namespace screenkit
