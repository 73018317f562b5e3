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
#include <string_view>
#include <vector>

#include "screenkit/error.hpp"

// RFC 4180 reading and writing. Rows are reported with the 1-based line
// number on which they start so parse errors can point at the input.
namespace screenkit::csv {

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

inline std::vector<Row> parse(std::string_view input) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  std::size_t line = 1;
  std::size_t i = 0;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool row_started = false;

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row = Row{};
    row_started = false;
  };

  while (i < input.size()) {
    const char c = input[i];
    if (!row_started) {
      row.line = line;
      row_started = true;
    }
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < input.size() && input[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        if (i < input.size() && input[i] != ',' && input[i] != '\n' && input[i] != '\r') {
          throw ParseError(row.line, "unexpected character after closing quote");
        }
        continue;
      }
      if (c == '\n') ++line;
      field.push_back(c);
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw ParseError(row.line, "quote inside unquoted field");
        }
        in_quotes = true;
        field_was_quoted = true;
        ++i;
        break;
      case ',':
        end_field();
        ++i;
        break;
      case '\r':
        if (i + 1 < input.size() && input[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        end_row();
        ++line;
        ++i;
        break;
      default:
        field.push_back(c);
        ++i;
    }
  }
  if (in_quotes) throw ParseError(row.line, "unterminated quoted field");
  if (row_started) end_row();
  return rows;
}

inline bool needs_quotes(std::string_view field) noexcept {
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void append_field(std::string& out, std::string_view field) {
  if (!needs_quotes(field)) {
    out.append(field);
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

inline void append_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    append_field(out, fields[i]);
  }
  out.push_back('\n');
}

}  // namespace screenkit::csv
