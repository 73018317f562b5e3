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
#include <stdexcept>
#include <string>

namespace screenkit {

// Base of every error the library throws. The CLI maps the subclasses onto
// exit codes: UsageError -> 1, DataError -> 2, EndpointError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

// Anything wrong with the input data: malformed files, impossible requests
// against a corpus, degenerate training sets.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t row, const std::string& what)
      : DataError("row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class SchemaError : public DataError {
 public:
  explicit SchemaError(std::string field)
      : DataError("missing required field '" + field + "'"), field_(std::move(field)) {}
  SchemaError(std::string field, const std::string& detail)
      : DataError(detail), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class EndpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace screenkit
