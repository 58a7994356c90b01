// Copyright 2026 The Rationale Workbench Authors.
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

#ifndef RWB_ERROR_H_
#define RWB_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rwb {

// Base class for every error raised by the workbench. Data-level failures
// (unparseable completions, undefined statistics) are returned as values,
// not thrown.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyTextError : public Error {
 public:
  EmptyTextError() : Error("text is empty or whitespace-only") {}
};

class DegenerateStatsError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Schema violation in a line-delimited input file. `line` is 1-based.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

class MissingLabelsError : public Error {
 public:
  using Error::Error;
};

class ReferenceUnavailableError : public Error {
 public:
  using Error::Error;
};

// Transport failure that survived every retry.
class ProviderError : public Error {
 public:
  using Error::Error;
};

// Request rejected by the provider (HTTP 4xx) or a bad profile. Never retried.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class JudgeParseFailure : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

}  // namespace rwb

#endif  // RWB_ERROR_H_
