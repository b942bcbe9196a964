// Copyright 2026 The eggkit Authors. All Rights Reserved.
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

#ifndef EGG_ERROR_HPP_
#define EGG_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace egg {

// Broad failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kUsage,      // bad arguments or configuration
  kFormat,     // malformed input data
  kBackend,    // inference backend failure
  kLogic,      // precondition violated by the caller
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class MalformedPredicate : public Error {
 public:
  explicit MalformedPredicate(const std::string& what)
      : Error(ErrorKind::kFormat, "malformed predicate: " + what) {}
};

class UnsupportedShape : public Error {
 public:
  explicit UnsupportedShape(const std::string& what)
      : Error(ErrorKind::kLogic, "unsupported predicate shape: " + what) {}
};

// Raised by file readers. line() is 1-based, 0 when not line oriented.
class FormatError : public Error {
 public:
  FormatError(const std::string& source, std::size_t line,
              const std::string& what)
      : Error(ErrorKind::kFormat,
              source + (line ? ":" + std::to_string(line) : std::string()) +
                  ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class BackendUnreachable : public Error {
 public:
  explicit BackendUnreachable(const std::string& what)
      : Error(ErrorKind::kBackend, "backend unreachable: " + what) {}
};

class SchemaViolation : public Error {
 public:
  explicit SchemaViolation(const std::string& what)
      : Error(ErrorKind::kBackend, "schema violation: " + what) {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error(ErrorKind::kLogic, "dimension mismatch: expected " +
                                     std::to_string(expected) + ", got " +
                                     std::to_string(got)) {}
};

class DegenerateData : public Error {
 public:
  explicit DegenerateData(const std::string& what)
      : Error(ErrorKind::kLogic, "degenerate data: " + what) {}
};

class DegenerateLabels : public DegenerateData {
 public:
  explicit DegenerateLabels(const std::string& what) : DegenerateData(what) {}
};

class EndpointMissing : public Error {
 public:
  explicit EndpointMissing(const std::string& what)
      : Error(ErrorKind::kLogic, "edge endpoint not in predicate set: " + what) {}
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error(ErrorKind::kUsage, "config key '" + key + "': " + what),
        key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace egg

#endif  // EGG_ERROR_HPP_
