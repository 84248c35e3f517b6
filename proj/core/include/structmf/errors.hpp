// Copyright 2026 The structmf Authors
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

#ifndef STRUCTMF_ERRORS_HPP_
#define STRUCTMF_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace structmf {

/// Base error. `code()` is a short stable identifier suitable for scripts:
/// E_SYNTAX, E_INVARIANT, E_WIDTH, E_STATE_CAP.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Malformed input document (bad syntax, missing field, wrong type).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("E_SYNTAX", what) {}
};

/// Structurally well-formed input that violates a model invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error("E_INVARIANT", what) {}
};

/// Requested computation exceeds the configured treewidth budget.
class TractabilityError : public Error {
 public:
  TractabilityError(const std::string& what, int width, int limit)
      : Error("E_WIDTH", what + " (induced width " + std::to_string(width) +
                             " exceeds limit " + std::to_string(limit) + ")"),
        width_(width),
        limit_(limit) {}
  int width() const { return width_; }
  int limit() const { return limit_; }

 private:
  int width_;
  int limit_;
};

/// Exhaustive enumeration asked for more joint states than the cap allows.
class StateCapError : public Error {
 public:
  explicit StateCapError(const std::string& what) : Error("E_STATE_CAP", what) {}
};

}  // namespace structmf

#endif  // STRUCTMF_ERRORS_HPP_
