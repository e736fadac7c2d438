// Copyright 2026 The vqnoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace vqnoise {

// Argument errors are reported as std::invalid_argument. The types below cover
// the remaining failure classes callers may want to tell apart.

/// A request exceeds a hard computational bound (e.g. enumeration size).
class ResourceLimitError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Input is well-formed but degenerate for the requested quantity
/// (zero denominator, C_min == C_max, ...).
class DegenerateInputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad experiment or optimizer configuration.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A least-squares fit failed to converge from every start point.
class FitFailure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed artifact file. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

}  // namespace vqnoise
