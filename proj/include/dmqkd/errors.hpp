// Copyright 2026 The dmqkd Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dmqkd {

/// Argument outside the mathematical domain of an operation (non-finite
/// amplitude, intensity fraction outside (0, 1], probability outside [0, 1]).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Inconsistent or invalid configuration: timing invariants, decoy ordering,
/// probability vectors, missing decoy table entries.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Y-basis symbol requested with a non-signal intensity class.
struct InvalidSymbolError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Two decoy intensities coincide, so the yield bounds are undefined.
struct DegenerateDecoyError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The single-photon yield bound is zero; callers treat the key rate as 0.
struct UndefinedBoundError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A linearized model is used outside its range of validity.
struct ModelValidityError : std::range_error {
    using std::range_error::range_error;
};

struct SampleSizeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed textual input. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string &what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {
    }
    std::size_t line() const noexcept {
        return line_;
    }

  private:
    std::size_t line_;
};

}  // namespace dmqkd
