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

#include <cmath>
#include <numbers>

#include "dmqkd/errors.hpp"

namespace dmqkd {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// An optical phase in radians, kept in the canonical range [0, 2π).
///
/// Reduction is applied on construction, so two phases that differ by a
/// multiple of 2π compare equal.
class Phase {
  public:
    constexpr Phase() = default;
    explicit Phase(double radians) : value_(reduce(radians)) {
    }

    double value() const noexcept {
        return value_;
    }
    double turns() const noexcept {
        return value_ / kTwoPi;
    }

    friend bool operator==(Phase a, Phase b) noexcept {
        return a.value_ == b.value_;
    }
    friend Phase operator+(Phase a, Phase b) {
        return Phase(a.value_ + b.value_);
    }
    friend Phase operator-(Phase a, Phase b) {
        return Phase(a.value_ - b.value_);
    }
    Phase operator-() const {
        return Phase(-value_);
    }

    static double reduce(double radians) {
        if (!std::isfinite(radians)) {
            throw DomainError("phase must be finite");
        }
        double r = std::fmod(radians, kTwoPi);
        if (r < 0.0) {
            r += kTwoPi;
        }
        // fmod of a value just below zero can round back up to 2π.
        if (r >= kTwoPi) {
            r = 0.0;
        }
        return r;
    }

  private:
    double value_ = 0.0;
};

/// Shortest angular distance between two phases, in [0, π].
inline double circular_distance(Phase a, Phase b) {
    double d = std::fabs(a.value() - b.value());
    return d > kPi ? kTwoPi - d : d;
}

inline bool approx_equal(Phase a, Phase b, double tol) {
    return circular_distance(a, b) <= tol;
}

}  // namespace dmqkd
