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
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "dmqkd/errors.hpp"
#include "dmqkd/phase.hpp"

namespace dmqkd {

enum class Basis : std::uint8_t { Z, Y };
enum class IntensityClass : std::uint8_t { signal, decoy, vacuum };

inline constexpr std::string_view to_string(Basis b) {
    return b == Basis::Z ? "Z" : "Y";
}

inline constexpr std::string_view to_string(IntensityClass c) {
    switch (c) {
    case IntensityClass::signal:
        return "signal";
    case IntensityClass::decoy:
        return "decoy";
    case IntensityClass::vacuum:
        return "vacuum";
    }
    return "?";
}

/// One logical transmitter symbol. Decoy and vacuum classes exist only in
/// the Z basis.
struct EncodingSymbol {
    Basis basis = Basis::Z;
    int bit = 0;
    IntensityClass intensity = IntensityClass::signal;

    bool valid() const noexcept {
        return (bit == 0 || bit == 1) && (basis == Basis::Z || intensity == IntensityClass::signal);
    }
    friend bool operator==(const EncodingSymbol &, const EncodingSymbol &) = default;
};

/// Phase steps applied between the three slave pulses of a triplet.
struct PhasePair {
    Phase phi12;
    Phase phi23;
    friend bool operator==(const PhasePair &, const PhasePair &) = default;
};

/// Mean-photon-number fraction (relative to the signal level) for each
/// intensity class. Signal, when present, must be exactly 1.
using DecoyTable = std::map<IntensityClass, double>;

/// Linear drive-voltage to phase map through the origin.
struct CalibrationCurve {
    double v_pi = 0.8;

    void validate() const {
        if (!std::isfinite(v_pi) || v_pi <= 0.0) {
            throw ConfigError("calibration: v_pi must be positive");
        }
    }
};

struct ChirpParams {
    double delta_nu = 0.0;  // Hz
    double delta_t = 0.0;   // s
};

/// Phase that gives the interfered bin a mean-photon-number fraction
/// `fraction` of the full-constructive level: 2·arccos(√f).
inline Phase intensity_to_phase(double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw DomainError("intensity_to_phase: fraction must lie in (0, 1]");
    }
    return Phase(2.0 * std::acos(std::sqrt(fraction)));
}

/// Phase accumulated across a drive perturbation of width Δt that shifts the
/// optical frequency by Δν.
inline Phase chirp_phase(const ChirpParams &p) {
    if (!(p.delta_t > 0.0) || !std::isfinite(p.delta_nu)) {
        throw DomainError("chirp_phase: delta_t must be positive");
    }
    return Phase(kTwoPi * p.delta_nu * p.delta_t);
}

inline double voltage_for_phase(Phase phi, const CalibrationCurve &cal) {
    cal.validate();
    return phi.value() / kPi * cal.v_pi;
}

inline Phase phase_for_voltage(double volts, const CalibrationCurve &cal) {
    cal.validate();
    return Phase(volts / cal.v_pi * kPi);
}

/// Amplitude of one interfered output pulse when the perturbation preceding
/// it is driven at `volts`.
inline double predicted_pulse_amplitude(double volts, const CalibrationCurve &cal, double amplitude) {
    if (!(volts >= 0.0)) {
        throw DomainError("predicted_pulse_amplitude: voltage must be non-negative");
    }
    cal.validate();
    return amplitude * std::fabs(std::cos(kPi * volts / (2.0 * cal.v_pi)));
}

inline double decoy_fraction(const DecoyTable &table, IntensityClass c) {
    if (c == IntensityClass::signal) {
        auto it = table.find(c);
        if (it != table.end() && it->second != 1.0) {
            throw ConfigError("decoy table: signal fraction must be 1");
        }
        return 1.0;
    }
    auto it = table.find(c);
    if (it == table.end()) {
        throw ConfigError("decoy table has no entry for class '" + std::string(to_string(c)) + "'");
    }
    if (!(it->second > 0.0 && it->second <= 1.0)) {
        throw ConfigError("decoy table: fraction for '" + std::string(to_string(c)) + "' must lie in (0, 1]");
    }
    return it->second;
}

/// Maps a logical symbol to its (φ12, φ23) setting.
///
///   Z0 -> (0, π)      Z1 -> (π, 0)
///   Y0 -> (π/2, π/2)  Y1 -> (3π/2, 3π/2)
///
/// Dimmed Z states keep the lit bin in place and replace its 0 with
/// intensity_to_phase(f); the suppressed bin stays at π.
inline PhasePair encode_symbol(const EncodingSymbol &sym, const DecoyTable &table) {
    if (sym.bit != 0 && sym.bit != 1) {
        throw InvalidSymbolError("bit must be 0 or 1");
    }
    if (sym.basis == Basis::Y) {
        if (sym.intensity != IntensityClass::signal) {
            throw InvalidSymbolError("Y basis supports the signal class only");
        }
        decoy_fraction(table, IntensityClass::signal);
        const double phi = sym.bit == 0 ? 0.5 * kPi : 1.5 * kPi;
        return {Phase(phi), Phase(phi)};
    }
    const double f = decoy_fraction(table, sym.intensity);
    const Phase lit = intensity_to_phase(f);
    const Phase dark(kPi);
    return sym.bit == 0 ? PhasePair{lit, dark} : PhasePair{dark, lit};
}

/// Parses one stream token `<basis><bit><class>`, e.g. "Z0s", "Y1s", "Z1d".
inline std::optional<EncodingSymbol> parse_symbol_token(std::string_view tok) {
    if (tok.size() != 3) {
        return std::nullopt;
    }
    EncodingSymbol s;
    switch (tok[0]) {
    case 'Z':
        s.basis = Basis::Z;
        break;
    case 'Y':
        s.basis = Basis::Y;
        break;
    default:
        return std::nullopt;
    }
    if (tok[1] != '0' && tok[1] != '1') {
        return std::nullopt;
    }
    s.bit = tok[1] - '0';
    switch (tok[2]) {
    case 's':
        s.intensity = IntensityClass::signal;
        break;
    case 'd':
        s.intensity = IntensityClass::decoy;
        break;
    case 'v':
        s.intensity = IntensityClass::vacuum;
        break;
    default:
        return std::nullopt;
    }
    return s;
}

inline std::string symbol_token(const EncodingSymbol &s) {
    std::string t;
    t += s.basis == Basis::Z ? 'Z' : 'Y';
    t += static_cast<char>('0' + s.bit);
    t += s.intensity == IntensityClass::signal ? 's' : s.intensity == IntensityClass::decoy ? 'd' : 'v';
    return t;
}

}  // namespace dmqkd
