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

// Coherent-state algebra of the two-laser transmitter: a triplet of
// injection-locked slave pulses, flanked by the neighbouring triplets'
// pulses, interfered in a one-bin-delay AMZI.
//
// The common optical carrier factor exp(iωt) is dropped everywhere; only
// frame-relative phases are represented.

#include <cmath>
#include <complex>

#include "dmqkd/errors.hpp"
#include "dmqkd/phase.hpp"

namespace dmqkd {

/// Complex field amplitude of one time bin, in units of √(mean photon number).
using CoherentAmplitude = std::complex<double>;

/// The five input time bins around one encoding triplet (before the AMZI):
/// L_P, R_P, E, L, R.
struct PulseFrame {
    CoherentAmplitude a3_prev;
    CoherentAmplitude a1;
    CoherentAmplitude a2;
    CoherentAmplitude a3;
    CoherentAmplitude a1_next;
};

/// The four interfered output bins R_P, E, L, R.
struct OutputFrame {
    CoherentAmplitude rp;
    CoherentAmplitude e;
    CoherentAmplitude l;
    CoherentAmplitude r;
};

struct PolarForm {
    double r = 0.0;
    Phase phi;

    CoherentAmplitude to_amplitude() const {
        return std::polar(r, phi.value());
    }
};

inline CoherentAmplitude unit_phasor(double radians) {
    return {std::cos(radians), std::sin(radians)};
}

/// Polar decomposition. A zero amplitude has phase 0 by convention.
inline PolarForm amplitude_to_polar(CoherentAmplitude alpha) {
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
        throw DomainError("amplitude_to_polar: non-finite amplitude");
    }
    double r = std::hypot(alpha.real(), alpha.imag());
    if (r == 0.0) {
        return {0.0, Phase{}};
    }
    return {r, Phase(std::atan2(alpha.imag(), alpha.real()))};
}

/// Builds the pre-interferometer frame for one triplet with global phase
/// `phi1`, intra-triplet phase steps `phi12`/`phi23`, and the random phases
/// of the preceding (`phi_rp`) and following (`phi_rf`) triplets relative to
/// this one.
inline PulseFrame make_frame(double amplitude, Phase phi1, Phase phi12, Phase phi23, Phase phi_rp,
                             Phase phi_rf) {
    if (!std::isfinite(amplitude) || amplitude < 0.0) {
        throw DomainError("make_frame: amplitude must be finite and non-negative");
    }
    const double p1 = phi1.value();
    const double p2 = p1 + phi12.value();
    const double p3 = p2 + phi23.value();
    return {
        amplitude * unit_phasor(p1 + phi_rp.value()),
        amplitude * unit_phasor(p1),
        amplitude * unit_phasor(p2),
        amplitude * unit_phasor(p3),
        amplitude * unit_phasor(p3 + phi_rf.value()),
    };
}

/// Ideal lossless 50:50 AMZI with a one-bin delay, observed at a single
/// output port: every output bin is half the sum of its own and the
/// preceding input bin.
inline OutputFrame amzi_transform(const PulseFrame &in) {
    return {
        0.5 * (in.a3_prev + in.a1),
        0.5 * (in.a1 + in.a2),
        0.5 * (in.a2 + in.a3),
        0.5 * (in.a3 + in.a1_next),
    };
}

/// Relative phase between the early and late output bins, (φ12 + φ23)/2.
///
/// The half-sum is taken on the canonical representatives, so the result is
/// meaningful modulo π; when both bins carry light it agrees with
/// arg(l) − arg(e) exactly when cos(φ12/2) and cos(φ23/2) share a sign.
inline Phase relative_phase_el(Phase phi12, Phase phi23) {
    return Phase(0.5 * (phi12.value() + phi23.value()));
}

/// Closed-form magnitude of an interfered bin, A·|cos(Δφ/2)|.
inline double interfered_magnitude(double amplitude, Phase step) {
    return amplitude * std::fabs(std::cos(0.5 * step.value()));
}

}  // namespace dmqkd
