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

// Executable checks of the leakage arguments for the randomized R / R_P
// bins flanking each encoded early/late pair.
//
// The leakage phases are half-sums of phases defined modulo 2π, so they are
// themselves only defined modulo π (axial data). Uniformity and information
// estimates are taken on the doubled angle, which is the well-defined
// quantity; the Rayleigh test on doubled angles is the standard axial test.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dmqkd/encoding.hpp"
#include "dmqkd/errors.hpp"
#include "dmqkd/linksim.hpp"
#include "dmqkd/phase.hpp"
#include "dmqkd/photonics.hpp"

namespace dmqkd {

struct LeakagePhases {
    Phase phi_lr;
    Phase phi_erp;
};

/// The four BB84 signal encodings in the order Z0, Z1, Y0, Y1.
inline std::array<PhasePair, 4> bb84_phase_pairs() {
    const DecoyTable none;
    return {encode_symbol({Basis::Z, 0, IntensityClass::signal}, none),
            encode_symbol({Basis::Z, 1, IntensityClass::signal}, none),
            encode_symbol({Basis::Y, 0, IntensityClass::signal}, none),
            encode_symbol({Basis::Y, 1, IntensityClass::signal}, none)};
}

/// Field in the R bin: (A/2)·exp(i(φ1 + φ12 + φ23))·(1 + exp(iφ_R^F)).
inline CoherentAmplitude r_bin_amplitude(const PhasePair &pp, Phase phi1, Phase phi_rf, double amplitude) {
    const double carrier = phi1.value() + pp.phi12.value() + pp.phi23.value();
    return 0.5 * amplitude * unit_phasor(carrier) * (1.0 + unit_phasor(phi_rf.value()));
}

inline LeakagePhases leakage_phases(const PhasePair &pp, Phase phi_rp, Phase phi_rf) {
    return {Phase(0.5 * (phi_rf.value() + pp.phi23.value())), Phase(0.5 * (phi_rp.value() - pp.phi12.value()))};
}

struct RayleighResult {
    std::size_t n = 0;
    double mean_resultant = 0;  // R̄
    double z = 0;               // n·R̄²
    double p_value = 1;
};

inline constexpr std::size_t kMinRayleighSamples = 100;

/// Rayleigh test of circular uniformity with the first-order small-sample
/// correction p ≈ exp(-z)·(1 + (2z - z²)/(4n)).
inline RayleighResult circular_uniformity_stat(std::span<const double> angles) {
    if (angles.size() < kMinRayleighSamples) {
        throw SampleSizeError("circular_uniformity_stat: need at least 100 samples");
    }
    double c = 0.0, s = 0.0;
    for (double a : angles) {
        c += std::cos(a);
        s += std::sin(a);
    }
    RayleighResult r;
    r.n = angles.size();
    const auto n = static_cast<double>(r.n);
    r.mean_resultant = std::hypot(c, s) / n;
    r.z = n * r.mean_resultant * r.mean_resultant;
    r.p_value = std::clamp(std::exp(-r.z) * (1.0 + (2.0 * r.z - r.z * r.z) / (4.0 * n)), 0.0, 1.0);
    return r;
}

inline RayleighResult circular_uniformity_stat(std::span<const Phase> phases) {
    std::vector<double> a(phases.size());
    std::transform(phases.begin(), phases.end(), a.begin(), [](Phase p) { return p.value(); });
    return circular_uniformity_stat(std::span<const double>(a));
}

/// Rayleigh test for angles defined modulo π: applied to the doubled angles.
inline RayleighResult axial_uniformity_stat(std::span<const Phase> phases) {
    std::vector<double> a(phases.size());
    std::transform(phases.begin(), phases.end(), a.begin(), [](Phase p) { return 2.0 * p.value(); });
    return circular_uniformity_stat(std::span<const double>(a));
}

/// Plug-in mutual information (bits) between a binary label and an angle
/// histogrammed into `bins` equal bins over [0, 2π).
inline double mutual_information_bits(std::span<const int> labels, std::span<const double> angles, int bins = 32) {
    if (labels.size() != angles.size() || labels.empty() || bins < 1) {
        throw DomainError("mutual_information_bits: need equal, non-empty inputs");
    }
    std::vector<double> joint(2 * static_cast<std::size_t>(bins), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double a = Phase::reduce(angles[i]);
        auto b = static_cast<int>(a / kTwoPi * bins);
        b = std::min(b, bins - 1);
        joint[static_cast<std::size_t>((labels[i] != 0) * bins + b)] += 1.0;
    }
    const auto n = static_cast<double>(labels.size());
    std::array<double, 2> pl{};
    std::vector<double> pa(static_cast<std::size_t>(bins), 0.0);
    for (int l = 0; l < 2; ++l) {
        for (int b = 0; b < bins; ++b) {
            const double p = joint[static_cast<std::size_t>(l * bins + b)] / n;
            pl[l] += p;
            pa[static_cast<std::size_t>(b)] += p;
        }
    }
    double mi = 0.0;
    for (int l = 0; l < 2; ++l) {
        for (int b = 0; b < bins; ++b) {
            const double p = joint[static_cast<std::size_t>(l * bins + b)] / n;
            if (p > 0.0) {
                mi += p * std::log2(p / (pl[l] * pa[static_cast<std::size_t>(b)]));
            }
        }
    }
    return std::max(mi, 0.0);
}

/// Uniform phase on [0, 2π) from 53 random bits.
inline double uniform_angle(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 * kTwoPi;
}

/// Draws the neighbouring-triplet phase φ_R given the encoding phase it will
/// be combined with. The physical transmitter draws it uniformly.
using NeighbourPhaseSampler = std::function<Phase(std::mt19937_64 &, Phase encoding_phase)>;

inline NeighbourPhaseSampler uniform_neighbour_sampler() {
    return [](std::mt19937_64 &rng, Phase) { return Phase(uniform_angle(rng)); };
}

struct SecurityConfig {
    std::uint64_t seed = 1;
    std::size_t amplitude_draws = 10'000;
    std::size_t phase_samples = 100'000;
    int mi_bins = 32;
    double amplitude = 1.0;
    double amplitude_tol = 1e-12;
    double p_threshold = 0.01;
    double mi_threshold = 0.01;
};

struct PropertyResult {
    std::string name;
    bool passed = false;
    std::map<std::string, double> stats;
    std::uint64_t seed = 0;
};

struct SecurityReport {
    std::uint64_t seed = 0;
    std::vector<PropertyResult> properties;

    bool all_passed() const {
        return std::all_of(properties.begin(), properties.end(), [](const PropertyResult &p) { return p.passed; });
    }
};

/// Runs every leakage property. Each property draws from its own generator
/// derived from (seed, property index).
inline SecurityReport run_security_suite(const SecurityConfig &cfg,
                                         const NeighbourPhaseSampler &sampler = uniform_neighbour_sampler()) {
    SecurityReport rep;
    rep.seed = cfg.seed;
    const auto encodings = bb84_phase_pairs();
    std::uint64_t stream = 0;
    auto next_rng = [&](std::uint64_t &sub) {
        sub = detail::derive_seed(cfg.seed, stream++);
        return std::mt19937_64(sub);
    };

    // R and R_P bins: identical field for every encoding, computed both from
    // the closed form and by propagating the full frame through the AMZI.
    {
        PropertyResult r{"r_bin_encoding_independent", false, {}, 0};
        PropertyResult rp{"rp_bin_encoding_independent", false, {}, 0};
        PropertyResult mag{"r_bin_intensity_depends_only_on_phi_rf", false, {}, 0};
        auto rng = next_rng(r.seed);
        rp.seed = mag.seed = r.seed;
        double dev_r = 0.0, dev_rp = 0.0, dev_mag = 0.0, dev_route = 0.0;
        for (std::size_t i = 0; i < cfg.amplitude_draws; ++i) {
            const Phase phi1(uniform_angle(rng));
            const Phase phi_rf(uniform_angle(rng));
            const Phase phi_rp(uniform_angle(rng));
            const CoherentAmplitude ref_r = r_bin_amplitude(encodings[0], phi1, phi_rf, cfg.amplitude);
            const OutputFrame ref_out = amzi_transform(
                make_frame(cfg.amplitude, phi1, encodings[0].phi12, encodings[0].phi23, phi_rp, phi_rf));
            const double expect_mag = cfg.amplitude * std::fabs(std::cos(0.5 * phi_rf.value()));
            for (const auto &pp : encodings) {
                const CoherentAmplitude closed = r_bin_amplitude(pp, phi1, phi_rf, cfg.amplitude);
                const OutputFrame out = amzi_transform(make_frame(cfg.amplitude, phi1, pp.phi12, pp.phi23, phi_rp, phi_rf));
                dev_r = std::max({dev_r, std::abs(closed - ref_r), std::abs(out.r - ref_r)});
                dev_route = std::max(dev_route, std::abs(out.r - closed));
                dev_rp = std::max(dev_rp, std::abs(out.rp - ref_out.rp));
                dev_mag = std::max(dev_mag, std::fabs(std::abs(out.r) - expect_mag));
            }
        }
        r.stats = {{"max_deviation", dev_r}, {"max_route_deviation", dev_route},
                   {"draws", static_cast<double>(cfg.amplitude_draws)}};
        r.passed = dev_r <= cfg.amplitude_tol && dev_route <= cfg.amplitude_tol;
        rp.stats = {{"max_deviation", dev_rp}, {"draws", static_cast<double>(cfg.amplitude_draws)}};
        rp.passed = dev_rp <= cfg.amplitude_tol;
        mag.stats = {{"max_deviation", dev_mag}, {"draws", static_cast<double>(cfg.amplitude_draws)}};
        mag.passed = dev_mag <= cfg.amplitude_tol;
        rep.properties.push_back(r);
        rep.properties.push_back(rp);
        rep.properties.push_back(mag);
    }

    // One-time pad: for every fixed encoding phase, the leakage phase is
    // uniform (as an axial quantity) when the neighbour phase is.
    const std::array<std::pair<const char *, double>, 4> fixed{
        {{"0", 0.0}, {"pi_2", 0.5 * kPi}, {"pi", kPi}, {"3pi_2", 1.5 * kPi}}};
    std::vector<Phase> samples(cfg.phase_samples);
    for (bool late : {true, false}) {
        for (const auto &[label, value] : fixed) {
            PropertyResult pr{std::string(late ? "phi_lr_uniform_phi23_" : "phi_erp_uniform_phi12_") + label, false, {},
                              0};
            auto rng = next_rng(pr.seed);
            const Phase enc(value);
            for (auto &s : samples) {
                const Phase neighbour = sampler(rng, enc);
                const PhasePair pp = late ? PhasePair{Phase{}, enc} : PhasePair{enc, Phase{}};
                const LeakagePhases lp = late ? leakage_phases(pp, Phase{}, neighbour) : leakage_phases(pp, neighbour, Phase{});
                s = late ? lp.phi_lr : lp.phi_erp;
            }
            const RayleighResult rr = axial_uniformity_stat(samples);
            pr.stats = {{"n", static_cast<double>(rr.n)},
                        {"mean_resultant", rr.mean_resultant},
                        {"z", rr.z},
                        {"p_value", rr.p_value}};
            pr.passed = rr.p_value > cfg.p_threshold;
            rep.properties.push_back(pr);
        }
    }

    // Encoded bit vs φ_LR over random BB84 states.
    {
        PropertyResult pr{"mutual_information_bit_phi_lr", false, {}, 0};
        auto rng = next_rng(pr.seed);
        std::vector<int> bits(cfg.phase_samples);
        std::vector<double> doubled(cfg.phase_samples);
        for (std::size_t i = 0; i < cfg.phase_samples; ++i) {
            const std::size_t which = rng() & 3u;
            const PhasePair &pp = encodings[which];
            const Phase neighbour = sampler(rng, pp.phi23);
            bits[i] = static_cast<int>(which & 1u);
            doubled[i] = 2.0 * leakage_phases(pp, Phase{}, neighbour).phi_lr.value();
        }
        const double mi = mutual_information_bits(bits, doubled, cfg.mi_bins);
        pr.stats = {{"mi_bits", mi}, {"bins", static_cast<double>(cfg.mi_bins)}, {"n", static_cast<double>(cfg.phase_samples)}};
        pr.passed = mi < cfg.mi_threshold;
        rep.properties.push_back(pr);
    }
    return rep;
}

/// A deliberately broken neighbour-phase source: it tracks the encoding phase
/// so that φ_LR concentrates near a fixed value.
inline NeighbourPhaseSampler correlated_neighbour_sampler(double spread = 0.5) {
    return [spread](std::mt19937_64 &rng, Phase enc) {
        return Phase(-enc.value() + spread * static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
}

}  // namespace dmqkd
