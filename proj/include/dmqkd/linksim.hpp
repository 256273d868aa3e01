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

// Alice's output, the lossy channel, Bob's basis choice and detectors.
//
// Four prepared state slots exist: signal/decoy/vacuum in Z and signal in Y.
// Bob's Y-basis interferometer keeps only the middle of its three output
// pulses, which carries half of the arriving energy; that factor is applied
// to the effective transmittance of every Y-basis detection.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "dmqkd/encoding.hpp"
#include "dmqkd/errors.hpp"
#include "dmqkd/numfmt.hpp"

namespace dmqkd {

struct LinkParams {
    double loss_db = 15.0;
    double det_efficiency = 0.7;
    double dark_rate = 50.0;     // Hz per detector
    double window = 300e-12;     // s
    int n_detectors = 2;
    double clock = 2.0e9 / 3.0;  // symbols per second
    double p_y_alice = 0.9;
    double p_y_bob = 0.9;
    double e_det = 0.033;
    double f_ec = 1.16;
    double y_receiver_factor = 0.5;

    void validate() const {
        auto prob = [](double p, const char *name) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw ConfigError(std::string("link: ") + name + " must lie in [0, 1]");
            }
        };
        prob(det_efficiency, "det_efficiency");
        prob(p_y_alice, "p_y_alice");
        prob(p_y_bob, "p_y_bob");
        prob(e_det, "e_det");
        prob(y_receiver_factor, "y_receiver_factor");
        if (!(loss_db >= 0.0) || !std::isfinite(loss_db)) {
            throw ConfigError("link: loss_db must be >= 0");
        }
        if (!(clock > 0.0) || !std::isfinite(clock)) {
            throw ConfigError("link: clock must be > 0");
        }
        if (!(dark_rate >= 0.0) || !(window >= 0.0) || n_detectors < 1) {
            throw ConfigError("link: dark_rate, window must be >= 0 and n_detectors >= 1");
        }
        if (!(f_ec >= 1.0) || !std::isfinite(f_ec)) {
            throw ConfigError("link: f_ec must be >= 1");
        }
    }
};

struct DecoyIntensities {
    double mu = 0.4;
    double nu = 0.16;
    double omega = 0.015;

    void validate() const {
        if (!(mu > nu && nu > omega && omega >= 0.0) || !std::isfinite(mu)) {
            throw ConfigError("intensities: require mu > nu > omega >= 0");
        }
        if (!(nu + omega < mu)) {
            throw ConfigError("intensities: require nu + omega < mu");
        }
    }

    double of(IntensityClass c) const {
        switch (c) {
        case IntensityClass::signal:
            return mu;
        case IntensityClass::decoy:
            return nu;
        case IntensityClass::vacuum:
            return omega;
        }
        return 0.0;
    }

    /// Encoder fractions relative to the signal level (ν/μ, ω/μ).
    DecoyTable table() const {
        return {{IntensityClass::signal, 1.0}, {IntensityClass::decoy, nu / mu}, {IntensityClass::vacuum, omega / mu}};
    }
};

struct GainQber {
    double q = 0.0;
    double e = 0.5;
};

/// The prepared-state slots, in tally order.
enum class Slot : std::uint8_t { z_signal, z_decoy, z_vacuum, y_signal };
inline constexpr std::array<Slot, 4> kAllSlots{Slot::z_signal, Slot::z_decoy, Slot::z_vacuum, Slot::y_signal};

inline constexpr Basis basis_of(Slot s) {
    return s == Slot::y_signal ? Basis::Y : Basis::Z;
}

inline constexpr IntensityClass class_of(Slot s) {
    switch (s) {
    case Slot::z_decoy:
        return IntensityClass::decoy;
    case Slot::z_vacuum:
        return IntensityClass::vacuum;
    default:
        return IntensityClass::signal;
    }
}

/// Alice's preparation probabilities over the four slots.
struct StateMix {
    std::array<double, 4> p{0.9, 0.1 / 3.0, 0.1 / 3.0, 0.1 / 3.0};

    double of(Slot s) const {
        switch (s) {
        case Slot::y_signal:
            return p[0];
        case Slot::z_signal:
            return p[1];
        case Slot::z_decoy:
            return p[2];
        case Slot::z_vacuum:
            return p[3];
        }
        return 0.0;
    }

    /// Y fraction `p_y`, the remaining Z fraction split evenly across classes.
    static StateMix from_basis_probability(double p_y) {
        const double z = (1.0 - p_y) / 3.0;
        return {{p_y, z, z, z}};
    }

    void validate() const {
        double sum = 0.0;
        for (double v : p) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw ConfigError("state mix: probabilities must lie in [0, 1]");
            }
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-9) {
            throw ConfigError("state mix: probabilities must sum to 1");
        }
    }
};

inline double transmittance(double loss_db, double det_efficiency) {
    if (!(loss_db >= 0.0) || !(det_efficiency >= 0.0 && det_efficiency <= 1.0)) {
        throw DomainError("transmittance: need loss_db >= 0 and det_efficiency in [0, 1]");
    }
    return det_efficiency * std::pow(10.0, -loss_db / 10.0);
}

/// Background detection probability per gate, linearized in rate x window.
inline double dark_prob(double dark_rate, double window, int n_detectors) {
    if (!(dark_rate >= 0.0) || !(window >= 0.0) || n_detectors < 0) {
        throw DomainError("dark_prob: arguments must be non-negative");
    }
    const double y0 = n_detectors * dark_rate * window;
    if (y0 > 0.1) {
        throw ModelValidityError("dark_prob: n*rate*window = " + std::to_string(y0) +
                                 " exceeds 0.1, the linearized model is invalid");
    }
    return y0;
}

/// Asymptotic gain and QBER of a phase-randomized coherent state with mean
/// photon number `lambda`.
inline GainQber analytic_gain_qber(double lambda, double eta, double y0, double e_det) {
    if (!(lambda >= 0.0) || !(eta >= 0.0 && eta <= 1.0)) {
        throw DomainError("analytic_gain_qber: need lambda >= 0 and eta in [0, 1]");
    }
    const double click = -std::expm1(-eta * lambda);
    const double q = y0 + click;
    if (q <= 0.0) {
        return {0.0, 0.5};
    }
    return {q, (0.5 * y0 + e_det * click) / q};
}

inline double channel_eta(const LinkParams &p) {
    return transmittance(p.loss_db, p.det_efficiency);
}

inline double channel_y0(const LinkParams &p) {
    return dark_prob(p.dark_rate, p.window, p.n_detectors);
}

inline double basis_eta(const LinkParams &p, Basis b) {
    const double eta = channel_eta(p);
    return b == Basis::Y ? eta * p.y_receiver_factor : eta;
}

/// Expected per-sifted-frame gain and QBER for one slot.
inline GainQber analytic_slot(const LinkParams &p, const DecoyIntensities &in, Slot s) {
    return analytic_gain_qber(in.of(class_of(s)), basis_eta(p, basis_of(s)), channel_y0(p), p.e_det);
}

struct TallyCell {
    std::uint64_t sent = 0;
    std::uint64_t detected = 0;
    std::uint64_t errors = 0;

    double gain() const {
        return sent == 0 ? 0.0 : static_cast<double>(detected) / static_cast<double>(sent);
    }
    double qber() const {
        return detected == 0 ? 0.5 : static_cast<double>(errors) / static_cast<double>(detected);
    }
    friend bool operator==(const TallyCell &, const TallyCell &) = default;
};

/// Per-slot counts of basis-matched (sifted) frames, detections and errors.
struct TallyCounts {
    std::array<TallyCell, 4> cells{};
    std::uint64_t frames = 0;

    TallyCell &operator[](Slot s) {
        return cells[static_cast<std::size_t>(s)];
    }
    const TallyCell &operator[](Slot s) const {
        return cells[static_cast<std::size_t>(s)];
    }
    TallyCounts &operator+=(const TallyCounts &o) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            cells[i].sent += o.cells[i].sent;
            cells[i].detected += o.cells[i].detected;
            cells[i].errors += o.cells[i].errors;
        }
        frames += o.frames;
        return *this;
    }
    friend bool operator==(const TallyCounts &, const TallyCounts &) = default;
};

/// Frames per independently seeded block. Tallies depend only on the seed
/// and the block decomposition, never on how blocks are spread over workers.
inline constexpr std::uint64_t kFramesPerBlock = 1u << 16;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed of the generator for (seed, stream index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

/// Threshold t with P(u < t) = p for u uniform on 64 bits.
inline std::uint64_t threshold(double p) {
    if (p <= 0.0) {
        return 0;
    }
    if (p >= 1.0) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

struct McPlan {
    std::array<std::uint64_t, 3> slot_cut{};  // cumulative cuts for the first three slots (in mix order)
    std::array<Slot, 4> slot_order{Slot::y_signal, Slot::z_signal, Slot::z_decoy, Slot::z_vacuum};
    std::uint64_t bob_y = 0;
    std::array<std::uint64_t, 4> signal{};
    std::uint64_t dark_each = 0;
    std::uint64_t misalign = 0;
};

inline void run_block(const McPlan &plan, std::uint64_t seed, std::uint64_t block, std::uint64_t n,
                      TallyCounts &out) {
    std::mt19937_64 rng(derive_seed(seed, block));
    for (std::uint64_t f = 0; f < n; ++f) {
        const std::uint64_t u = rng();
        std::size_t k = 0;
        while (k < 3 && u >= plan.slot_cut[k]) {
            ++k;
        }
        const Slot slot = plan.slot_order[k];
        const bool bob_y = rng() < plan.bob_y;
        if (bob_y != (basis_of(slot) == Basis::Y)) {
            continue;
        }
        TallyCell &cell = out[slot];
        ++cell.sent;
        bool right = rng() < plan.dark_each;
        bool wrong = rng() < plan.dark_each;
        if (rng() < plan.signal[static_cast<std::size_t>(slot)]) {
            if (rng() < plan.misalign) {
                wrong = true;
            } else {
                right = true;
            }
        }
        if (!right && !wrong) {
            continue;
        }
        ++cell.detected;
        // Double clicks are assigned a random bit.
        if (right && wrong) {
            cell.errors += rng() & 1u;
        } else if (wrong) {
            ++cell.errors;
        }
    }
    out.frames += n;
}

}  // namespace detail

/// Monte-Carlo frame sampler. Each frame draws a prepared slot from `mix`
/// (bit value is symmetric and does not affect the tallies), Bob's basis,
/// independent dark clicks in the two outcome detectors, a Poissonian signal
/// click with probability 1 - exp(-eta_b * lambda) and, for a signal click,
/// misrouting with probability e_det.
///
/// Frames are cut into blocks of kFramesPerBlock with per-block generators;
/// `workers` only changes the execution, not the result.
inline TallyCounts simulate_frames_mc(std::uint64_t n_frames, const LinkParams &params, const DecoyIntensities &intens,
                                      const StateMix &mix, std::uint64_t seed, unsigned workers = 1) {
    if (n_frames == 0) {
        throw ConfigError("simulate_frames_mc: n_frames must be > 0");
    }
    params.validate();
    intens.validate();
    mix.validate();

    detail::McPlan plan;
    double acc = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        acc += mix.of(plan.slot_order[k]);
        plan.slot_cut[k] = detail::threshold(acc);
    }
    plan.bob_y = detail::threshold(params.p_y_bob);
    for (Slot s : kAllSlots) {
        const double lambda = intens.of(class_of(s));
        plan.signal[static_cast<std::size_t>(s)] =
            detail::threshold(-std::expm1(-basis_eta(params, basis_of(s)) * lambda));
    }
    plan.dark_each = detail::threshold(channel_y0(params) / 2.0);
    plan.misalign = detail::threshold(params.e_det);

    const std::uint64_t n_blocks = (n_frames + kFramesPerBlock - 1) / kFramesPerBlock;
    auto block_len = [&](std::uint64_t b) {
        return b + 1 == n_blocks ? n_frames - b * kFramesPerBlock : kFramesPerBlock;
    };

    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(n_blocks, 256))));
    if (workers == 1) {
        TallyCounts total;
        for (std::uint64_t b = 0; b < n_blocks; ++b) {
            detail::run_block(plan, seed, b, block_len(b), total);
        }
        return total;
    }

    std::vector<TallyCounts> partial(workers);
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::uint64_t b = next++; b < n_blocks; b = next++) {
                detail::run_block(plan, seed, b, block_len(b), partial[w]);
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    TallyCounts total;
    for (const auto &p : partial) {
        total += p;
    }
    return total;
}

/// Empirical tallies of one slot against the analytic model, with binomial
/// standard errors taken under the analytic (null) values.
struct SlotComparison {
    Slot slot = Slot::z_signal;
    TallyCell tally;
    GainQber analytic;
    double sigma_q = 0;
    double sigma_e = 0;
    double z_q = 0;  // (empirical - analytic) / sigma
    double z_e = 0;
};

inline std::array<SlotComparison, 4> compare_to_analytic(const TallyCounts &t, const LinkParams &p,
                                                         const DecoyIntensities &in) {
    std::array<SlotComparison, 4> out{};
    for (std::size_t i = 0; i < kAllSlots.size(); ++i) {
        const Slot s = kAllSlots[i];
        auto &c = out[i];
        c.slot = s;
        c.tally = t[s];
        c.analytic = analytic_slot(p, in, s);
        if (c.tally.sent > 0) {
            c.sigma_q = std::sqrt(c.analytic.q * (1.0 - c.analytic.q) / static_cast<double>(c.tally.sent));
            c.z_q = c.sigma_q > 0 ? (c.tally.gain() - c.analytic.q) / c.sigma_q : 0.0;
        }
        if (c.tally.detected > 0) {
            c.sigma_e = std::sqrt(c.analytic.e * (1.0 - c.analytic.e) / static_cast<double>(c.tally.detected));
            c.z_e = c.sigma_e > 0 ? (c.tally.qber() - c.analytic.e) / c.sigma_e : 0.0;
        }
    }
    return out;
}

inline std::string slot_key(Slot s) {
    return std::string(to_string(class_of(s))) + "," + std::string(to_string(basis_of(s)));
}

/// CSV: class,basis,sent,detected,errors,gain,qber
inline void write_tally_csv(std::ostream &os, const TallyCounts &t) {
    os << "class,basis,sent,detected,errors,gain,qber\n";
    for (Slot s : kAllSlots) {
        const auto &c = t[s];
        os << slot_key(s) << ',' << c.sent << ',' << c.detected << ',' << c.errors;
        os << ',' << detail::fmt_double(c.gain()) << ',' << detail::fmt_double(c.qber()) << '\n';
    }
}

/// CSV: class,basis,gain,qber
inline void write_gain_csv(std::ostream &os, const LinkParams &p, const DecoyIntensities &in) {
    os << "class,basis,gain,qber\n";
    for (Slot s : kAllSlots) {
        const GainQber g = analytic_slot(p, in, s);
        os << slot_key(s) << ',' << detail::fmt_double(g.q) << ',' << detail::fmt_double(g.e) << '\n';
    }
}

}  // namespace dmqkd
