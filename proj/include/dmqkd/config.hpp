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

// Run configuration: a flat, commented `key = value` file. Every key has a
// default equal to the reference transmitter/link parameter set.

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "dmqkd/encoding.hpp"
#include "dmqkd/errors.hpp"
#include "dmqkd/linksim.hpp"
#include "dmqkd/schedule.hpp"

namespace dmqkd {

struct SweepSpec {
    double min_db = 0.0;
    double max_db = 60.0;
    double step_db = 1.0;
};

struct McSpec {
    std::uint64_t frames = 10'000'000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

struct VerifySpec {
    std::uint64_t samples = 100'000;
    std::uint64_t draws = 10'000;
};

struct RunConfig {
    LinkParams link;
    DecoyIntensities intensities;
    TimingParams timing;
    CalibrationCurve calibration;
    StateMix mix;
    SweepSpec sweep;
    McSpec mc;
    VerifySpec verify;
    std::string out_dir = ".";

    void validate() const {
        link.validate();
        intensities.validate();
        timing.validate();
        calibration.validate();
        mix.validate();
        if (!(sweep.step_db > 0.0)) {
            throw ConfigError("sweep_step_db must be positive");
        }
        if (std::fabs(mix.of(Slot::y_signal) - link.p_y_alice) > 1e-9) {
            throw ConfigError("mix_y_signal must equal p_y_alice");
        }
        if (verify.samples < 100 || verify.draws == 0) {
            throw ConfigError("verify_samples must be >= 100 and verify_draws > 0");
        }
    }
};

struct ConfigField {
    const char *key;
    const char *comment;
    std::variant<double *, int *, unsigned *, std::uint64_t *, std::string *> target;
};

/// All fields in file order. `cfg` must outlive the returned pointers.
inline std::vector<ConfigField> config_fields(RunConfig &cfg) {
    auto &l = cfg.link;
    auto &t = cfg.timing;
    return {
        {"loss_db", "channel loss for encode/mc runs [dB]", &l.loss_db},
        {"det_efficiency", "detector efficiency", &l.det_efficiency},
        {"dark_rate_hz", "dark count rate per detector [Hz]", &l.dark_rate},
        {"window_s", "detection window [s]", &l.window},
        {"n_detectors", "detectors contributing dark counts per gate", &l.n_detectors},
        {"clock_hz", "symbol rate [Hz]", &l.clock},
        {"p_y_alice", "probability Alice prepares Y", &l.p_y_alice},
        {"p_y_bob", "probability Bob measures Y", &l.p_y_bob},
        {"e_det", "lumped misalignment error", &l.e_det},
        {"f_ec", "error-correction inefficiency", &l.f_ec},
        {"y_receiver_factor", "fraction of Y-basis light in the measured interference pulse", &l.y_receiver_factor},
        {"mu", "signal mean photon number", &cfg.intensities.mu},
        {"nu", "decoy mean photon number", &cfg.intensities.nu},
        {"omega", "vacuum-decoy mean photon number", &cfg.intensities.omega},
        {"master_rate_hz", "master laser clock [Hz]", &t.master_rate},
        {"slave_rate_hz", "slave laser clock [Hz]", &t.slave_rate},
        {"perturbation_width_s", "phase perturbation width [s]", &t.perturbation_width},
        {"perturbation_separation_s", "start-to-start perturbation separation [s]", &t.perturbation_separation},
        {"amzi_delay_s", "interferometer delay [s]", &t.amzi_delay},
        {"master_on_time_s", "master on-time [s]", &t.master_on_time},
        {"slave_on_time_s", "slave on-time [s]", &t.slave_on_time},
        {"v_pi", "half-wave voltage [V]", &cfg.calibration.v_pi},
        {"mix_y_signal", "state mix: Y signal", &cfg.mix.p[0]},
        {"mix_z_signal", "state mix: Z signal", &cfg.mix.p[1]},
        {"mix_z_decoy", "state mix: Z decoy", &cfg.mix.p[2]},
        {"mix_z_vacuum", "state mix: Z vacuum", &cfg.mix.p[3]},
        {"sweep_min_db", "sweep start [dB]", &cfg.sweep.min_db},
        {"sweep_max_db", "sweep end, inclusive [dB]", &cfg.sweep.max_db},
        {"sweep_step_db", "sweep step [dB]", &cfg.sweep.step_db},
        {"mc_frames", "Monte-Carlo frames", &cfg.mc.frames},
        {"seed", "master seed", &cfg.mc.seed},
        {"workers", "worker threads (results do not depend on it)", &cfg.mc.workers},
        {"verify_samples", "samples per statistical security property", &cfg.verify.samples},
        {"verify_draws", "draws for exact amplitude properties", &cfg.verify.draws},
        {"out_dir", "output directory", &cfg.out_dir},
    };
}

namespace detail {

inline std::string format_field(const ConfigField &f) {
    return std::visit(
        [](auto *p) -> std::string {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, double>) {
                return fmt_double(*p);
            } else if constexpr (std::is_same_v<T, std::string>) {
                return *p;
            } else {
                return std::to_string(*p);
            }
        },
        f.target);
}

inline void assign_field(const ConfigField &f, const std::string &value, std::size_t line) {
    std::visit(
        [&](auto *p) {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, double>) {
                *p = parse_double(value, line);
            } else if constexpr (std::is_same_v<T, std::string>) {
                *p = value;
            } else {
                char *end = nullptr;
                errno = 0;
                const long long v = std::strtoll(value.c_str(), &end, 10);
                if (value.empty() || end != value.c_str() + value.size() || errno != 0 || v < 0) {
                    throw ParseError(std::string("invalid integer for '") + f.key + "'", line);
                }
                *p = static_cast<T>(v);
            }
        },
        f.target);
}

inline std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline void write_config(std::ostream &os, const RunConfig &cfg) {
    RunConfig copy = cfg;
    os << "# dmqkd run configuration\n";
    for (const auto &f : config_fields(copy)) {
        os << "\n# " << f.comment << '\n' << f.key << " = " << detail::format_field(f) << '\n';
    }
}

inline std::string config_to_text(const RunConfig &cfg) {
    std::ostringstream os;
    write_config(os, cfg);
    return os.str();
}

/// Applies `key = value` lines on top of `base`. Does not validate.
inline RunConfig read_config(std::istream &is, RunConfig base = {}) {
    auto fields = config_fields(base);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("expected 'key = value'", lineno);
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        bool found = false;
        for (const auto &f : fields) {
            if (key == f.key) {
                detail::assign_field(f, value, lineno);
                found = true;
                break;
            }
        }
        if (!found) {
            throw ParseError("unknown key '" + key + "'", lineno);
        }
    }
    return base;
}

inline RunConfig config_from_text(const std::string &text) {
    std::istringstream is(text);
    return read_config(is);
}

inline bool operator==(const RunConfig &a, const RunConfig &b) {
    return config_to_text(a) == config_to_text(b);
}

}  // namespace dmqkd
