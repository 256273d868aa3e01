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

// Compilation of symbol streams into timed drive events for the master and
// slave lasers, the inverse decompilation, and the line-oriented text form.
//
// Time origin is the onset of the first master window. Within each window
// the three slave onsets sit at 0, Ts, 2Ts (Ts = 1/slave_rate) and the two
// phase-setting perturbations are placed symmetrically about the middle
// onset, `perturbation_separation` apart (start to start).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dmqkd/encoding.hpp"
#include "dmqkd/errors.hpp"
#include "dmqkd/numfmt.hpp"
#include "dmqkd/phase.hpp"

namespace dmqkd {

struct TimingParams {
    double master_rate = 2.0e9 / 3.0;  // Hz, nominally 667 MHz
    double slave_rate = 2.0e9;         // Hz
    double perturbation_width = 150e-12;
    double perturbation_separation = 450e-12;
    double amzi_delay = 500e-12;
    double master_on_time = 1.4e-9;
    double slave_on_time = 300e-12;

    double master_period() const {
        return 1.0 / master_rate;
    }
    double slave_period() const {
        return 1.0 / slave_rate;
    }
    /// Offset of the first perturbation from the window onset.
    double first_perturbation_offset() const {
        return slave_period() - 0.5 * perturbation_separation - 0.5 * perturbation_width;
    }

    void validate() const {
        const std::array<double, 7> all{master_rate,    slave_rate,     perturbation_width, perturbation_separation,
                                        amzi_delay,     master_on_time, slave_on_time};
        for (double v : all) {
            if (!std::isfinite(v) || v <= 0.0) {
                throw ConfigError("timing: all parameters must be positive and finite");
            }
        }
        constexpr double rel = 1e-9;
        if (std::fabs(slave_rate - 3.0 * master_rate) > rel * slave_rate) {
            throw ConfigError("timing: slave_rate must equal 3 x master_rate");
        }
        if (std::fabs(amzi_delay * slave_rate - 1.0) > rel) {
            throw ConfigError("timing: amzi_delay must equal 1/slave_rate");
        }
        if (master_on_time > master_period()) {
            throw ConfigError("timing: master_on_time exceeds the master period");
        }
        if (slave_on_time > slave_period()) {
            throw ConfigError("timing: slave_on_time exceeds the slave period");
        }
        if (2.0 * slave_period() + slave_on_time > master_on_time * (1.0 + rel)) {
            throw ConfigError("timing: three slave pulses do not fit in the master on-window");
        }
        const double p0 = first_perturbation_offset();
        const double p1 = p0 + perturbation_separation;
        if (perturbation_separation < perturbation_width) {
            throw ConfigError("timing: perturbations overlap");
        }
        if (!(p0 > 0.0 && p0 + perturbation_width < slave_period() && p1 > slave_period() &&
              p1 + perturbation_width < 2.0 * slave_period())) {
            throw ConfigError("timing: perturbations must fall strictly between consecutive slave onsets");
        }
    }
};

enum class Channel : std::uint8_t { master_drive, master_perturbation, slave_drive };

inline constexpr std::string_view to_string(Channel c) {
    switch (c) {
    case Channel::master_drive:
        return "master_drive";
    case Channel::master_perturbation:
        return "master_perturbation";
    case Channel::slave_drive:
        return "slave_drive";
    }
    return "?";
}

inline bool parse_channel(std::string_view s, Channel &out) {
    for (Channel c : {Channel::master_drive, Channel::master_perturbation, Channel::slave_drive}) {
        if (s == to_string(c)) {
            out = c;
            return true;
        }
    }
    return false;
}

struct ScheduleEvent {
    Channel channel = Channel::master_drive;
    double start = 0.0;     // s
    double duration = 0.0;  // s
    double level = 0.0;     // V

    double end() const {
        return start + duration;
    }
    friend bool operator==(const ScheduleEvent &, const ScheduleEvent &) = default;
};

/// Gate level written for master and slave drive pulses. Only perturbation
/// levels carry phase information.
inline constexpr double kDriveLevel = 1.0;

struct WaveformSchedule {
    TimingParams timing;
    std::vector<ScheduleEvent> events;

    std::size_t symbol_count() const {
        return static_cast<std::size_t>(
            std::count_if(events.begin(), events.end(),
                          [](const ScheduleEvent &e) { return e.channel == Channel::master_drive; }));
    }
    /// Length of the master-clock frames covered by the schedule.
    double span() const {
        return static_cast<double>(symbol_count()) * timing.master_period();
    }
};

namespace detail {

inline bool event_order(const ScheduleEvent &a, const ScheduleEvent &b) {
    if (a.start != b.start) {
        return a.start < b.start;
    }
    return a.channel < b.channel;
}

inline double parse_double(std::string_view s, std::size_t line) {
    std::string tmp(s);
    char *end = nullptr;
    double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size() || !std::isfinite(v)) {
        throw ParseError("invalid number '" + tmp + "'", line);
    }
    return v;
}

}  // namespace detail

/// Compiles a symbol stream into drive events.
inline WaveformSchedule compile_schedule(std::span<const EncodingSymbol> symbols, const TimingParams &timing,
                                         const CalibrationCurve &cal, const DecoyTable &table) {
    if (symbols.empty()) {
        throw ConfigError("compile_schedule: empty symbol stream");
    }
    timing.validate();
    cal.validate();

    WaveformSchedule out{timing, {}};
    out.events.reserve(symbols.size() * 6);
    const double ts = timing.slave_period();
    const double p0 = timing.first_perturbation_offset();
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        PhasePair pp;
        try {
            pp = encode_symbol(symbols[k], table);
        } catch (const InvalidSymbolError &e) {
            throw InvalidSymbolError("symbol " + std::to_string(k) + ": " + e.what());
        }
        const double t0 = static_cast<double>(k) / timing.master_rate;
        out.events.push_back({Channel::master_drive, t0, timing.master_on_time, kDriveLevel});
        for (int j = 0; j < 3; ++j) {
            out.events.push_back({Channel::slave_drive, t0 + j * ts, timing.slave_on_time, kDriveLevel});
        }
        out.events.push_back(
            {Channel::master_perturbation, t0 + p0, timing.perturbation_width, voltage_for_phase(pp.phi12, cal)});
        out.events.push_back({Channel::master_perturbation, t0 + p0 + timing.perturbation_separation,
                              timing.perturbation_width, voltage_for_phase(pp.phi23, cal)});
    }
    std::stable_sort(out.events.begin(), out.events.end(), detail::event_order);
    return out;
}

/// Recovers the per-symbol phase settings from a schedule.
inline std::vector<PhasePair> decompile_schedule(const WaveformSchedule &sched, const TimingParams &timing,
                                                 const CalibrationCurve &cal) {
    cal.validate();
    const auto &ev = sched.events;
    for (std::size_t i = 1; i < ev.size(); ++i) {
        if (ev[i].start < ev[i - 1].start) {
            throw ParseError("events are not sorted by start time");
        }
    }
    // No overlap on any single channel.
    std::array<const ScheduleEvent *, 3> last{};
    for (const auto &e : ev) {
        if (!(e.duration > 0.0)) {
            throw ParseError("event with non-positive duration on " + std::string(to_string(e.channel)));
        }
        auto &prev = last[static_cast<std::size_t>(e.channel)];
        if (prev != nullptr && e.start < prev->end()) {
            throw ParseError("overlapping events on channel " + std::string(to_string(e.channel)));
        }
        prev = &e;
    }

    constexpr double kSpacingTol = 1e-12;
    const double ts = timing.slave_period();
    std::vector<PhasePair> out;
    std::size_t assigned = 0;
    std::size_t masters = 0;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        if (ev[i].channel != Channel::master_drive) {
            continue;
        }
        ++masters;
        const double lo = ev[i].start;
        const double hi = ev[i].end();
        std::vector<const ScheduleEvent *> slaves;
        std::vector<const ScheduleEvent *> perts;
        for (std::size_t j = i; j < ev.size() && ev[j].start < hi; ++j) {
            if (ev[j].start < lo) {
                continue;
            }
            if (ev[j].channel == Channel::slave_drive) {
                slaves.push_back(&ev[j]);
            } else if (ev[j].channel == Channel::master_perturbation) {
                perts.push_back(&ev[j]);
            }
        }
        const std::string where = "master window " + std::to_string(masters - 1);
        if (slaves.size() != 3 || perts.size() != 2) {
            throw ParseError(where + ": expected 3 slave and 2 perturbation events, found " +
                             std::to_string(slaves.size()) + " and " + std::to_string(perts.size()));
        }
        for (int j = 0; j < 2; ++j) {
            if (std::fabs(slaves[j + 1]->start - slaves[j]->start - ts) > kSpacingTol) {
                throw ParseError(where + ": slave onsets are not 1/slave_rate apart");
            }
            const auto *p = perts[j];
            if (!(p->start > slaves[j]->start && p->end() < slaves[j + 1]->start)) {
                throw ParseError(where + ": perturbation does not lie between consecutive slave onsets");
            }
        }
        assigned += 5;
        out.push_back({phase_for_voltage(perts[0]->level, cal), phase_for_voltage(perts[1]->level, cal)});
    }
    if (assigned + masters != ev.size()) {
        throw ParseError("events outside any master window");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text form:
//   # dmqkd-schedule v1 master_rate_hz=... slave_rate_hz=... ...
//   <channel> <start_s> <duration_s> <level_V>
// Numbers use the shortest exact form, so files are byte-stable and lossless.

inline constexpr std::string_view kScheduleMagic = "# dmqkd-schedule v1";

inline void write_schedule_text(std::ostream &os, const WaveformSchedule &s) {
    using detail::fmt_double;
    const auto &t = s.timing;
    os << kScheduleMagic << " master_rate_hz=" << fmt_double(t.master_rate)
       << " slave_rate_hz=" << fmt_double(t.slave_rate) << " perturbation_width_s=" << fmt_double(t.perturbation_width)
       << " perturbation_separation_s=" << fmt_double(t.perturbation_separation)
       << " amzi_delay_s=" << fmt_double(t.amzi_delay) << " master_on_time_s=" << fmt_double(t.master_on_time)
       << " slave_on_time_s=" << fmt_double(t.slave_on_time) << '\n';
    for (const auto &e : s.events) {
        os << to_string(e.channel) << ' ' << fmt_double(e.start) << ' ' << fmt_double(e.duration) << ' '
           << fmt_double(e.level) << '\n';
    }
}

inline std::string schedule_to_text(const WaveformSchedule &s) {
    std::ostringstream os;
    write_schedule_text(os, s);
    return os.str();
}

inline WaveformSchedule read_schedule_text(std::istream &is) {
    WaveformSchedule s;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(is, line)) {
        throw ParseError("empty schedule", 1);
    }
    ++lineno;
    if (line.rfind(kScheduleMagic, 0) != 0) {
        throw ParseError("missing schedule header", lineno);
    }
    {
        std::istringstream hs(line.substr(kScheduleMagic.size()));
        std::string kv;
        int seen = 0;
        while (hs >> kv) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw ParseError("malformed header field '" + kv + "'", lineno);
            }
            const std::string key = kv.substr(0, eq);
            const double v = detail::parse_double(std::string_view(kv).substr(eq + 1), lineno);
            auto &t = s.timing;
            if (key == "master_rate_hz") {
                t.master_rate = v;
            } else if (key == "slave_rate_hz") {
                t.slave_rate = v;
            } else if (key == "perturbation_width_s") {
                t.perturbation_width = v;
            } else if (key == "perturbation_separation_s") {
                t.perturbation_separation = v;
            } else if (key == "amzi_delay_s") {
                t.amzi_delay = v;
            } else if (key == "master_on_time_s") {
                t.master_on_time = v;
            } else if (key == "slave_on_time_s") {
                t.slave_on_time = v;
            } else {
                throw ParseError("unknown header field '" + key + "'", lineno);
            }
            ++seen;
        }
        if (seen != 7) {
            throw ParseError("header must carry all 7 timing fields", lineno);
        }
    }
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ls(line);
        std::string ch, a, b, c, extra;
        if (!(ls >> ch >> a >> b >> c) || (ls >> extra)) {
            throw ParseError("expected 'channel start duration level'", lineno);
        }
        ScheduleEvent e;
        if (!parse_channel(ch, e.channel)) {
            throw ParseError("unknown channel '" + ch + "'", lineno);
        }
        e.start = detail::parse_double(a, lineno);
        e.duration = detail::parse_double(b, lineno);
        e.level = detail::parse_double(c, lineno);
        s.events.push_back(e);
    }
    return s;
}

inline WaveformSchedule schedule_from_text(const std::string &text) {
    std::istringstream is(text);
    return read_schedule_text(is);
}

/// Parses a whitespace-separated stream of `<basis><bit><class>` tokens.
/// Tokens that are well-formed but name an impossible state (a Y-basis decoy)
/// raise InvalidSymbolError; anything else malformed raises ParseError.
inline std::vector<EncodingSymbol> parse_symbol_stream(std::istream &is) {
    std::vector<EncodingSymbol> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            auto sym = parse_symbol_token(tok);
            if (!sym) {
                throw ParseError("invalid symbol token '" + tok + "'", lineno);
            }
            if (!sym->valid()) {
                throw InvalidSymbolError("line " + std::to_string(lineno) + ": '" + tok +
                                         "' is not a valid state (decoys exist only in the Z basis)");
            }
            out.push_back(*sym);
        }
    }
    return out;
}

}  // namespace dmqkd
