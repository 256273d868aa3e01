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

// JSON forms of schedules, configurations, tallies, rate records and
// security reports.

#include <string>

#include "json.hpp"

#include "dmqkd/config.hpp"
#include "dmqkd/decoy.hpp"
#include "dmqkd/linksim.hpp"
#include "dmqkd/schedule.hpp"
#include "dmqkd/secprops.hpp"

namespace dmqkd {

using nlohmann::json;

inline json timing_to_json(const TimingParams &t) {
    return {{"master_rate_hz", t.master_rate},
            {"slave_rate_hz", t.slave_rate},
            {"perturbation_width_s", t.perturbation_width},
            {"perturbation_separation_s", t.perturbation_separation},
            {"amzi_delay_s", t.amzi_delay},
            {"master_on_time_s", t.master_on_time},
            {"slave_on_time_s", t.slave_on_time}};
}

inline json schedule_to_json(const WaveformSchedule &s) {
    json events = json::array();
    for (const auto &e : s.events) {
        events.push_back({{"channel", std::string(to_string(e.channel))},
                          {"start_s", e.start},
                          {"duration_s", e.duration},
                          {"level_v", e.level}});
    }
    return {{"timing", timing_to_json(s.timing)}, {"events", std::move(events)}};
}

inline WaveformSchedule schedule_from_json(const json &j) {
    WaveformSchedule s;
    try {
        const auto &t = j.at("timing");
        s.timing.master_rate = t.at("master_rate_hz").get<double>();
        s.timing.slave_rate = t.at("slave_rate_hz").get<double>();
        s.timing.perturbation_width = t.at("perturbation_width_s").get<double>();
        s.timing.perturbation_separation = t.at("perturbation_separation_s").get<double>();
        s.timing.amzi_delay = t.at("amzi_delay_s").get<double>();
        s.timing.master_on_time = t.at("master_on_time_s").get<double>();
        s.timing.slave_on_time = t.at("slave_on_time_s").get<double>();
        for (const auto &e : j.at("events")) {
            ScheduleEvent ev;
            if (!parse_channel(e.at("channel").get<std::string>(), ev.channel)) {
                throw ParseError("unknown channel " + e.at("channel").dump());
            }
            ev.start = e.at("start_s").get<double>();
            ev.duration = e.at("duration_s").get<double>();
            ev.level = e.at("level_v").get<double>();
            s.events.push_back(ev);
        }
    } catch (const json::exception &e) {
        throw ParseError(std::string("schedule JSON: ") + e.what());
    }
    return s;
}

inline json config_to_json(const RunConfig &cfg) {
    RunConfig copy = cfg;
    json j = json::object();
    for (const auto &f : config_fields(copy)) {
        std::visit([&](auto *p) { j[f.key] = *p; }, f.target);
    }
    return j;
}

/// Applies the keys of a flat JSON object on top of `base`. Does not validate.
inline RunConfig config_from_json(const json &j, RunConfig base = {}) {
    if (!j.is_object()) {
        throw ParseError("config JSON must be an object");
    }
    auto fields = config_fields(base);
    for (const auto &[key, value] : j.items()) {
        bool found = false;
        for (const auto &f : fields) {
            if (key != f.key) {
                continue;
            }
            found = true;
            try {
                std::visit(
                    [&](auto *p) {
                        using T = std::remove_pointer_t<decltype(p)>;
                        if constexpr (std::is_same_v<T, double>) {
                            if (!value.is_number()) {
                                throw ParseError("'" + key + "' must be a number");
                            }
                        } else if constexpr (std::is_same_v<T, std::string>) {
                            if (!value.is_string()) {
                                throw ParseError("'" + key + "' must be a string");
                            }
                        } else {
                            if (!value.is_number_integer() || value.get<long long>() < 0) {
                                throw ParseError("'" + key + "' must be a non-negative integer");
                            }
                        }
                        *p = value.get<T>();
                    },
                    f.target);
            } catch (const json::exception &e) {
                throw ParseError("'" + key + "': " + e.what());
            }
            break;
        }
        if (!found) {
            throw ParseError("unknown key '" + key + "'");
        }
    }
    return base;
}

inline json gain_to_json(const GainQber &g) {
    return {{"gain", g.q}, {"qber", g.e}};
}

inline json tally_to_json(const TallyCounts &t) {
    json cells = json::array();
    for (Slot s : kAllSlots) {
        const auto &c = t[s];
        cells.push_back({{"class", std::string(to_string(class_of(s)))},
                         {"basis", std::string(to_string(basis_of(s)))},
                         {"sent", c.sent},
                         {"detected", c.detected},
                         {"errors", c.errors},
                         {"gain", c.gain()},
                         {"qber", c.qber()}});
    }
    return {{"frames", t.frames}, {"cells", std::move(cells)}};
}

inline json rate_to_json(const RateBreakdown &r) {
    return {{"q_mu", r.q_mu},   {"e_mu", r.e_mu},   {"q_nu", r.q_nu}, {"e_nu", r.e_nu},
            {"q_omega", r.q_omega}, {"e_omega", r.e_omega}, {"y0_l", r.y0_l}, {"y1_l", r.y1_l},
            {"e1_u", r.e1_u},   {"q1_l", r.q1_l},   {"r_per_pulse", r.r_per_pulse}, {"r_bps", r.r_bps}};
}

inline json report_to_json(const SecurityReport &rep) {
    json props = json::array();
    for (const auto &p : rep.properties) {
        props.push_back({{"name", p.name}, {"passed", p.passed}, {"seed", p.seed}, {"stats", p.stats}});
    }
    return {{"seed", rep.seed}, {"all_passed", rep.all_passed()}, {"properties", std::move(props)}};
}

}  // namespace dmqkd
