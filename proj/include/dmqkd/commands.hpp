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

// The `dmqkd` subcommands as library functions. Each returns a process exit
// code and writes its artifacts under cfg.out_dir.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "dmqkd/config.hpp"
#include "dmqkd/decoy.hpp"
#include "dmqkd/json_io.hpp"
#include "dmqkd/linksim.hpp"
#include "dmqkd/schedule.hpp"
#include "dmqkd/secprops.hpp"

namespace dmqkd {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitPropertyFailure = 2, kExitModelValidity = 3 };

inline constexpr std::uint64_t kMinMcFrames = 10'000;

/// Thrown for command-line misuse that is not a configuration error.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Maps library exceptions onto exit codes, reporting them on `err`.
template <typename F>
int run_guarded(std::ostream &err, F &&fn) {
    try {
        return fn();
    } catch (const ModelValidityError &e) {
        err << "model validity error: " << e.what() << '\n';
        return kExitModelValidity;
    } catch (const ParseError &e) {
        err << "parse error: " << e.what() << '\n';
    } catch (const InvalidSymbolError &e) {
        err << "invalid symbol: " << e.what() << '\n';
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << '\n';
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << '\n';
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
    }
    return kExitUsage;
}

inline RunConfig load_config_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read config '" + path.string() + "'");
    }
    if (path.extension() == ".json") {
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception &e) {
            throw ParseError(std::string("config JSON: ") + e.what());
        }
        return config_from_json(j);
    }
    return read_config(in);
}

namespace detail {

inline std::filesystem::path out_path(const RunConfig &cfg, const std::string &name) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir / name;
}

inline void write_file(const std::filesystem::path &p, const std::string &content) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw UsageError("cannot write '" + p.string() + "'");
    }
    f << content;
}

inline std::string fixed(double v, int prec) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

}  // namespace detail

inline int cmd_write_defaults(const std::filesystem::path &path, std::ostream &out) {
    RunConfig defaults;
    if (path.extension() == ".json") {
        detail::write_file(path, config_to_json(defaults).dump(2) + "\n");
    } else {
        detail::write_file(path, config_to_text(defaults));
    }
    out << "wrote " << path.string() << '\n';
    return kExitOk;
}

/// Writes schedule.txt and schedule.json and prints the phase table.
inline int cmd_encode(const RunConfig &cfg, std::istream &stream, std::ostream &out) {
    cfg.validate();
    const auto symbols = parse_symbol_stream(stream);
    if (symbols.empty()) {
        throw UsageError("symbol stream is empty");
    }
    const DecoyTable table = cfg.intensities.table();
    const WaveformSchedule sched = compile_schedule(symbols, cfg.timing, cfg.calibration, table);

    out << "index symbol phi12_rad phi23_rad v12_V v23_V\n";
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const PhasePair pp = encode_symbol(symbols[i], table);
        out << i << ' ' << symbol_token(symbols[i]) << ' ' << detail::fixed(pp.phi12.value(), 6) << ' '
            << detail::fixed(pp.phi23.value(), 6) << ' '
            << detail::fixed(voltage_for_phase(pp.phi12, cfg.calibration), 6) << ' '
            << detail::fixed(voltage_for_phase(pp.phi23, cfg.calibration), 6) << '\n';
    }
    detail::write_file(detail::out_path(cfg, "schedule.txt"), schedule_to_text(sched));
    detail::write_file(detail::out_path(cfg, "schedule.json"), schedule_to_json(sched).dump(2) + "\n");
    out << symbols.size() << " symbols, " << sched.events.size() << " events written to " << cfg.out_dir << '\n';
    return kExitOk;
}

/// Writes sweep.csv; prints the cutoff and the rate at 15 dB.
inline int cmd_sweep(const RunConfig &cfg, std::ostream &out) {
    cfg.validate();
    const SweepResult res = sweep_loss(cfg.sweep.min_db, cfg.sweep.max_db, cfg.sweep.step_db, cfg.link, cfg.intensities);
    std::ostringstream csv;
    write_sweep_csv(csv, res);
    detail::write_file(detail::out_path(cfg, "sweep.csv"), csv.str());

    LinkParams at15 = cfg.link;
    at15.loss_db = 15.0;
    const RateBreakdown r15 = analytic_rate(at15, cfg.intensities);
    out << res.points.size() << " points written to " << (std::filesystem::path(cfg.out_dir) / "sweep.csv").string()
        << '\n';
    if (res.cutoff_db) {
        out << "cutoff_db " << *res.cutoff_db << '\n';
    } else {
        out << "cutoff_db none\n";
    }
    out << "r_bps_at_15db " << r15.r_bps << '\n';
    return kExitOk;
}

inline DecoyGains empirical_decoy_gains(const TallyCounts &t) {
    auto g = [&](Slot s) { return GainQber{t[s].gain(), t[s].qber()}; };
    return {g(Slot::z_signal), g(Slot::z_decoy), g(Slot::z_vacuum)};
}

/// Writes tallies.json, tallies.csv, analytic.csv and mc_report.json.
inline int cmd_mc(const RunConfig &cfg, std::ostream &out) {
    cfg.validate();
    if (cfg.mc.frames < kMinMcFrames) {
        throw UsageError("mc_frames must be at least " + std::to_string(kMinMcFrames));
    }
    const TallyCounts t = simulate_frames_mc(cfg.mc.frames, cfg.link, cfg.intensities, cfg.mix, cfg.mc.seed, cfg.mc.workers);
    const auto cmp = compare_to_analytic(t, cfg.link, cfg.intensities);

    json slots = json::array();
    for (const auto &c : cmp) {
        slots.push_back({{"class", std::string(to_string(class_of(c.slot)))},
                         {"basis", std::string(to_string(basis_of(c.slot)))},
                         {"empirical", {{"gain", c.tally.gain()}, {"qber", c.tally.qber()}}},
                         {"analytic", gain_to_json(c.analytic)},
                         {"sigma_gain", c.sigma_q},
                         {"sigma_qber", c.sigma_e},
                         {"z_gain", c.z_q},
                         {"z_qber", c.z_e}});
    }
    const RateBreakdown analytic = analytic_rate(cfg.link, cfg.intensities);
    const RateBreakdown empirical = secure_key_rate(empirical_decoy_gains(t), cfg.link, cfg.intensities);
    json report = {{"seed", cfg.mc.seed},
                   {"frames", cfg.mc.frames},
                   {"loss_db", cfg.link.loss_db},
                   {"slots", std::move(slots)},
                   {"bounds",
                    {{"empirical", rate_to_json(empirical)},
                     {"analytic", rate_to_json(analytic)},
                     {"delta_y0_l", empirical.y0_l - analytic.y0_l},
                     {"delta_y1_l", empirical.y1_l - analytic.y1_l},
                     {"delta_e1_u", empirical.e1_u - analytic.e1_u},
                     {"delta_r_bps", empirical.r_bps - analytic.r_bps}}}};

    std::ostringstream tcsv, acsv;
    write_tally_csv(tcsv, t);
    write_gain_csv(acsv, cfg.link, cfg.intensities);
    detail::write_file(detail::out_path(cfg, "tallies.json"), tally_to_json(t).dump(2) + "\n");
    detail::write_file(detail::out_path(cfg, "tallies.csv"), tcsv.str());
    detail::write_file(detail::out_path(cfg, "analytic.csv"), acsv.str());
    detail::write_file(detail::out_path(cfg, "mc_report.json"), report.dump(2) + "\n");

    out << "slot                sent      detected  errors    z_gain   z_qber\n";
    for (const auto &c : cmp) {
        out << std::left << std::setw(16) << slot_key(c.slot) << std::right << std::setw(10) << c.tally.sent
            << std::setw(10) << c.tally.detected << std::setw(10) << c.tally.errors << std::setw(9)
            << detail::fixed(c.z_q, 2) << std::setw(9) << detail::fixed(c.z_e, 2) << '\n';
    }
    out << "y1_l empirical " << empirical.y1_l << " analytic " << analytic.y1_l << '\n';
    return kExitOk;
}

/// Writes verify.json. Exit status 2 when any property fails.
inline int cmd_verify(const RunConfig &cfg, std::ostream &out, bool negative_control = false) {
    cfg.validate();
    SecurityConfig sc;
    sc.seed = cfg.mc.seed;
    sc.phase_samples = cfg.verify.samples;
    sc.amplitude_draws = cfg.verify.draws;
    const SecurityReport rep = negative_control ? run_security_suite(sc, correlated_neighbour_sampler())
                                                : run_security_suite(sc);
    json j = report_to_json(rep);
    j["negative_control"] = negative_control;
    detail::write_file(detail::out_path(cfg, "verify.json"), j.dump(2) + "\n");
    for (const auto &p : rep.properties) {
        out << (p.passed ? "PASS " : "FAIL ") << p.name << '\n';
    }
    return rep.all_passed() ? kExitOk : kExitPropertyFailure;
}

}  // namespace dmqkd
