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

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dmqkd/commands.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> loss_min, loss_max, loss_step, loss;
    std::optional<std::uint64_t> frames;
    std::optional<unsigned> workers;
};

dmqkd::RunConfig resolve(const Overrides &o) {
    dmqkd::RunConfig cfg = o.config.empty() ? dmqkd::RunConfig{} : dmqkd::load_config_file(o.config);
    if (o.seed) cfg.mc.seed = *o.seed;
    if (o.out) cfg.out_dir = *o.out;
    if (o.loss_min) cfg.sweep.min_db = *o.loss_min;
    if (o.loss_max) cfg.sweep.max_db = *o.loss_max;
    if (o.loss_step) cfg.sweep.step_db = *o.loss_step;
    if (o.loss) cfg.link.loss_db = *o.loss;
    if (o.frames) cfg.mc.frames = *o.frames;
    if (o.workers) cfg.mc.workers = *o.workers;
    return cfg;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"dmqkd: direct-modulation decoy-state QKD transmitter and link simulator"};
    app.require_subcommand(1);

    Overrides o;
    app.add_option("--config", o.config, "configuration file (key = value, or .json)");
    app.add_option("--seed", o.seed, "master seed");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--loss-min", o.loss_min, "sweep start [dB]");
    app.add_option("--loss-max", o.loss_max, "sweep end, inclusive [dB]");
    app.add_option("--loss-step", o.loss_step, "sweep step [dB]");
    app.add_option("--loss", o.loss, "channel loss for mc [dB]");
    app.add_option("--frames", o.frames, "Monte-Carlo frames");
    app.add_option("--workers", o.workers, "worker threads");

    auto *encode = app.add_subcommand("encode", "compile a symbol stream into a drive schedule");
    std::string stream_path;
    encode->add_option("stream", stream_path, "symbol stream file (tokens like Z0s Y1s Z0d Z1v)")->required();

    auto *sweep = app.add_subcommand("sweep", "key rate and QBER versus channel loss");
    auto *mc = app.add_subcommand("mc", "Monte-Carlo link simulation compared with the analytic model");

    auto *verify = app.add_subcommand("verify", "run the leakage property suite");
    bool negative_control = false;
    verify->add_flag("--negative-control", negative_control, "use a deliberately correlated neighbour-phase source");

    auto *defaults = app.add_subcommand("write-defaults", "write the default configuration");
    std::string defaults_path;
    defaults->add_option("path", defaults_path, "destination (.json for JSON)")->required();

    // Options are accepted before or after the subcommand.
    for (auto *sub : {encode, sweep, mc, verify, defaults}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return dmqkd::kExitUsage;
    }

    return dmqkd::run_guarded(std::cerr, [&]() -> int {
        if (*defaults) {
            return dmqkd::cmd_write_defaults(defaults_path, std::cout);
        }
        const dmqkd::RunConfig cfg = resolve(o);
        if (*encode) {
            std::ifstream in(stream_path);
            if (!in) {
                throw dmqkd::UsageError("cannot read symbol stream '" + stream_path + "'");
            }
            return dmqkd::cmd_encode(cfg, in, std::cout);
        }
        if (*sweep) {
            return dmqkd::cmd_sweep(cfg, std::cout);
        }
        if (*mc) {
            return dmqkd::cmd_mc(cfg, std::cout);
        }
        return dmqkd::cmd_verify(cfg, std::cout, negative_control);
    });
}
