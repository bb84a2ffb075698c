// Copyright 2026 The spinent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// spinent: command-line driver for the simulator.
//
//   spinent run --config p1_spin_half
//   spinent scan-b --config fig-contour scan.fields=2:5:0.1 --out-dir out
//   spinent validate-config --config my.conf

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "spinent/experiments.hpp"

#ifndef SPINENT_CONFIG_DIR
#define SPINENT_CONFIG_DIR "configs"
#endif

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

// A bare name like "p1_spin_half" resolves to a shipped template.
std::string resolve_config_path(const std::string& arg) {
    if (fs::exists(arg)) return arg;
    if (arg.find('/') == std::string::npos) {
        for (const fs::path& dir : {fs::path("configs"), fs::path(SPINENT_CONFIG_DIR)}) {
            for (const char* ext : {".conf", ""}) {
                const fs::path p = dir / (arg + ext);
                if (fs::exists(p)) return p.string();
            }
        }
    }
    throw spinent::ConfigError(arg, 0, "config file or template not found");
}

struct Options {
    std::string config;
    std::vector<std::string> overrides;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

// Experiments each subcommand may run; the first is used when the config
// does not name one.
const std::vector<std::string>& allowed_experiments(const std::string& sub) {
    static const std::map<std::string, std::vector<std::string>> table = {
        {"run", {"p1", "p2", "effective"}},
        {"scan-b", {"scan_b"}},
        {"disorder", {"disorder"}},
        {"dephasing", {"dephasing"}},
        {"nonmarkovian", {"nonmarkovian"}},
        {"demo-measures", {"measures-demo"}},
        {"validate-config", {}},
    };
    return table.at(sub);
}

spinent::Config load_config(const std::string& sub, const Options& o) {
    spinent::Config cfg = o.config.empty() ? spinent::Config{} : spinent::Config::load(resolve_config_path(o.config));
    for (const auto& ov : o.overrides) cfg.apply_override(ov);
    if (o.seed) cfg.set("seed", std::to_string(*o.seed), "--seed");
    const auto& allowed = allowed_experiments(sub);
    if (allowed.empty()) return cfg;
    if (!cfg.has("experiment")) {
        cfg.set("experiment", allowed.front(), "subcommand");
    } else {
        const auto& e = cfg.entry("experiment");
        if (std::find(allowed.begin(), allowed.end(), e.value) == allowed.end()) {
            throw spinent::ConfigError(e.source, e.line,
                                       "experiment '" + e.value + "' cannot run under subcommand '" + sub + "'");
        }
    }
    return cfg;
}

int execute(const std::string& sub, const Options& o) {
    spinent::ExperimentConfig x;
    try {
        x = spinent::parse_experiment(load_config(sub, o));
    } catch (const spinent::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }
    if (sub == "validate-config") {
        std::printf("ok: %s\n", spinent::to_string(x.experiment).c_str());
        return kExitOk;
    }
    const int threads = o.threads > 0 ? o.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    try {
        const auto start = std::chrono::steady_clock::now();
        const spinent::RunResult r = spinent::run_experiment(x, threads);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const auto manifest = spinent::write_run(x, r, o.out_dir, wall, threads);
        for (const auto& f : manifest["outputs"]) {
            std::printf("wrote %s\n", (fs::path(o.out_dir) / f["path"].get<std::string>()).string().c_str());
        }
        std::printf("wrote %s\n", (fs::path(o.out_dir) / (x.name + ".manifest.json")).string().c_str());
        return kExitOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spinent: entanglement generation in spin-s XX chains"};
    app.require_subcommand(1);
    Options o;
    const std::vector<std::pair<std::string, std::string>> subs = {
        {"run", "closed-chain protocol run (experiment p1, p2 or effective)"},
        {"scan-b", "boundary-field contour scan"},
        {"disorder", "disorder ensemble curves"},
        {"dephasing", "Lindblad boundary dephasing sweep"},
        {"nonmarkovian", "pseudomode heatmaps"},
        {"validate-config", "check a config without running it"},
        {"demo-measures", "information-measure sanity table"},
    };
    for (const auto& [name, help] : subs) {
        CLI::App* s = app.add_subcommand(name, help);
        s->add_option("--config", o.config, "config file, or the name of a template in configs/");
        s->add_option("overrides", o.overrides, "key=value overrides");
        if (name != "validate-config") {
            s->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
            s->add_option("--threads", o.threads, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
        }
        s->add_option("--seed", o.seed, "root seed (overrides the config)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }
    for (const auto* s : app.get_subcommands()) return execute(s->get_name(), o);
    return kExitConfig;
}
