// SPDX-License-Identifier: Apache-2.0
//
// otfs-trmrc: link-level simulator for CP-free OTFS with time-reversal MRC
// Copyright (C) 2026 The otfs-trmrc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// otfs_sim: command-line front end for the link-level sweeps.
//
//   otfs_sim run --preset fig1 --quick --out results
//   otfs_sim run --config sweep.json --seed 7 --threads 4
//   otfs_sim presets
//   otfs_sim show fig2
//   otfs_sim doppler --kmh 2000 --fc 5.9e9
//
// Exit codes: 0 success, 2 invalid arguments or configuration, 3 runtime
// failure.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "otfs/experiments.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string default_out_dir() {
    const char* env = std::getenv("OTFS_OUT_DIR");
    return env && *env ? env : "results";
}

struct RunOptions {
    std::string config;
    std::string preset;
    bool quick = false;
    std::string out_dir = default_out_dir();
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
};

int run_command(const RunOptions& opt) {
    otfs::ExperimentSpec spec = opt.config.empty() ? otfs::preset(opt.preset, opt.quick) : otfs::read_spec(opt.config);
    if (opt.seed)
        spec.master_seed = *opt.seed;
    if (opt.trials)
        spec.trials = *opt.trials;
    spec.validate();

    std::cerr << "otfs_sim: " << spec.name << ": " << spec.cell_count() << " cells x " << spec.trials
              << " trials on " << opt.threads << " thread(s)\n";
    const auto start = std::chrono::steady_clock::now();
    const otfs::ResultTable table = otfs::run_experiment(spec, opt.threads);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    fs::create_directories(opt.out_dir);
    const fs::path csv = fs::path(opt.out_dir) / (spec.name + ".csv");
    const fs::path manifest = fs::path(opt.out_dir) / (spec.name + ".manifest.json");
    otfs::write_csv(table, csv.string());

    nlohmann::ordered_json m;
    m["tool"] = "otfs_sim";
    m["version"] = OTFS_TRMRC_VERSION;
    m["compiler"] = __VERSION__;
    m["timestamp_utc"] = utc_timestamp();
    m["elapsed_s"] = elapsed;
    m["threads"] = opt.threads;
    m["master_seed"] = spec.master_seed;
    m["seed_derivation"] = "trial seed = derive_seed(master_seed, {cell, trial}); data/channel/noise streams 1/2/3";
    m["sample_period_s"] = spec.sample_period_s;
    m["sample_rate_hz"] = 1.0 / spec.sample_period_s;
    m["csv"] = csv.filename().string();
    m["rows"] = table.records.size();
    m["config"] = otfs::spec_to_json(spec);
    std::ofstream os(manifest);
    os << m.dump(2) << '\n';
    if (!os)
        throw std::runtime_error("cannot write " + manifest.string());

    std::cout << csv.string() << '\n' << manifest.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Link-level simulator for CP-free OTFS with time-reversal MRC"};
    app.require_subcommand(1);
    app.set_version_flag("--version", OTFS_TRMRC_VERSION);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run a sweep and write CSV plus manifest");
    auto* config_opt = run_cmd->add_option("--config", run.config, "JSON experiment description")->check(CLI::ExistingFile);
    auto* preset_opt = run_cmd->add_option("--preset", run.preset, "Built-in sweep (see 'presets')");
    config_opt->excludes(preset_opt);
    run_cmd->add_flag("--quick", run.quick, "Use the reduced preset grid");
    run_cmd->add_option("--out", run.out_dir, "Output directory (default: $OTFS_OUT_DIR or ./results)");
    run_cmd->add_option("--seed", run.seed, "Override the master seed");
    run_cmd->add_option("--trials", run.trials, "Override the trial count")->check(CLI::PositiveNumber);
    run_cmd->add_option("--threads", run.threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* presets_cmd = app.add_subcommand("presets", "List built-in sweeps");

    std::string show_name;
    bool show_quick = false;
    auto* show_cmd = app.add_subcommand("show", "Print a preset as a JSON config");
    show_cmd->add_option("name", show_name, "Preset name")->required();
    show_cmd->add_flag("--quick", show_quick, "Reduced grid");

    double kmh = 0.0;
    double fc = 5.9e9;
    auto* doppler_cmd = app.add_subcommand("doppler", "Maximum Doppler shift for a relative speed");
    doppler_cmd->add_option("--kmh", kmh, "Relative speed in km/h")->required();
    doppler_cmd->add_option("--fc", fc, "Carrier frequency in Hz (default 5.9e9)");

    try {
        app.parse(argc, argv);
        if (*run_cmd && run.config.empty() == run.preset.empty())
            throw CLI::ValidationError("run", "exactly one of --config or --preset is required");
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run_cmd)
            return run_command(run);
        if (*presets_cmd) {
            for (const auto& name : otfs::preset_names())
                std::cout << name << "  " << otfs::preset_description(name) << '\n';
            return 0;
        }
        if (*show_cmd) {
            std::cout << otfs::write_spec(otfs::preset(show_name, show_quick));
            return 0;
        }
        if (*doppler_cmd) {
            if (!(fc > 0.0) || !(kmh >= 0.0))
                throw otfs::ConfigError("speed must be non-negative and carrier positive");
            std::cout << otfs::detail::format_double(otfs::velocity_to_doppler(kmh, fc)) << '\n';
            return 0;
        }
    } catch (const otfs::ConfigError& e) {
        std::cerr << "otfs_sim: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "otfs_sim: error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
