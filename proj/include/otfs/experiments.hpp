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

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "otfs/channel.hpp"
#include "otfs/link.hpp"
#include "otfs/metrics.hpp"
#include "otfs/random.hpp"
#include "otfs/receiver.hpp"

namespace otfs {

/// Maximum Doppler shift for a relative speed: v_max = f_c V / (3.6 C).
inline double velocity_to_doppler(double speed_kmh, double carrier_hz) {
    return carrier_hz * speed_kmh / (3.6 * kSpeedOfLight);
}

inline double doppler_to_velocity(double doppler_hz, double carrier_hz) {
    return doppler_hz * 3.6 * kSpeedOfLight / carrier_hz;
}

/// Raised for malformed or infeasible experiment descriptions.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct PdpEntry {
    double delay_ns = 0.0;
    double power_db = 0.0;
    bool operator==(const PdpEntry&) const = default;
};

/// A parameter sweep. Cells are the cartesian product of the four axes,
/// enumerated with M outermost, then v_max, then SNR, then Q.
struct ExperimentSpec {
    std::string name = "custom";
    std::vector<std::size_t> antennas{200};
    std::vector<double> snr_db{1.0};
    std::vector<double> max_doppler_hz{0.0};
    std::vector<std::size_t> delay_bins{128};
    std::vector<WindowMode> window_modes{WindowMode::rect, WindowMode::rdc};
    std::size_t doppler_bins = 64;
    std::optional<std::size_t> block_size; // when set, N = block_size / M
    double subcarrier_spacing_hz = 15e3;
    double carrier_hz = 5.9e9;
    double sample_period_s = 1.0 / (330 * 15e3);
    std::size_t blocks = 5;
    std::optional<std::size_t> pilot_delay; // default M/2
    unsigned qam_order = 4;
    double rdc_clip = 0.1;
    std::string pdp = "EVA"; // "EVA" or "custom"
    std::vector<PdpEntry> pdp_taps;
    std::size_t trials = 50;
    std::uint64_t master_seed = 1;

    bool operator==(const ExperimentSpec&) const = default;

    std::size_t doppler_bins_for(std::size_t delay) const {
        return block_size ? *block_size / delay : doppler_bins;
    }

    std::vector<PdpTap> pdp_profile() const {
        if (pdp == "EVA")
            return eva_profile();
        std::vector<PdpTap> taps;
        for (const auto& e : pdp_taps)
            taps.push_back({e.delay_ns * 1e-9, e.power_db});
        return taps;
    }

    std::size_t cell_count() const {
        return delay_bins.size() * max_doppler_hz.size() * snr_db.size() * antennas.size();
    }

    void validate() const {
        auto fail = [](const std::string& msg) { throw ConfigError("invalid experiment: " + msg); };
        if (trials == 0)
            fail("trials must be at least 1");
        if (blocks == 0)
            fail("blocks must be at least 1");
        if (!(sample_period_s > 0.0))
            fail("sample_period_s must be positive");
        if (!(rdc_clip > 0.0))
            fail("rdc_clip must be positive");
        if (qam_order != 4 && qam_order != 16 && qam_order != 64)
            fail("qam_order must be 4, 16 or 64");
        if (pdp != "EVA" && pdp != "custom")
            fail("pdp must be \"EVA\" or a list of [delay_ns, power_db] pairs");
        if (pdp == "custom" && pdp_taps.empty())
            fail("custom pdp has no taps");
        if (!block_size && doppler_bins == 0)
            fail("doppler_bins must be at least 1");
        for (auto q : antennas)
            if (q == 0)
                fail("antenna counts must be positive");
        for (double v : max_doppler_hz)
            if (!(v >= 0.0) || !std::isfinite(v))
                fail("max_doppler_hz values must be finite and non-negative");
        for (double s : snr_db)
            if (!std::isfinite(s))
                fail("snr_db values must be finite");
        std::size_t taps = 0;
        try {
            taps = discretize_pdp(pdp_profile(), sample_period_s).taps();
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
        for (auto m : delay_bins) {
            if (m == 0)
                fail("delay_bins values must be positive");
            if (block_size && (*block_size % m != 0 || *block_size / m == 0))
                fail("block_size " + std::to_string(*block_size) + " is not a multiple of M=" + std::to_string(m));
            if (taps > m)
                fail("channel length L=" + std::to_string(taps) + " exceeds M=" + std::to_string(m));
            if (pilot_delay && *pilot_delay >= m)
                fail("pilot_delay must lie in [0, M-1] for M=" + std::to_string(m));
        }
    }
};

struct Cell {
    std::size_t index = 0;
    std::size_t antennas = 0;
    std::size_t delay_bins = 0;
    std::size_t doppler_bins = 0;
    double max_doppler_hz = 0.0;
    double snr_db = 0.0;
};

inline std::vector<Cell> enumerate_cells(const ExperimentSpec& spec) {
    std::vector<Cell> cells;
    for (auto m : spec.delay_bins)
        for (double v : spec.max_doppler_hz)
            for (double s : spec.snr_db)
                for (auto q : spec.antennas)
                    cells.push_back({cells.size(), q, m, spec.doppler_bins_for(m), v, s});
    return cells;
}

inline LinkConfig link_config(const ExperimentSpec& spec, const Cell& cell) {
    LinkConfig cfg;
    cfg.delay_bins = cell.delay_bins;
    cfg.doppler_bins = cell.doppler_bins;
    cfg.blocks = spec.blocks;
    cfg.antennas = cell.antennas;
    cfg.pilot_delay = spec.pilot_delay;
    cfg.max_doppler_hz = cell.max_doppler_hz;
    cfg.sample_period_s = spec.sample_period_s;
    cfg.snr_db = cell.snr_db;
    cfg.qam_order = spec.qam_order;
    cfg.rdc_clip = spec.rdc_clip;
    cfg.pdp = spec.pdp_profile();
    return cfg;
}

/// Trial seed: derive_seed(master_seed, {cell index, trial index}).
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t cell, std::size_t trial) {
    return derive_seed(master_seed, {cell, trial});
}

struct MetricRecord {
    std::size_t antennas = 0;
    std::size_t delay_bins = 0;
    std::size_t doppler_bins = 0;
    double max_doppler_hz = 0.0;
    double snr_db = 0.0;
    WindowMode window_mode = WindowMode::rect;
    std::uint64_t seed = 0;
    double sinr_linear = 0.0;
    double sinr_db = 0.0;
    double ber = 0.0;
    std::size_t bits_counted = 0;
    std::size_t trials = 0;
    double ci_halfwidth_db = 0.0;
};

inline constexpr const char* kCsvHeader =
    "Q,M,N,vmax_hz,snr_db,window_mode,seed,sinr_linear,sinr_db,ber,bits_counted,trials,ci_halfwidth_db";

/// Reduces per-trial outcomes of one cell and mode. SINR is averaged in the
/// linear domain; the half-width uses the spread of per-trial dB values.
inline MetricRecord reduce_trials(const Cell& cell, WindowMode mode, std::uint64_t seed,
                                  std::span<const ModeOutcome> trials) {
    MetricRecord r;
    r.antennas = cell.antennas;
    r.delay_bins = cell.delay_bins;
    r.doppler_bins = cell.doppler_bins;
    r.max_doppler_hz = cell.max_doppler_hz;
    r.snr_db = cell.snr_db;
    r.window_mode = mode;
    r.seed = seed;
    r.trials = trials.size();
    double sinr_sum = 0.0;
    double db_sum = 0.0;
    double db_sq = 0.0;
    std::size_t errors = 0;
    for (const auto& t : trials) {
        sinr_sum += t.sinr_linear;
        const double db = to_db(t.sinr_linear);
        db_sum += db;
        db_sq += db * db;
        errors += t.bit_errors;
        r.bits_counted += t.bits;
    }
    const auto n = static_cast<double>(trials.size());
    r.sinr_linear = sinr_sum / n;
    r.sinr_db = to_db(r.sinr_linear);
    r.ber = r.bits_counted > 0 ? static_cast<double>(errors) / static_cast<double>(r.bits_counted) : 0.0;
    if (trials.size() > 1) {
        const double var = std::max(0.0, (db_sq - db_sum * db_sum / n) / (n - 1.0));
        r.ci_halfwidth_db = 1.96 * std::sqrt(var / n);
    }
    return r;
}

struct ResultTable {
    ExperimentSpec spec;
    std::vector<MetricRecord> records; // cell-major, modes in spec order
};

/// Runs every (cell, trial) job on up to `workers` threads. Each job owns
/// its seed and its output slot, and the reduction walks the slots in a
/// fixed order, so the table does not depend on scheduling.
inline ResultTable run_experiment(const ExperimentSpec& spec, std::size_t workers = 1) {
    spec.validate();
    const auto cells = enumerate_cells(spec);
    const std::size_t jobs = cells.size() * spec.trials;
    std::vector<std::vector<ModeOutcome>> outcomes(jobs);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            try {
                const Cell& cell = cells[j / spec.trials];
                const std::size_t trial = j % spec.trials;
                outcomes[j] = simulate_trial(link_config(spec, cell), spec.window_modes,
                                             trial_seed(spec.master_seed, cell.index, trial));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = jobs;
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(workers, jobs));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);

    ResultTable table{spec, {}};
    for (const auto& cell : cells) {
        for (std::size_t m = 0; m < spec.window_modes.size(); ++m) {
            std::vector<ModeOutcome> per_trial;
            for (std::size_t t = 0; t < spec.trials; ++t)
                per_trial.push_back(outcomes[cell.index * spec.trials + t][m]);
            table.records.push_back(reduce_trials(cell, spec.window_modes[m], spec.master_seed, per_trial));
        }
    }
    return table;
}

// ------------------------------------------------------------------------
// Presets
// ------------------------------------------------------------------------

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig1", "fig2", "fig3"};
    return names;
}

inline std::string preset_description(const std::string& name) {
    if (name == "fig1")
        return "SINR vs number of BS antennas, SNR 1 dB, v_max in {0, 5.5, 10.9} kHz, rect and rdc";
    if (name == "fig2")
        return "SINR vs input SNR for M in {64, 128, 256} at MN = 8192, Q = 200";
    if (name == "fig3")
        return "BER vs input SNR, Q = 200, 4-QAM, v_max in {0, 5.5, 10.9} kHz, rect and rdc";
    throw ConfigError("unknown preset '" + name + "'");
}

/// Built-in sweeps. `quick` shrinks the grids and trial counts to desk scale.
inline ExperimentSpec preset(const std::string& name, bool quick = false) {
    ExperimentSpec s;
    s.name = name;
    s.max_doppler_hz = {0.0, 5.5e3, 10.9e3};
    if (name == "fig1") {
        s.snr_db = {1.0};
        s.antennas.clear();
        for (std::size_t q = 10; q <= 200; q += 10)
            s.antennas.push_back(q);
        s.trials = 50;
        if (quick) {
            s.antennas = {16, 32, 64, 128};
            s.trials = 4;
        }
    } else if (name == "fig2") {
        s.antennas = {200};
        s.delay_bins = {64, 128, 256};
        s.block_size = 8192;
        s.snr_db = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
        s.trials = 50;
        if (quick) {
            s.snr_db = {0.0, 10.0, 20.0};
            s.trials = 2;
        }
    } else if (name == "fig3") {
        s.antennas = {200};
        s.snr_db.clear();
        for (int snr = -24; snr <= -8; snr += 2)
            s.snr_db.push_back(snr);
        s.trials = 25; // 25 frames x 81920 bits > 2e6 bits per cell
        if (quick)
            s.trials = 2;
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected fig1, fig2 or fig3)");
    }
    return s;
}

// ------------------------------------------------------------------------
// CSV and config files
// ------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace detail

inline void write_csv(const ResultTable& table, std::ostream& os) {
    os << kCsvHeader << '\n';
    for (const auto& r : table.records) {
        using detail::format_double;
        os << r.antennas << ',' << r.delay_bins << ',' << r.doppler_bins << ',' << format_double(r.max_doppler_hz)
           << ',' << format_double(r.snr_db) << ',' << to_string(r.window_mode) << ',' << r.seed << ','
           << format_double(r.sinr_linear) << ',' << format_double(r.sinr_db) << ',' << format_double(r.ber) << ','
           << r.bits_counted << ',' << r.trials << ',' << format_double(r.ci_halfwidth_db) << '\n';
    }
}

inline void write_csv(const ResultTable& table, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(table, os);
    if (!os)
        throw std::runtime_error("write to '" + path + "' failed");
}

inline nlohmann::ordered_json spec_to_json(const ExperimentSpec& s) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["antennas"] = s.antennas;
    j["snr_db"] = s.snr_db;
    j["max_doppler_hz"] = s.max_doppler_hz;
    j["delay_bins"] = s.delay_bins;
    std::vector<std::string> modes;
    for (auto m : s.window_modes)
        modes.emplace_back(to_string(m));
    j["window_modes"] = modes;
    j["doppler_bins"] = s.doppler_bins;
    j["block_size"] = s.block_size ? nlohmann::ordered_json(*s.block_size) : nlohmann::ordered_json(nullptr);
    j["subcarrier_spacing_hz"] = s.subcarrier_spacing_hz;
    j["carrier_hz"] = s.carrier_hz;
    j["sample_period_s"] = s.sample_period_s;
    j["blocks"] = s.blocks;
    j["pilot_delay"] = s.pilot_delay ? nlohmann::ordered_json(*s.pilot_delay) : nlohmann::ordered_json(nullptr);
    j["qam_order"] = s.qam_order;
    j["rdc_clip"] = s.rdc_clip;
    if (s.pdp == "EVA") {
        j["pdp"] = "EVA";
    } else {
        auto taps = nlohmann::ordered_json::array();
        for (const auto& t : s.pdp_taps)
            taps.push_back({t.delay_ns, t.power_db});
        j["pdp"] = taps;
    }
    j["trials"] = s.trials;
    j["master_seed"] = s.master_seed;
    return j;
}

inline std::string write_spec(const ExperimentSpec& s) { return spec_to_json(s).dump(2) + "\n"; }

/// Parses a JSON experiment description. Keys not listed are rejected;
/// keys left out keep their defaults.
inline ExperimentSpec parse_spec(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");

    ExperimentSpec s;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "name") {
                s.name = value.get<std::string>();
            } else if (key == "antennas") {
                s.antennas = value.get<std::vector<std::size_t>>();
            } else if (key == "snr_db") {
                s.snr_db = value.get<std::vector<double>>();
            } else if (key == "max_doppler_hz") {
                s.max_doppler_hz = value.get<std::vector<double>>();
            } else if (key == "delay_bins") {
                s.delay_bins = value.get<std::vector<std::size_t>>();
            } else if (key == "window_modes") {
                s.window_modes.clear();
                for (const auto& m : value.get<std::vector<std::string>>())
                    s.window_modes.push_back(parse_window_mode(m));
            } else if (key == "doppler_bins") {
                s.doppler_bins = value.get<std::size_t>();
            } else if (key == "block_size") {
                s.block_size = value.is_null() ? std::nullopt : std::optional(value.get<std::size_t>());
            } else if (key == "subcarrier_spacing_hz") {
                s.subcarrier_spacing_hz = value.get<double>();
            } else if (key == "carrier_hz") {
                s.carrier_hz = value.get<double>();
            } else if (key == "sample_period_s") {
                s.sample_period_s = value.get<double>();
            } else if (key == "blocks") {
                s.blocks = value.get<std::size_t>();
            } else if (key == "pilot_delay") {
                s.pilot_delay = value.is_null() ? std::nullopt : std::optional(value.get<std::size_t>());
            } else if (key == "qam_order") {
                s.qam_order = value.get<unsigned>();
            } else if (key == "rdc_clip") {
                s.rdc_clip = value.get<double>();
            } else if (key == "pdp") {
                if (value.is_string()) {
                    s.pdp = value.get<std::string>();
                    s.pdp_taps.clear();
                } else {
                    s.pdp = "custom";
                    s.pdp_taps.clear();
                    for (const auto& t : value) {
                        if (!t.is_array() || t.size() != 2)
                            throw ConfigError("pdp entries must be [delay_ns, power_db] pairs");
                        s.pdp_taps.push_back({t[0].get<double>(), t[1].get<double>()});
                    }
                }
            } else if (key == "trials") {
                s.trials = value.get<std::size_t>();
            } else if (key == "master_seed") {
                s.master_seed = value.get<std::uint64_t>();
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("bad value for config key '" + key + "': " + e.what());
        } catch (const std::invalid_argument& e) {
            throw ConfigError("bad value for config key '" + key + "': " + e.what());
        }
    }
    s.validate();
    return s;
}

inline ExperimentSpec read_spec(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_spec(ss.str());
}

} // namespace otfs
