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

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "otfs/experiments.hpp"

using namespace otfs;

namespace {

ExperimentSpec tiny_spec() {
    ExperimentSpec s;
    s.name = "tiny";
    s.antennas = {2, 5};
    s.snr_db = {0.0, 10.0};
    s.max_doppler_hz = {0.0, 2e3};
    s.delay_bins = {16};
    s.doppler_bins = 4;
    s.blocks = 2;
    s.trials = 3;
    s.pdp = "custom";
    s.pdp_taps = {{0.0, 0.0}, {400.0, -3.0}, {1000.0, -6.0}};
    s.master_seed = 42;
    return s;
}

std::string csv_of(const ResultTable& t) {
    std::ostringstream os;
    write_csv(t, os);
    return os.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_CASE("speed to Doppler mapping", "[experiments]") {
    CHECK(std::abs(velocity_to_doppler(2000.0, 5.9e9) - 10925.9) < 0.1);
    CHECK(std::abs(velocity_to_doppler(1000.0, 5.9e9) - 5463.0) < 0.1);
    CHECK(velocity_to_doppler(0.0, 5.9e9) == 0.0);
    CHECK(std::abs(doppler_to_velocity(velocity_to_doppler(437.0, 2.4e9), 2.4e9) - 437.0) < 1e-9);
}

TEST_CASE("cell enumeration order", "[experiments]") {
    ExperimentSpec s = tiny_spec();
    s.delay_bins = {16, 32};
    const auto cells = enumerate_cells(s);
    REQUIRE(cells.size() == s.cell_count());
    REQUIRE(cells.size() == 16);
    // Q fastest, then SNR, then v_max, then M
    CHECK(cells[0].antennas == 2);
    CHECK(cells[1].antennas == 5);
    CHECK(cells[2].snr_db == 10.0);
    CHECK(cells[4].max_doppler_hz == 2e3);
    CHECK(cells[8].delay_bins == 32);
    for (std::size_t i = 0; i < cells.size(); ++i)
        CHECK(cells[i].index == i);
}

TEST_CASE("block size fixes N per M", "[experiments]") {
    const auto s = preset("fig2");
    CHECK(s.doppler_bins_for(64) == 128);
    CHECK(s.doppler_bins_for(128) == 64);
    CHECK(s.doppler_bins_for(256) == 32);
    ExperimentSpec bad = s;
    bad.delay_bins = {100};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("trial seeds", "[experiments][seed]") {
    CHECK(trial_seed(1, 0, 0) == derive_seed(1, {0, 0}));
    CHECK(trial_seed(1, 0, 1) != trial_seed(1, 1, 0));
    CHECK(trial_seed(1, 3, 4) != trial_seed(2, 3, 4));
}

TEST_CASE("CSV output", "[experiments][csv]") {
    SECTION("empty sweep writes only the header") {
        ExperimentSpec s = tiny_spec();
        s.antennas.clear();
        const auto table = run_experiment(s, 2);
        CHECK(table.records.empty());
        CHECK(csv_of(table) == std::string(kCsvHeader) + "\n");
    }
    SECTION("one row per cell and window mode") {
        const auto table = run_experiment(tiny_spec(), 1);
        const std::string csv = csv_of(table);
        CHECK(line_count(csv) == 1 + 8 * 2);
        CHECK(csv.rfind(kCsvHeader, 0) == 0);
        for (const auto& r : table.records) {
            CHECK(r.trials == 3);
            CHECK(r.bits_counted == 3 * 2 * 16 * 4 * 2);
            CHECK(r.seed == 42);
            CHECK(r.ber >= 0.0);
            CHECK(r.ber <= 1.0);
            CHECK(r.ci_halfwidth_db >= 0.0);
        }
    }
    SECTION("fig1 row count") {
        const auto s = preset("fig1");
        CHECK(s.cell_count() * s.window_modes.size() == 20 * 3 * 2);
    }
    SECTION("non-finite values") {
        CHECK(detail::format_double(std::numeric_limits<double>::infinity()) == "inf");
        CHECK(detail::format_double(0.125) == "0.125");
    }
}

TEST_CASE("trial reduction", "[experiments]") {
    Cell cell{0, 4, 16, 4, 0.0, 1.0};
    std::vector<ModeOutcome> trials(2);
    trials[0].sinr_linear = 10.0;
    trials[0].bit_errors = 1;
    trials[0].bits = 100;
    trials[1].sinr_linear = 1000.0;
    trials[1].bit_errors = 3;
    trials[1].bits = 100;
    const auto r = reduce_trials(cell, WindowMode::rdc, 9, trials);
    CHECK(r.sinr_linear == 505.0); // linear mean, not dB mean
    CHECK(std::abs(r.sinr_db - 10.0 * std::log10(505.0)) < 1e-12);
    CHECK(r.ber == 0.02);
    CHECK(r.bits_counted == 200);
    // dB values 10 and 30: sd = 14.142, half-width = 1.96 sd / sqrt 2
    CHECK(std::abs(r.ci_halfwidth_db - 1.96 * std::sqrt(200.0) / std::sqrt(2.0)) < 1e-9);
}

TEST_CASE("determinism", "[experiments][seed]") {
    const ExperimentSpec s = tiny_spec();
    const std::string first = csv_of(run_experiment(s, 1));
    CHECK(csv_of(run_experiment(s, 1)) == first);
    CHECK(csv_of(run_experiment(s, 8)) == first);
    ExperimentSpec other = s;
    other.master_seed = 43;
    CHECK(csv_of(run_experiment(other, 1)) != first);
}

TEST_CASE("config parsing", "[experiments][config]") {
    SECTION("presets round-trip through JSON") {
        for (const auto& name : preset_names())
            for (bool quick : {false, true}) {
                const auto s = preset(name, quick);
                CHECK(parse_spec(write_spec(s)) == s);
            }
        const auto t = tiny_spec();
        CHECK(parse_spec(write_spec(t)) == t);
    }
    SECTION("unknown keys are named") {
        try {
            parse_spec(R"({"antennas": [4], "υmax": [10]})");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("υmax") != std::string::npos);
        }
    }
    SECTION("defaults fill missing keys") {
        const auto s = parse_spec(R"({"antennas": [8], "snr_db": [-3]})");
        CHECK(s.antennas == std::vector<std::size_t>{8});
        CHECK(s.snr_db == std::vector<double>{-3.0});
        CHECK(s.delay_bins == std::vector<std::size_t>{128});
        CHECK(s.pdp == "EVA");
    }
    SECTION("malformed input") {
        CHECK_THROWS_AS(parse_spec("{"), ConfigError);
        CHECK_THROWS_AS(parse_spec("[1, 2]"), ConfigError);
        CHECK_THROWS_AS(parse_spec(R"({"antennas": "many"})"), ConfigError);
        CHECK_THROWS_AS(parse_spec(R"({"window_modes": ["hann"]})"), ConfigError);
        CHECK_THROWS_AS(parse_spec(R"({"pdp": [[0, 0, 1]]})"), ConfigError);
        CHECK_THROWS_AS(parse_spec(R"({"trials": 0})"), ConfigError);
        CHECK_THROWS_AS(parse_spec(R"({"max_doppler_hz": [-5]})"), ConfigError);
        CHECK_THROWS_AS(read_spec("/nonexistent/config.json"), ConfigError);
    }
    SECTION("channel longer than a symbol is rejected") {
        // EVA spans 13 samples at the default rate
        CHECK_THROWS_AS(parse_spec(R"({"delay_bins": [8]})"), ConfigError);
        CHECK_NOTHROW(parse_spec(R"({"delay_bins": [16]})"));
        LinkConfig cfg;
        cfg.delay_bins = 8;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    }
}
