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

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "otfs/channel.hpp"
#include "otfs/grid.hpp"
#include "otfs/metrics.hpp"
#include "otfs/qam.hpp"
#include "otfs/random.hpp"
#include "otfs/receiver.hpp"

namespace otfs {

/// One uplink: single-antenna user, Q receive antennas, B_blk OTFS blocks
/// per frame with silence before and after the frame.
struct LinkConfig {
    std::size_t delay_bins = 128;
    std::size_t doppler_bins = 64;
    std::size_t blocks = 5;
    std::size_t antennas = 200;
    std::optional<std::size_t> pilot_delay; // default M/2
    double max_doppler_hz = 0.0;
    double sample_period_s = 1.0 / (330 * 15e3);
    std::optional<double> snr_db; // unset: noiseless
    unsigned qam_order = 4;
    double rdc_clip = 0.1;
    std::vector<PdpTap> pdp = eva_profile();

    std::size_t resolved_pilot_delay() const { return pilot_delay.value_or(delay_bins / 2); }

    void validate() const {
        if (delay_bins == 0 || doppler_bins == 0 || blocks == 0 || antennas == 0)
            throw std::invalid_argument("link: M, N, blocks and antennas must be positive");
        if (resolved_pilot_delay() >= delay_bins)
            throw std::invalid_argument("link: pilot delay D must lie in [0, M-1]");
        if (!(sample_period_s > 0.0))
            throw std::invalid_argument("link: sample period must be positive");
        if (!(max_doppler_hz >= 0.0))
            throw std::invalid_argument("link: maximum Doppler must be non-negative");
        const std::size_t taps = discretize_pdp(pdp, sample_period_s).taps();
        if (taps > delay_bins)
            throw std::invalid_argument("link: channel length L=" + std::to_string(taps) +
                                        " exceeds the symbol length M=" + std::to_string(delay_bins));
    }
};

struct LinkRun {
    std::vector<std::uint8_t> bits;
    std::vector<DelayDopplerGrid> truth;
    std::vector<std::vector<DelayDopplerGrid>> estimates; // one list per requested mode
};

/// Simulates one frame. Data, channel and noise come from independent
/// sub-streams of `trial_seed`, and every requested window mode is applied
/// to the same combiner output.
inline LinkRun run_link(const LinkConfig& cfg, std::span<const WindowMode> modes, std::uint64_t trial_seed) {
    cfg.validate();
    const Constellation constellation(cfg.qam_order);
    const std::size_t block_len = cfg.delay_bins * cfg.doppler_bins;

    LinkRun run;
    Rng data_rng(derive_seed(trial_seed, {static_cast<std::uint64_t>(Stream::data)}));
    run.bits.resize(cfg.blocks * block_len * constellation.bits_per_symbol());
    for (auto& b : run.bits)
        b = data_rng.bit();
    const cvec symbols = constellation.map(run.bits);
    for (std::size_t b = 0; b < cfg.blocks; ++b)
        run.truth.emplace_back(cfg.delay_bins, cfg.doppler_bins,
                               cvec(symbols.begin() + static_cast<std::ptrdiff_t>(b * block_len),
                                    symbols.begin() + static_cast<std::ptrdiff_t>((b + 1) * block_len)));
    const TimeFrame tx = otfs_modulate_frame(run.truth);

    const PowerDelayProfile pdp = discretize_pdp(cfg.pdp, cfg.sample_period_s);
    Rng channel_rng(derive_seed(trial_seed, {static_cast<std::uint64_t>(Stream::channel)}));
    const PathSet paths = sample_pathset(pdp, cfg.max_doppler_hz, cfg.sample_period_s, cfg.antennas, channel_rng);

    const double noise_var = cfg.snr_db ? NoiseSpec::from_snr_db(*cfg.snr_db).variance : 0.0;
    const std::uint64_t noise_seed = derive_seed(trial_seed, {static_cast<std::uint64_t>(Stream::noise)});
    const std::size_t pilot = cfg.resolved_pilot_delay();
    TrMrcCombiner combiner(cfg.delay_bins, cfg.blocks * cfg.doppler_bins, paths.taps(), pilot);
    for (std::size_t q = 0; q < cfg.antennas; ++q) {
        Rng noise_rng(derive_seed(noise_seed, {q}));
        const cvec rx = propagate(tx.samples, paths.antenna(q), paths.taps(), cfg.sample_period_s, noise_var, noise_rng);
        combiner.accumulate(rx, paths.antenna(q), cfg.sample_period_s);
    }

    for (WindowMode mode : modes) {
        cvec combined;
        if (mode == WindowMode::rdc) {
            const RdcWindow window =
                make_rdc_window(cfg.delay_bins, pilot, cfg.max_doppler_hz, cfg.sample_period_s, cfg.rdc_clip);
            combined = combiner.output(&window);
        } else {
            combined = combiner.output();
        }
        run.estimates.push_back(demodulate_blocks(combined, cfg.delay_bins, cfg.doppler_bins, cfg.blocks));
    }
    return run;
}

struct ModeOutcome {
    WindowMode mode = WindowMode::rect;
    cplx gain;
    double sinr_linear = 0.0;
    std::size_t bit_errors = 0;
    std::size_t bits = 0;
};

/// Divides the estimates by the frame's least-squares scalar before hard
/// decisions (genie gain normalization).
inline std::vector<std::uint8_t> decide_bits(std::span<const DelayDopplerGrid> estimate, cplx gain,
                                             const Constellation& constellation) {
    cvec scaled;
    for (const auto& g : estimate)
        for (const auto& v : g.data())
            scaled.push_back(v / gain);
    return constellation.demap(scaled);
}

inline std::vector<ModeOutcome> simulate_trial(const LinkConfig& cfg, std::span<const WindowMode> modes,
                                               std::uint64_t trial_seed) {
    const LinkRun run = run_link(cfg, modes, trial_seed);
    const Constellation constellation(cfg.qam_order);
    std::vector<ModeOutcome> out;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const SinrEstimate est = sinr_estimate(run.estimates[i], run.truth);
        ModeOutcome mo;
        mo.mode = modes[i];
        mo.gain = est.gain;
        mo.sinr_linear = est.sinr_linear;
        const auto decided = decide_bits(run.estimates[i], est.gain, constellation);
        mo.bit_errors = bit_errors(decided, run.bits);
        mo.bits = run.bits.size();
        out.push_back(mo);
    }
    return out;
}

} // namespace otfs
