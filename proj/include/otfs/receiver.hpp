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

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "otfs/bessel.hpp"
#include "otfs/channel.hpp"
#include "otfs/grid.hpp"
#include "otfs/types.hpp"

namespace otfs {

enum class WindowMode { rect, rdc };

inline std::string_view to_string(WindowMode mode) { return mode == WindowMode::rect ? "rect" : "rdc"; }

inline WindowMode parse_window_mode(std::string_view s) {
    if (s == "rect")
        return WindowMode::rect;
    if (s == "rdc")
        return WindowMode::rdc;
    throw std::invalid_argument("unknown window mode '" + std::string(s) + "' (expected rect or rdc)");
}

/// Genie CSI: h_q[k, Mn+D] for k = 0..L-1.
struct CsiSnapshot {
    std::size_t symbol = 0;
    std::size_t pilot_delay = 0;
    cvec taps;
};

inline CsiSnapshot csi_snapshot(const PathSet& ps, std::size_t q, std::size_t symbol, std::size_t delay_bins,
                                std::size_t pilot_delay) {
    if (pilot_delay >= delay_bins)
        throw std::invalid_argument("csi_snapshot: pilot delay must lie in [0, M-1]");
    CsiSnapshot csi{symbol, pilot_delay, cvec(ps.taps(), cplx{})};
    const auto sample = static_cast<std::int64_t>(symbol * delay_bins + pilot_delay);
    for (const auto& p : ps.antenna(q))
        csi.taps[p.tap] += p.gain * doppler_phasor(p, ps.sample_period_s(), sample);
    return csi;
}

// ------------------------------------------------------------------------
// Residual Doppler correction window
// ------------------------------------------------------------------------

struct RdcWindow {
    std::vector<double> coeffs;
    double beta = 0.0; // 2 pi v_max Ts [rad/sample]
    std::size_t center = 0;
    double clip_threshold = 0.1;
    std::size_t clipped_count = 0;
};

/// coeffs[b] = 1 / J0(beta (b - D)). Where |J0| < eps the coefficient is
/// clipped to sign(J0) / eps.
inline RdcWindow make_rdc_window(std::size_t delay_bins, std::size_t pilot_delay, double max_doppler_hz,
                                 double sample_period_s, double clip_threshold = 0.1) {
    if (!(clip_threshold > 0.0))
        throw std::invalid_argument("make_rdc_window: clip threshold must be positive");
    if (pilot_delay >= delay_bins)
        throw std::invalid_argument("make_rdc_window: pilot delay must lie in [0, M-1]");
    RdcWindow w;
    w.beta = kTwoPi * max_doppler_hz * sample_period_s;
    w.center = pilot_delay;
    w.clip_threshold = clip_threshold;
    w.coeffs.resize(delay_bins);
    for (std::size_t b = 0; b < delay_bins; ++b) {
        const double offset = static_cast<double>(b) - static_cast<double>(pilot_delay);
        const double j0 = bessel_j0(w.beta * offset);
        if (std::abs(j0) >= clip_threshold) {
            w.coeffs[b] = 1.0 / j0;
        } else {
            w.coeffs[b] = (j0 < 0.0 ? -1.0 : 1.0) / clip_threshold;
            ++w.clipped_count;
        }
    }
    return w;
}

// ------------------------------------------------------------------------
// Time-reversal filtering and combining
// ------------------------------------------------------------------------

/// Matched filter of one received symbol slice (M+L-1 samples) with the
/// conjugated, time-reversed CIR snapshot, keeping the M samples after the
/// L-1 sample filter transient: out[m] = sum_k conj(h[k]) slice[m + k].
inline cvec tr_filter_symbol(std::span<const cplx> slice, std::span<const cplx> csi_taps) {
    if (csi_taps.empty() || slice.size() < csi_taps.size())
        throw std::invalid_argument("tr_filter_symbol: slice shorter than the channel");
    const std::size_t delay_bins = slice.size() - csi_taps.size() + 1;
    cvec out(delay_bins, cplx{});
    for (std::size_t k = 0; k < csi_taps.size(); ++k) {
        const cplx c = std::conj(csi_taps[k]);
        if (c == cplx{})
            continue;
        for (std::size_t m = 0; m < delay_bins; ++m)
            out[m] += c * slice[m + k];
    }
    return out;
}

/// Combines one OFDM symbol over Q antennas: (1/Q) sum_q W H^TR r_q, where
/// W optionally folds in the RDC window.
inline cvec trmrc_combine(std::span<const cvec> slices, std::span<const CsiSnapshot> csi,
                          const RdcWindow* window = nullptr) {
    if (slices.empty())
        throw std::invalid_argument("trmrc_combine: no antennas");
    if (slices.size() != csi.size())
        throw std::invalid_argument("trmrc_combine: " + std::to_string(slices.size()) + " slices but " +
                                    std::to_string(csi.size()) + " CSI snapshots");
    cvec acc;
    for (std::size_t q = 0; q < slices.size(); ++q) {
        const cvec y = tr_filter_symbol(slices[q], csi[q].taps);
        if (acc.empty())
            acc.assign(y.size(), cplx{});
        if (y.size() != acc.size())
            throw std::invalid_argument("trmrc_combine: inconsistent slice lengths");
        for (std::size_t m = 0; m < y.size(); ++m)
            acc[m] += y[m];
    }
    const double inv_q = 1.0 / static_cast<double>(slices.size());
    for (std::size_t m = 0; m < acc.size(); ++m) {
        acc[m] *= inv_q;
        if (window != nullptr)
            acc[m] *= window->coeffs.at(m);
    }
    return acc;
}

/// Streaming TR-MRC over a whole frame. Antennas are accumulated one at a
/// time in call order; the sum is windowed and averaged on output.
class TrMrcCombiner {
  public:
    TrMrcCombiner(std::size_t delay_bins, std::size_t symbols, std::size_t taps, std::size_t pilot_delay)
        : delay_bins_(delay_bins), symbols_(symbols), taps_(taps), pilot_delay_(pilot_delay),
          sum_(delay_bins * symbols, cplx{}) {
        if (delay_bins == 0 || symbols == 0 || taps == 0)
            throw std::invalid_argument("TrMrcCombiner: empty geometry");
        if (pilot_delay >= delay_bins)
            throw std::invalid_argument("TrMrcCombiner: pilot delay must lie in [0, M-1]");
    }

    std::size_t antennas() const { return antennas_; }
    std::size_t delay_bins() const { return delay_bins_; }
    std::size_t symbols() const { return symbols_; }

    /// Adds antenna q's filtered output. `rx` holds symbols*M + L - 1 samples
    /// and `paths` is the antenna's true channel (genie CSI at Mn+D).
    void accumulate(std::span<const cplx> rx, std::span<const Path> paths, double sample_period_s) {
        check_rx(rx);
        for (const auto& p : paths) {
            if (p.tap >= taps_)
                throw std::invalid_argument("TrMrcCombiner: path tap outside [0, L-1]");
            for (std::size_t n = 0; n < symbols_; ++n) {
                const auto sample = static_cast<std::int64_t>(n * delay_bins_ + pilot_delay_);
                const cplx c = std::conj(p.gain * doppler_phasor(p, sample_period_s, sample));
                const cplx* in = rx.data() + n * delay_bins_ + p.tap;
                cplx* out = sum_.data() + n * delay_bins_;
                for (std::size_t m = 0; m < delay_bins_; ++m)
                    out[m] += c * in[m];
            }
        }
        ++antennas_;
    }

    /// Same as above with explicit per-symbol CSI snapshots.
    void accumulate(std::span<const cplx> rx, std::span<const CsiSnapshot> csi) {
        check_rx(rx);
        if (csi.size() != symbols_)
            throw std::invalid_argument("TrMrcCombiner: need one CSI snapshot per symbol");
        for (std::size_t n = 0; n < symbols_; ++n) {
            const cvec y = tr_filter_symbol(rx.subspan(n * delay_bins_, delay_bins_ + taps_ - 1), csi[n].taps);
            for (std::size_t m = 0; m < delay_bins_; ++m)
                sum_[n * delay_bins_ + m] += y[m];
        }
        ++antennas_;
    }

    /// r^TR for every symbol of the frame, concatenated.
    cvec output(const RdcWindow* window = nullptr) const {
        if (antennas_ == 0)
            throw std::logic_error("TrMrcCombiner: no antennas accumulated");
        if (window != nullptr && window->coeffs.size() != delay_bins_)
            throw std::invalid_argument("TrMrcCombiner: window length differs from M");
        const double inv_q = 1.0 / static_cast<double>(antennas_);
        cvec out(sum_.size());
        for (std::size_t n = 0; n < symbols_; ++n)
            for (std::size_t m = 0; m < delay_bins_; ++m) {
                const double w = window != nullptr ? window->coeffs[m] * inv_q : inv_q;
                out[n * delay_bins_ + m] = sum_[n * delay_bins_ + m] * w;
            }
        return out;
    }

  private:
    void check_rx(std::span<const cplx> rx) const {
        if (rx.size() != symbols_ * delay_bins_ + taps_ - 1)
            throw std::invalid_argument("TrMrcCombiner: expected " + std::to_string(symbols_ * delay_bins_ + taps_ - 1) +
                                        " receive samples, got " + std::to_string(rx.size()));
    }

    std::size_t delay_bins_;
    std::size_t symbols_;
    std::size_t taps_;
    std::size_t pilot_delay_;
    std::size_t antennas_ = 0;
    cvec sum_;
};

/// Splits combiner output into blocks and maps each back to delay-Doppler.
inline std::vector<DelayDopplerGrid> demodulate_blocks(std::span<const cplx> combined, std::size_t delay_bins,
                                                       std::size_t doppler_bins, std::size_t blocks) {
    const std::size_t block_len = delay_bins * doppler_bins;
    if (combined.size() != block_len * blocks)
        throw std::invalid_argument("demodulate_blocks: combiner output does not match frame geometry");
    std::vector<DelayDopplerGrid> grids;
    grids.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b)
        grids.push_back(otfs_demodulate(combined.subspan(b * block_len, block_len), delay_bins, doppler_bins));
    return grids;
}

struct ReceiverConfig {
    std::size_t delay_bins = 128;
    std::size_t doppler_bins = 64;
    std::size_t blocks = 5;
    std::size_t pilot_delay = 64;
    WindowMode mode = WindowMode::rect;
    double rdc_clip = 0.1;
};

/// Full receive chain for one frame: per-antenna TR filtering, averaging
/// over antennas, optional RDC window and OTFS demodulation per block.
/// The returned grids are not yet gain-normalized.
inline std::vector<DelayDopplerGrid> receive_frame(std::span<const TimeFrame> rx, const PathSet& ps,
                                                   const ReceiverConfig& cfg) {
    if (rx.size() != ps.antennas())
        throw std::invalid_argument("receive_frame: " + std::to_string(rx.size()) + " receive frames for " +
                                    std::to_string(ps.antennas()) + " antennas");
    const std::size_t symbols = cfg.blocks * cfg.doppler_bins;
    TrMrcCombiner combiner(cfg.delay_bins, symbols, ps.taps(), cfg.pilot_delay);
    for (std::size_t q = 0; q < rx.size(); ++q)
        combiner.accumulate(rx[q].samples, ps.antenna(q), ps.sample_period_s());
    std::optional<RdcWindow> window;
    if (cfg.mode == WindowMode::rdc)
        window = make_rdc_window(cfg.delay_bins, cfg.pilot_delay, ps.max_doppler_hz(), ps.sample_period_s(),
                                 cfg.rdc_clip);
    const cvec combined = combiner.output(window ? &*window : nullptr);
    return demodulate_blocks(combined, cfg.delay_bins, cfg.doppler_bins, cfg.blocks);
}

} // namespace otfs
