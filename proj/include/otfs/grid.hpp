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

#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "otfs/dft.hpp"
#include "otfs/types.hpp"

namespace otfs {

/// M x N delay-Doppler symbol grid. Storage is column-major: column i holds
/// the M delay bins of Doppler bin i.
class DelayDopplerGrid {
  public:
    DelayDopplerGrid(std::size_t delay_bins, std::size_t doppler_bins)
        : delay_bins_(delay_bins), doppler_bins_(doppler_bins) {
        check_shape();
        data_.assign(delay_bins * doppler_bins, cplx{});
    }

    DelayDopplerGrid(std::size_t delay_bins, std::size_t doppler_bins, cvec data)
        : delay_bins_(delay_bins), doppler_bins_(doppler_bins), data_(std::move(data)) {
        check_shape();
        if (data_.size() != delay_bins * doppler_bins)
            throw std::invalid_argument("DelayDopplerGrid: expected " + std::to_string(delay_bins * doppler_bins) +
                                        " entries, got " + std::to_string(data_.size()));
    }

    std::size_t delay_bins() const { return delay_bins_; }
    std::size_t doppler_bins() const { return doppler_bins_; }
    std::size_t size() const { return data_.size(); }

    cplx& operator()(std::size_t delay, std::size_t doppler) { return data_[doppler * delay_bins_ + delay]; }
    const cplx& operator()(std::size_t delay, std::size_t doppler) const {
        return data_[doppler * delay_bins_ + delay];
    }

    std::span<cplx> column(std::size_t doppler) { return {data_.data() + doppler * delay_bins_, delay_bins_}; }
    std::span<const cplx> column(std::size_t doppler) const {
        return {data_.data() + doppler * delay_bins_, delay_bins_};
    }

    const cvec& data() const { return data_; }
    cvec& data() { return data_; }

    double energy() const {
        return std::accumulate(data_.begin(), data_.end(), 0.0,
                               [](double acc, const cplx& v) { return acc + std::norm(v); });
    }

  private:
    void check_shape() const {
        if (delay_bins_ == 0 || doppler_bins_ == 0)
            throw std::invalid_argument("DelayDopplerGrid: M and N must be at least 1");
    }

    std::size_t delay_bins_;
    std::size_t doppler_bins_;
    cvec data_;
};

/// Contiguous sample stream of one or more OTFS blocks. On the receive side
/// the stream carries the L-1 sample channel tail after the last block.
struct TimeFrame {
    cvec samples;
    std::size_t blocks = 1;
    std::size_t block_len = 0;
    double sample_rate_hz = 0.0; // 0 when the caller has not attached a rate
};

namespace detail {

// Transforms each delay row of a block along the Doppler/time axis. Input and
// output share the column-major layout, so row m is the stride-M sequence.
inline void transform_rows(std::span<const cplx> in, std::span<cplx> out, std::size_t delay_bins,
                           std::size_t doppler_bins, bool inverse) {
    const UnitaryDft dft(doppler_bins);
    cvec row_in(doppler_bins);
    cvec row_out(doppler_bins);
    for (std::size_t m = 0; m < delay_bins; ++m) {
        for (std::size_t i = 0; i < doppler_bins; ++i)
            row_in[i] = in[i * delay_bins + m];
        if (inverse)
            dft.inverse(row_in, row_out);
        else
            dft.forward(row_in, row_out);
        for (std::size_t n = 0; n < doppler_bins; ++n)
            out[n * delay_bins + m] = row_out[n];
    }
}

} // namespace detail

/// CP-free OTFS modulation of a single block: s_n = 1/sqrt(N) sum_i x_i e^{j2pi ni/N},
/// serialized as [s_0; s_1; ...; s_{N-1}].
inline TimeFrame otfs_modulate(const DelayDopplerGrid& grid) {
    TimeFrame frame;
    frame.blocks = 1;
    frame.block_len = grid.size();
    frame.samples.resize(grid.size());
    detail::transform_rows(grid.data(), frame.samples, grid.delay_bins(), grid.doppler_bins(), true);
    return frame;
}

/// Modulates consecutive blocks into one contiguous frame.
inline TimeFrame otfs_modulate_frame(std::span<const DelayDopplerGrid> grids) {
    if (grids.empty())
        throw std::invalid_argument("otfs_modulate_frame: no blocks");
    const std::size_t block_len = grids.front().size();
    TimeFrame frame;
    frame.blocks = grids.size();
    frame.block_len = block_len;
    frame.samples.resize(block_len * grids.size());
    for (std::size_t b = 0; b < grids.size(); ++b) {
        const auto& g = grids[b];
        if (g.delay_bins() != grids.front().delay_bins() || g.doppler_bins() != grids.front().doppler_bins())
            throw std::invalid_argument("otfs_modulate_frame: blocks differ in shape");
        detail::transform_rows(g.data(), std::span<cplx>(frame.samples).subspan(b * block_len, block_len),
                               g.delay_bins(), g.doppler_bins(), true);
    }
    return frame;
}

/// Demodulates one block of M*N samples: x_n = 1/sqrt(N) sum_i r_i e^{-j2pi ni/N}.
inline DelayDopplerGrid otfs_demodulate(std::span<const cplx> block, std::size_t delay_bins,
                                        std::size_t doppler_bins) {
    DelayDopplerGrid grid(delay_bins, doppler_bins);
    if (block.size() != grid.size())
        throw std::invalid_argument("otfs_demodulate: expected " + std::to_string(grid.size()) +
                                    " samples, got " + std::to_string(block.size()));
    detail::transform_rows(block, grid.data(), delay_bins, doppler_bins, false);
    return grid;
}

inline DelayDopplerGrid otfs_demodulate(const TimeFrame& frame, std::size_t delay_bins, std::size_t doppler_bins) {
    return otfs_demodulate(frame.samples, delay_bins, doppler_bins);
}

} // namespace otfs
