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
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "otfs/grid.hpp"
#include "otfs/random.hpp"
#include "otfs/types.hpp"

namespace otfs {

// ------------------------------------------------------------------------
// Power delay profile
// ------------------------------------------------------------------------

struct PdpTap {
    double delay_s = 0.0;
    double power_db = 0.0;
};

/// 3GPP Extended Vehicular A (TS 36.104 Annex B.2).
inline std::vector<PdpTap> eva_profile() {
    return {{0e-9, 0.0},     {30e-9, -1.5},   {150e-9, -1.4},   {310e-9, -3.6},  {370e-9, -0.6},
            {710e-9, -9.1},  {1090e-9, -7.0}, {1730e-9, -12.0}, {2510e-9, -16.9}};
}

/// Discretized PDP. Paths that round onto the same sample stay separate
/// entries; they share a tap index but fade independently.
struct PowerDelayProfile {
    std::vector<std::size_t> tap_indices;
    std::vector<double> powers; // linear, sums to 1

    std::size_t paths() const { return powers.size(); }

    /// Number of delay taps L = max tap index + 1.
    std::size_t taps() const {
        return tap_indices.empty() ? 0 : *std::max_element(tap_indices.begin(), tap_indices.end()) + 1;
    }
};

inline PowerDelayProfile discretize_pdp(std::span<const PdpTap> taps, double sample_period_s) {
    if (taps.empty())
        throw std::invalid_argument("discretize_pdp: empty tap list");
    if (!(sample_period_s > 0.0))
        throw std::invalid_argument("discretize_pdp: sample period must be positive");
    PowerDelayProfile pdp;
    double total = 0.0;
    for (const auto& t : taps) {
        if (!(t.delay_s >= 0.0))
            throw std::invalid_argument("discretize_pdp: negative or invalid delay");
        pdp.tap_indices.push_back(static_cast<std::size_t>(std::llround(t.delay_s / sample_period_s)));
        const double p = std::pow(10.0, t.power_db / 10.0);
        pdp.powers.push_back(p);
        total += p;
    }
    for (auto& p : pdp.powers)
        p /= total;
    return pdp;
}

// ------------------------------------------------------------------------
// Per-antenna sparse channels
// ------------------------------------------------------------------------

struct Path {
    cplx gain;
    std::size_t tap = 0;
    double doppler_hz = 0.0;
    double angle_rad = 0.0;
};

/// Q x P paths, antenna-major, plus the geometry shared by all antennas.
class PathSet {
  public:
    PathSet(std::vector<Path> paths, std::size_t antennas, std::size_t taps, double max_doppler_hz,
            double sample_period_s)
        : paths_(std::move(paths)), antennas_(antennas), taps_(taps), max_doppler_hz_(max_doppler_hz),
          sample_period_s_(sample_period_s) {
        if (antennas == 0 || paths_.size() % antennas != 0)
            throw std::invalid_argument("PathSet: path count is not a multiple of the antenna count");
        per_antenna_ = paths_.size() / antennas;
        for (const auto& p : paths_)
            if (p.tap >= taps_)
                throw std::invalid_argument("PathSet: path tap outside [0, L-1]");
    }

    std::size_t antennas() const { return antennas_; }
    std::size_t paths_per_antenna() const { return per_antenna_; }
    std::size_t taps() const { return taps_; }
    double max_doppler_hz() const { return max_doppler_hz_; }
    double sample_period_s() const { return sample_period_s_; }

    std::span<const Path> antenna(std::size_t q) const {
        if (q >= antennas_)
            throw std::out_of_range("PathSet: antenna index " + std::to_string(q) + " out of range");
        return {paths_.data() + q * per_antenna_, per_antenna_};
    }

    const std::vector<Path>& all() const { return paths_; }

  private:
    std::vector<Path> paths_;
    std::size_t antennas_;
    std::size_t per_antenna_ = 0;
    std::size_t taps_;
    double max_doppler_hz_;
    double sample_period_s_;
};

/// Jakes model Doppler for arrival angle theta: v = v_max cos(theta).
inline double jakes_doppler(double max_doppler_hz, double angle_rad) { return max_doppler_hz * std::cos(angle_rad); }

/// Draws alpha ~ CN(0, rho(p)) and Jakes Dopplers v = v_max cos(theta),
/// theta ~ U(-pi, pi), independently per path and antenna.
inline PathSet sample_pathset(const PowerDelayProfile& pdp, double max_doppler_hz, double sample_period_s,
                              std::size_t antennas, Rng& rng) {
    if (antennas == 0)
        throw std::invalid_argument("sample_pathset: need at least one antenna");
    std::vector<Path> paths;
    paths.reserve(antennas * pdp.paths());
    for (std::size_t q = 0; q < antennas; ++q) {
        for (std::size_t p = 0; p < pdp.paths(); ++p) {
            Path path;
            path.gain = rng.complex_normal(pdp.powers[p]);
            path.tap = pdp.tap_indices[p];
            path.angle_rad = rng.uniform(-kPi, kPi);
            path.doppler_hz = jakes_doppler(max_doppler_hz, path.angle_rad);
            paths.push_back(path);
        }
    }
    return PathSet(std::move(paths), antennas, pdp.taps(), max_doppler_hz, sample_period_s);
}

/// Phase rotation of one path at absolute sample `sample` for tap `tap`:
/// exp(j 2 pi v (sample - tap) Ts).
inline cplx doppler_phasor(const Path& path, double sample_period_s, std::int64_t sample) {
    const double t = static_cast<double>(sample - static_cast<std::int64_t>(path.tap)) * sample_period_s;
    return std::polar(1.0, kTwoPi * path.doppler_hz * t);
}

/// Delay-time response h_q[k, l] = sum_p alpha e^{j2pi v (l-k) Ts} delta[k - tap_p].
inline cplx delay_time_gain(const PathSet& ps, std::size_t q, std::int64_t tap, std::int64_t sample) {
    cplx h{0.0, 0.0};
    if (tap < 0 || tap >= static_cast<std::int64_t>(ps.taps()))
        return h;
    for (const auto& p : ps.antenna(q))
        if (static_cast<std::int64_t>(p.tap) == tap)
            h += p.gain * doppler_phasor(p, ps.sample_period_s(), sample);
    return h;
}

// ------------------------------------------------------------------------
// Noise and propagation
// ------------------------------------------------------------------------

struct NoiseSpec {
    double variance = 0.0;

    /// Unit transmit power per sample, so sigma^2 = 10^(-snr/10).
    static NoiseSpec from_snr_db(double snr_db) { return {std::pow(10.0, -snr_db / 10.0)}; }
    static NoiseSpec noiseless() { return {0.0}; }
};

/// Time-varying convolution of one antenna's channel with the transmit
/// stream, r[l] = sum_k h[k, l] s[l - k] + eta[l]. Samples outside the
/// stream are silence, so the output is len(tx) + L - 1 long.
inline cvec propagate(std::span<const cplx> tx, std::span<const Path> paths, std::size_t taps,
                      double sample_period_s, double noise_variance, Rng& noise_rng) {
    const std::size_t len = tx.size();
    cvec rx(len + (taps == 0 ? 0 : taps - 1), cplx{});
    // The phasor advances by a fixed step per sample and is re-seeded
    // exactly every kAnchor samples to bound rounding drift.
    constexpr std::size_t kAnchor = 256;
    for (const auto& path : paths) {
        const cplx step = std::polar(1.0, kTwoPi * path.doppler_hz * sample_period_s);
        cplx* out = rx.data() + path.tap;
        for (std::size_t start = 0; start < len; start += kAnchor) {
            const std::size_t stop = std::min(len, start + kAnchor);
            cplx ph = path.gain * doppler_phasor(path, sample_period_s,
                                                 static_cast<std::int64_t>(start + path.tap));
            for (std::size_t i = start; i < stop; ++i) {
                out[i] += ph * tx[i];
                ph *= step;
            }
        }
    }
    if (noise_variance > 0.0)
        for (auto& v : rx)
            v += noise_rng.complex_normal(noise_variance);
    return rx;
}

/// Propagates a transmit frame to every antenna. Antenna q draws its noise
/// from derive_seed(noise_seed, {q}), so the output does not depend on the
/// order in which antennas are processed.
inline std::vector<TimeFrame> apply_channel(const TimeFrame& tx, const PathSet& ps, const NoiseSpec& noise,
                                            std::uint64_t noise_seed) {
    std::vector<TimeFrame> out;
    out.reserve(ps.antennas());
    for (std::size_t q = 0; q < ps.antennas(); ++q) {
        Rng rng(derive_seed(noise_seed, {q}));
        TimeFrame rx;
        rx.blocks = tx.blocks;
        rx.block_len = tx.block_len;
        rx.sample_rate_hz = tx.sample_rate_hz;
        rx.samples = propagate(tx.samples, ps.antenna(q), ps.taps(), ps.sample_period_s(), noise.variance, rng);
        out.push_back(std::move(rx));
    }
    return out;
}

// ------------------------------------------------------------------------
// Block-matrix form (test oracle)
// ------------------------------------------------------------------------

/// Dense row-major complex matrix; only used by the matrix-form oracles.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    cvec data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, cplx{}) {}

    cplx& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    cvec operator*(std::span<const cplx> v) const {
        if (v.size() != cols)
            throw std::invalid_argument("DenseMatrix: dimension mismatch");
        cvec out(rows, cplx{});
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                out[r] += (*this)(r, c) * v[c];
        return out;
    }

    DenseMatrix operator*(const DenseMatrix& rhs) const {
        if (cols != rhs.rows)
            throw std::invalid_argument("DenseMatrix: dimension mismatch");
        DenseMatrix out(rows, rhs.cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t k = 0; k < cols; ++k)
                for (std::size_t c = 0; c < rhs.cols; ++c)
                    out(r, c) += (*this)(r, k) * rhs(k, c);
        return out;
    }

    bool is_toeplitz(double tol) const {
        for (std::size_t r = 1; r < rows; ++r)
            for (std::size_t c = 1; c < cols; ++c)
                if (std::abs((*this)(r, c) - (*this)(r - 1, c - 1)) > tol)
                    return false;
        return true;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : data)
            m = std::max(m, std::abs(v));
        return m;
    }
};

/// Convolution matrices mapping s_{n-1}, s_n, s_{n+1} onto the M+L-1 receive
/// samples r[nM], ..., r[(n+1)M+L-2] of OFDM symbol n.
struct BlockMatrices {
    DenseMatrix previous;
    DenseMatrix current;
    DenseMatrix next;
};

inline BlockMatrices build_block_matrices(const PathSet& ps, std::size_t q, std::size_t symbol,
                                          std::size_t delay_bins, std::size_t total_symbols) {
    if (symbol >= total_symbols)
        throw std::out_of_range("build_block_matrices: symbol " + std::to_string(symbol) + " outside frame of " +
                                std::to_string(total_symbols));
    const std::size_t rows = delay_bins + ps.taps() - 1;
    const auto M = static_cast<std::int64_t>(delay_bins);
    const auto base = static_cast<std::int64_t>(symbol) * M;
    BlockMatrices out{DenseMatrix(rows, delay_bins), DenseMatrix(rows, delay_bins), DenseMatrix(rows, delay_bins)};
    for (std::size_t ra = 0; ra < rows; ++ra) {
        const auto a = static_cast<std::int64_t>(ra);
        for (std::size_t cb = 0; cb < delay_bins; ++cb) {
            const auto b = static_cast<std::int64_t>(cb);
            out.current(ra, cb) = delay_time_gain(ps, q, a - b, base + a);
            out.previous(ra, cb) = delay_time_gain(ps, q, M - b + a, base + a);
            out.next(ra, cb) = delay_time_gain(ps, q, a - b - M, base + a);
        }
    }
    return out;
}

} // namespace otfs
