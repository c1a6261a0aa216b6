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

#include "otfs/bessel.hpp"
#include "otfs/grid.hpp"
#include "otfs/random.hpp"
#include "otfs/types.hpp"

namespace otfs {

/// Reported SINR ceiling; an error-free estimate maps here instead of +inf.
inline constexpr double kSinrCapDb = 100.0;

inline double to_db(double linear) {
    if (!(linear > 0.0))
        return -kSinrCapDb;
    return std::min(kSinrCapDb, 10.0 * std::log10(linear));
}

namespace detail {

inline void check_same_shape(std::span<const DelayDopplerGrid> a, std::span<const DelayDopplerGrid> b,
                             const char* who) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument(std::string(who) + ": block counts differ or are zero");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].delay_bins() != b[i].delay_bins() || a[i].doppler_bins() != b[i].doppler_bins())
            throw std::invalid_argument(std::string(who) + ": grid shapes differ");
}

} // namespace detail

struct SinrEstimate {
    cplx gain;          // least-squares scalar gamma = <x_hat, x> / ||x||^2
    double sinr_linear; // |gamma|^2 ||x||^2 / ||x_hat - gamma x||^2, +inf if error-free
};

inline SinrEstimate sinr_estimate(std::span<const DelayDopplerGrid> estimate,
                                  std::span<const DelayDopplerGrid> truth) {
    detail::check_same_shape(estimate, truth, "sinr_estimate");
    cplx cross{0.0, 0.0};
    double energy = 0.0;
    for (std::size_t b = 0; b < truth.size(); ++b) {
        const auto& xe = estimate[b].data();
        const auto& xt = truth[b].data();
        for (std::size_t i = 0; i < xt.size(); ++i) {
            cross += xe[i] * std::conj(xt[i]);
            energy += std::norm(xt[i]);
        }
    }
    if (!(energy > 0.0))
        throw std::invalid_argument("sinr_estimate: truth grids carry no energy");
    const cplx gamma = cross / energy;
    double error = 0.0;
    for (std::size_t b = 0; b < truth.size(); ++b) {
        const auto& xe = estimate[b].data();
        const auto& xt = truth[b].data();
        for (std::size_t i = 0; i < xt.size(); ++i)
            error += std::norm(xe[i] - gamma * xt[i]);
    }
    const double signal = std::norm(gamma) * energy;
    const double sinr = error > 0.0 ? signal / error : std::numeric_limits<double>::infinity();
    return {gamma, sinr};
}

inline std::size_t bit_errors(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> truth) {
    if (decided.size() != truth.size())
        throw std::invalid_argument("bit_errors: length mismatch (" + std::to_string(decided.size()) + " vs " +
                                    std::to_string(truth.size()) + ")");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        errors += (decided[i] & 1u) != (truth[i] & 1u);
    return errors;
}

inline double ber_count(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> truth) {
    const std::size_t errors = bit_errors(decided, truth);
    if (truth.empty())
        throw std::invalid_argument("ber_count: no bits");
    return static_cast<double>(errors) / static_cast<double>(truth.size());
}

// ------------------------------------------------------------------------
// Convergence diagnostics
// ------------------------------------------------------------------------

struct JakesCheck {
    std::vector<double> deviation; // |Re mean - J0(beta d)| per offset
    std::vector<double> imag;      // |Im mean| per offset
    double max_deviation = 0.0;
    double max_imag = 0.0;
};

/// Monte Carlo estimate of E{exp(j beta cos(theta) d)}, theta ~ U(-pi, pi),
/// compared with J0(beta d). One set of angle draws is shared by all offsets.
inline JakesCheck jakes_expectation_check(double beta, std::span<const double> offsets, std::size_t samples,
                                          Rng& rng) {
    if (samples < 10000)
        throw std::invalid_argument("jakes_expectation_check: need at least 1e4 samples");
    std::vector<double> cosines(samples);
    for (auto& c : cosines)
        c = std::cos(rng.uniform(-kPi, kPi));
    JakesCheck out;
    for (double d : offsets) {
        double re = 0.0;
        double im = 0.0;
        for (double c : cosines) {
            const double phase = beta * c * d;
            re += std::cos(phase);
            im += std::sin(phase);
        }
        re /= static_cast<double>(samples);
        im /= static_cast<double>(samples);
        // Compare the full complex mean against the real J0.
        const double dev = std::abs(cplx(re, im) - cplx(bessel_j0(beta * d), 0.0));
        out.deviation.push_back(dev);
        out.imag.push_back(std::abs(im));
        out.max_deviation = std::max(out.max_deviation, dev);
        out.max_imag = std::max(out.max_imag, std::abs(im));
    }
    return out;
}

/// Least-squares complex gain of each delay row: sum x_hat conj(x) / sum |x|^2
/// over all Doppler bins and blocks.
inline cvec gain_profile(std::span<const DelayDopplerGrid> estimate, std::span<const DelayDopplerGrid> probes) {
    detail::check_same_shape(estimate, probes, "gain_profile");
    const std::size_t rows = probes.front().delay_bins();
    cvec cross(rows, cplx{});
    std::vector<double> energy(rows, 0.0);
    for (std::size_t b = 0; b < probes.size(); ++b)
        for (std::size_t i = 0; i < probes[b].doppler_bins(); ++i)
            for (std::size_t m = 0; m < rows; ++m) {
                cross[m] += estimate[b](m, i) * std::conj(probes[b](m, i));
                energy[m] += std::norm(probes[b](m, i));
            }
    for (std::size_t m = 0; m < rows; ++m) {
        if (!(energy[m] > 0.0))
            throw std::invalid_argument("gain_profile: probe row " + std::to_string(m) + " carries no energy");
        cross[m] /= energy[m];
    }
    return cross;
}

} // namespace otfs
