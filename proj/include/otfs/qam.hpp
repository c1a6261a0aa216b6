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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "otfs/types.hpp"

namespace otfs {

/// Square Gray-labeled QAM with unit average energy.
///
/// A label of k bits is split into an in-phase half (the first k/2 bits, MSB
/// first) and a quadrature half. Each half selects one of sqrt(order) levels
/// through a reflected Gray code, so horizontally or vertically adjacent
/// points differ in exactly one bit.
class Constellation {
  public:
    explicit Constellation(unsigned order = 4) : order_(order) {
        if (order != 4 && order != 16 && order != 64)
            throw std::invalid_argument("Constellation: unsupported order " + std::to_string(order) +
                                        " (expected 4, 16 or 64)");
        bits_per_symbol_ = static_cast<unsigned>(std::lround(std::log2(order)));
        levels_ = 1u << (bits_per_symbol_ / 2);
        scale_ = 1.0 / std::sqrt(2.0 * (static_cast<double>(order) - 1.0) / 3.0);

        gray_to_level_.resize(levels_);
        level_to_gray_.resize(levels_);
        for (unsigned level = 0; level < levels_; ++level) {
            const unsigned g = level ^ (level >> 1);
            level_to_gray_[level] = g;
            gray_to_level_[g] = level;
        }
        points_.resize(order);
        for (unsigned label = 0; label < order; ++label)
            points_[label] = point_for_label(label);
    }

    unsigned order() const { return order_; }
    unsigned bits_per_symbol() const { return bits_per_symbol_; }

    /// Points indexed by their bit label.
    const cvec& points() const { return points_; }

    double min_distance() const { return 2.0 * scale_; }

    cvec map(std::span<const std::uint8_t> bits) const {
        if (bits.size() % bits_per_symbol_ != 0)
            throw std::invalid_argument("Constellation::map: " + std::to_string(bits.size()) +
                                        " bits is not a multiple of " + std::to_string(bits_per_symbol_));
        cvec symbols(bits.size() / bits_per_symbol_);
        for (std::size_t s = 0; s < symbols.size(); ++s) {
            unsigned label = 0;
            for (unsigned b = 0; b < bits_per_symbol_; ++b)
                label = (label << 1) | (bits[s * bits_per_symbol_ + b] & 1u);
            symbols[s] = points_[label];
        }
        return symbols;
    }

    /// Minimum-distance hard decisions. For a square grid this separates into
    /// independent nearest-level decisions on each axis.
    std::vector<std::uint8_t> demap(std::span<const cplx> symbols) const {
        std::vector<std::uint8_t> bits(symbols.size() * bits_per_symbol_);
        const unsigned half = bits_per_symbol_ / 2;
        for (std::size_t s = 0; s < symbols.size(); ++s) {
            const unsigned gi = level_to_gray_[nearest_level(symbols[s].real())];
            const unsigned gq = level_to_gray_[nearest_level(symbols[s].imag())];
            const unsigned label = (gi << half) | gq;
            for (unsigned b = 0; b < bits_per_symbol_; ++b)
                bits[s * bits_per_symbol_ + b] = static_cast<std::uint8_t>((label >> (bits_per_symbol_ - 1 - b)) & 1u);
        }
        return bits;
    }

  private:
    double level_value(unsigned level) const {
        return scale_ * (2.0 * static_cast<double>(level) - static_cast<double>(levels_ - 1));
    }

    cplx point_for_label(unsigned label) const {
        const unsigned half = bits_per_symbol_ / 2;
        const unsigned gi = label >> half;
        const unsigned gq = label & ((1u << half) - 1u);
        return {level_value(gray_to_level_[gi]), level_value(gray_to_level_[gq])};
    }

    unsigned nearest_level(double v) const {
        const double pos = (v / scale_ + static_cast<double>(levels_ - 1)) / 2.0;
        if (!(pos > 0.0)) // also catches NaN
            return 0;
        const double top = static_cast<double>(levels_ - 1);
        return static_cast<unsigned>(std::lround(std::min(pos, top)));
    }

    unsigned order_;
    unsigned bits_per_symbol_ = 0;
    unsigned levels_ = 0;
    double scale_ = 0.0;
    std::vector<unsigned> gray_to_level_;
    std::vector<unsigned> level_to_gray_;
    cvec points_;
};

} // namespace otfs
