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
#include <span>
#include <stdexcept>

#include "otfs/types.hpp"

namespace otfs {

// Unitary DFT of arbitrary length, evaluated directly from a twiddle table.
// The transform lengths used here (the Doppler dimension) are small, so the
// O(n^2) evaluation costs far less than the channel and the combiner.
class UnitaryDft {
  public:
    explicit UnitaryDft(std::size_t length) : length_(length), scale_(0.0) {
        if (length == 0)
            throw std::invalid_argument("UnitaryDft: length must be positive");
        scale_ = 1.0 / std::sqrt(static_cast<double>(length));
        twiddle_.resize(length);
        for (std::size_t k = 0; k < length; ++k)
            twiddle_[k] = std::polar(1.0, -kTwoPi * static_cast<double>(k) / static_cast<double>(length));
    }

    std::size_t length() const { return length_; }

    // out[k] = 1/sqrt(n) * sum_i in[i] * exp(-j 2 pi k i / n)
    void forward(std::span<const cplx> in, std::span<cplx> out) const { apply(in, out, false); }

    // out[k] = 1/sqrt(n) * sum_i in[i] * exp(+j 2 pi k i / n)
    void inverse(std::span<const cplx> in, std::span<cplx> out) const { apply(in, out, true); }

  private:
    void apply(std::span<const cplx> in, std::span<cplx> out, bool conjugate) const {
        if (in.size() != length_ || out.size() != length_)
            throw std::invalid_argument("UnitaryDft: span length does not match transform length");
        for (std::size_t k = 0; k < length_; ++k) {
            cplx acc{0.0, 0.0};
            std::size_t idx = 0;
            for (std::size_t i = 0; i < length_; ++i) {
                const cplx w = conjugate ? std::conj(twiddle_[idx]) : twiddle_[idx];
                acc += in[i] * w;
                idx += k;
                if (idx >= length_)
                    idx -= length_;
            }
            out[k] = acc * scale_;
        }
    }

    std::size_t length_;
    double scale_;
    cvec twiddle_;
};

} // namespace otfs
