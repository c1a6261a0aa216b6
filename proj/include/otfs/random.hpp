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
#include <initializer_list>
#include <random>

#include "otfs/types.hpp"

namespace otfs {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Folds a list of indices into a seed: h <- splitmix64(h ^ splitmix64(v)) for
/// each v, starting from h = splitmix64(master). Any implementation of this
/// rule reproduces the per-trial streams exactly.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t v : path)
        h = splitmix64(h ^ splitmix64(v));
    return h;
}

// Sub-stream tags within one trial.
enum class Stream : std::uint64_t { data = 1, channel = 2, noise = 3 };

/// Random source with portable distributions: std::mt19937_64 is fully
/// specified by the standard, the transforms below are written out so that
/// streams do not depend on the standard library's distribution code.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const cplx z = box_muller();
        spare_ = z.imag();
        has_spare_ = true;
        return z.real();
    }

    /// Circularly-symmetric complex Gaussian CN(0, variance).
    cplx complex_normal(double variance) { return box_muller() * std::sqrt(0.5 * variance); }

  private:
    cplx box_muller() {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = kTwoPi * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace otfs
