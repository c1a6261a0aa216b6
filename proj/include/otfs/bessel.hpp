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

namespace otfs {

/// Zero-order Bessel function of the first kind, J0(-x) = J0(x).
inline double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::abs(x)); }

} // namespace otfs
