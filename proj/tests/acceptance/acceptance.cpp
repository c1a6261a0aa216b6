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

// Acceptance gate. Each criterion prints one PASS/FAIL line; the exit code
// is the number of failed criteria. Criterion numbers given on the command
// line restrict the run to those criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "otfs/experiments.hpp"

using namespace otfs;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

const MetricRecord& find(const ResultTable& t, std::size_t q, std::size_t m, double vmax, double snr,
                         WindowMode mode) {
    for (const auto& r : t.records)
        if (r.antennas == q && r.delay_bins == m && r.max_doppler_hz == vmax && r.snr_db == snr &&
            r.window_mode == mode)
            return r;
    throw std::logic_error("acceptance: missing record");
}

// SNR at which a decreasing BER curve crosses `target`, interpolated in
// log10(BER). NaN when the sweep does not bracket the target.
double crossing_snr(const std::vector<double>& snr, const std::vector<double>& ber, double target) {
    for (std::size_t i = 1; i < snr.size(); ++i) {
        if (ber[i - 1] >= target && ber[i] < target) {
            if (ber[i] <= 0.0) {
                const double t = (ber[i - 1] - target) / (ber[i - 1] - ber[i]);
                return snr[i - 1] + t * (snr[i] - snr[i - 1]);
            }
            const double a = std::log10(ber[i - 1]);
            const double b = std::log10(ber[i]);
            const double t = (a - std::log10(target)) / (a - b);
            return snr[i - 1] + t * (snr[i] - snr[i - 1]);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// ------------------------------------------------------------------------

Verdict oracle_equivalence() {
    const auto start = Clock::now();
    Rng rng(2024);
    const std::size_t M = 4, N = 2, L = 3, Q = 2, blocks = 2, D = 2;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto ps = oracle::random_small_pathset(L, Q, rng);
        const auto grids = oracle::random_grids(M, N, blocks, rng);
        const TimeFrame tx = otfs_modulate_frame(grids);
        const auto rx = apply_channel(tx, ps, NoiseSpec::noiseless(), 0);
        const auto streamed = receive_frame(rx, ps, ReceiverConfig{M, N, blocks, D, WindowMode::rect, 0.1});
        const auto expected = oracle::matrix_receive_chain(ps, tx.samples, M, N, blocks, D);
        worst = std::max(worst, oracle::max_abs_diff(streamed, expected));
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    return {worst < 1e-10 && secs < 5.0,
            "max |diff| = " + fmt("%.3g", worst) + " (< 1e-10), " + fmt("%.2f", secs) + " s (< 5 s)"};
}

Verdict identity_recovery() {
    const std::size_t M = 128, N = 64, blocks = 3;
    const Constellation qam(4);
    std::size_t bits = 0, errors = 0;
    double worst = 0.0;
    for (std::size_t Q : {1, 7, 64}) {
        Rng rng(derive_seed(77, {Q}));
        std::vector<std::uint8_t> data(blocks * M * N * 2);
        for (auto& b : data)
            b = rng.bit();
        const cvec symbols = qam.map(data);
        std::vector<DelayDopplerGrid> grids;
        for (std::size_t b = 0; b < blocks; ++b)
            grids.emplace_back(M, N, cvec(symbols.begin() + std::ptrdiff_t(b * M * N),
                                          symbols.begin() + std::ptrdiff_t((b + 1) * M * N)));
        const PathSet ps(std::vector<Path>(Q, Path{1.0, 0, 0.0, 0.0}), Q, 1, 0.0, 1.0 / 4.95e6);
        const auto rx = apply_channel(otfs_modulate_frame(grids), ps, NoiseSpec::noiseless(), 0);
        const auto est = receive_frame(rx, ps, ReceiverConfig{M, N, blocks, M / 2, WindowMode::rect, 0.1});
        worst = std::max(worst, oracle::max_abs_diff(est, grids));
        errors += bit_errors(decide_bits(est, 1.0, qam), data);
        bits += data.size();
    }
    return {worst < 1e-10 && errors == 0 && bits >= 100000,
            "max |X_hat - X| = " + fmt("%.3g", worst) + ", " + std::to_string(errors) + " errors in " +
                std::to_string(bits) + " bits"};
}

Verdict linear_sinr_growth() {
    const auto start = Clock::now();
    ExperimentSpec s;
    s.name = "accept_linear";
    s.antennas = {16, 32, 64, 128};
    s.snr_db = {1.0};
    s.max_doppler_hz = {0.0};
    s.window_modes = {WindowMode::rect};
    s.trials = 30; // per-frame interference fluctuates by tens of percent
    s.master_seed = 301;
    const auto t = run_experiment(s, workers());
    std::vector<double> q, y;
    for (const auto& r : t.records) {
        q.push_back(double(r.antennas));
        y.push_back(r.sinr_linear);
    }
    // least-squares line and R^2
    const double n = double(q.size());
    double mq = 0, my = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        mq += q[i] / n;
        my += y[i] / n;
    }
    double sqq = 0, sqy = 0, syy = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        sqq += (q[i] - mq) * (q[i] - mq);
        sqy += (q[i] - mq) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    const double r2 = sqy * sqy / (sqq * syy);
    bool pass = r2 > 0.98;
    std::string steps;
    for (std::size_t i = 1; i < y.size(); ++i) {
        const double gain = 10.0 * std::log10(y[i] / y[i - 1]);
        pass = pass && std::abs(gain - 3.0) <= 0.7;
        steps += (i > 1 ? "/" : "") + fmt("%.2f", gain);
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    pass = pass && secs <= 300.0;
    return {pass, "R^2 = " + fmt("%.4f", r2) + " (> 0.98), per-doubling gain " + steps + " dB (3 +/- 0.7), " +
                      fmt("%.0f", secs) + " s"};
}

Verdict saturation_and_rdc() {
    const auto start = Clock::now();
    ExperimentSpec s;
    s.name = "accept_saturation";
    s.antennas = {32, 128};
    s.snr_db = {1.0};
    s.max_doppler_hz = {10.9e3};
    s.trials = 6;
    s.master_seed = 401;
    const auto t = run_experiment(s, workers());
    auto sinr = [&](std::size_t q, WindowMode m) { return find(t, q, 128, 10.9e3, 1.0, m).sinr_linear; };
    const double rect_ratio = sinr(128, WindowMode::rect) / sinr(32, WindowMode::rect);
    const double rdc_ratio = sinr(128, WindowMode::rdc) / sinr(32, WindowMode::rdc);
    const double rdc_gain = to_db(sinr(128, WindowMode::rdc)) - to_db(sinr(128, WindowMode::rect));
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool pass = rect_ratio < 2.0 && rdc_ratio > 3.0 && rdc_gain >= 3.0 && secs <= 600.0;
    return {pass, "rect SINR(128)/SINR(32) = " + fmt("%.2f", rect_ratio) + " (< 2), rdc ratio = " +
                      fmt("%.2f", rdc_ratio) + " (> 3), rdc - rect at Q=128 = " + fmt("%.2f", rdc_gain) +
                      " dB (>= 3); rect " + fmt("%.2f", to_db(sinr(32, WindowMode::rect))) + "/" +
                      fmt("%.2f", to_db(sinr(128, WindowMode::rect))) + " dB, rdc " +
                      fmt("%.2f", to_db(sinr(32, WindowMode::rdc))) + "/" +
                      fmt("%.2f", to_db(sinr(128, WindowMode::rdc))) + " dB"};
}

Verdict residual_doppler_shape() {
    LinkConfig cfg;
    cfg.antennas = 512;
    cfg.max_doppler_hz = 10.9e3;
    const std::size_t M = cfg.delay_bins, D = cfg.resolved_pilot_delay();
    const WindowMode modes[] = {WindowMode::rect, WindowMode::rdc};
    const int trials = 5;
    std::vector<double> rect(M, 0.0), rdc(M, 0.0);
    for (int t = 0; t < trials; ++t) {
        const auto run = run_link(cfg, modes, derive_seed(501, {std::uint64_t(t)}));
        const cvec g_rect = gain_profile(run.estimates[0], run.truth);
        const cvec g_rdc = gain_profile(run.estimates[1], run.truth);
        // normalise by the pilot row, whose residual Doppler factor is one
        for (std::size_t b = 0; b < M; ++b) {
            rect[b] += std::real(g_rect[b] / g_rect[D]) / trials;
            rdc[b] += std::real(g_rdc[b] / g_rdc[D]) / trials;
        }
    }
    const double beta = kTwoPi * cfg.max_doppler_hz * cfg.sample_period_s;
    double dev_rect = 0.0, dev_rdc = 0.0;
    for (std::size_t b = 0; b < M; ++b) {
        dev_rect = std::max(dev_rect, std::abs(rect[b] - bessel_j0(beta * (double(b) - double(D)))));
        dev_rdc = std::max(dev_rdc, std::abs(rdc[b] - 1.0));
    }
    return {dev_rect < 0.05 && dev_rdc < 0.05,
            "max |gain - J0| = " + fmt("%.4f", dev_rect) + ", max |rdc gain - 1| = " + fmt("%.4f", dev_rdc) +
                " (< 0.05); edge row gain " + fmt("%.3f", rect[0]) + " vs J0 " + fmt("%.3f", bessel_j0(beta * double(D)))};
}

Verdict jakes_monte_carlo() {
    Rng rng(601);
    const std::size_t n = 1000000;
    const std::vector<double> offsets{0.25, 0.5, 1.0, 2.0};
    const auto c = jakes_expectation_check(1.0, offsets, n, rng);
    const double bound = 5.0 / std::sqrt(double(n));
    return {c.max_deviation < bound && c.max_imag < bound,
            "max |mean - J0| = " + fmt("%.2e", c.max_deviation) + ", max |imag| = " + fmt("%.2e", c.max_imag) +
                " (< " + fmt("%.0e", bound) + ")"};
}

Verdict symbol_duration_duality() {
    ExperimentSpec a;
    a.name = "accept_duality_a";
    a.antennas = {200};
    a.snr_db = {0.0, 10.0, 20.0};
    a.max_doppler_hz = {5.5e3};
    a.window_modes = {WindowMode::rect};
    a.trials = 4;
    a.master_seed = 701;
    ExperimentSpec b = a;
    b.name = "accept_duality_b";
    b.delay_bins = {64};
    b.doppler_bins = 128;
    b.max_doppler_hz = {11e3};
    b.master_seed = 702;
    const auto ta = run_experiment(a, workers());
    const auto tb = run_experiment(b, workers());
    double worst = 0.0;
    std::string pairs;
    for (double snr : a.snr_db) {
        const double da = find(ta, 200, 128, 5.5e3, snr, WindowMode::rect).sinr_db;
        const double db = find(tb, 200, 64, 11e3, snr, WindowMode::rect).sinr_db;
        worst = std::max(worst, std::abs(da - db));
        pairs += (pairs.empty() ? "" : ", ") + fmt("%.2f", da) + "/" + fmt("%.2f", db);
    }
    return {worst <= 1.0, "SINR (M=128, 5.5 kHz)/(M=64, 11 kHz) = " + pairs + " dB, max gap " +
                              fmt("%.2f", worst) + " dB (<= 1)"};
}

Verdict rdc_ber_gain() {
    ExperimentSpec s;
    s.name = "accept_ber";
    s.antennas = {200};
    s.snr_db.clear();
    for (int snr = -20; snr <= -10; ++snr)
        s.snr_db.push_back(snr);
    s.max_doppler_hz = {0.0, 5.5e3, 10.9e3};
    s.trials = 4; // 327680 bits per point
    s.master_seed = 801;
    const auto t = run_experiment(s, workers());
    auto curve = [&](double vmax, WindowMode m) {
        std::vector<double> ber;
        for (double snr : s.snr_db)
            ber.push_back(find(t, 200, 128, vmax, snr, m).ber);
        return crossing_snr(s.snr_db, ber, 1e-2);
    };
    const double rect_fast = curve(10.9e3, WindowMode::rect);
    const double rdc_fast = curve(10.9e3, WindowMode::rdc);
    const double rdc_mid = curve(5.5e3, WindowMode::rdc);
    const double rect_static = curve(0.0, WindowMode::rect);
    const double gain = rect_fast - rdc_fast;
    const double gap = std::abs(rdc_mid - rect_static);
    const bool gain_ok = gain >= 3.0;
    const bool gap_ok = gap <= 1.0;
    std::string detail = "at BER 1e-2: 10.9 kHz rect " + fmt("%.2f", rect_fast) + " dB, rdc " + fmt("%.2f", rdc_fast) +
                         " dB, gain " + fmt("%.2f", gain) + " dB (>= 3) [" + (gain_ok ? "ok" : "fail") +
                         "]; 5.5 kHz rdc " + fmt("%.2f", rdc_mid) + " dB vs static " + fmt("%.2f", rect_static) +
                         " dB, gap " + fmt("%.2f", gap) + " dB (<= 1) [" + (gap_ok ? "ok" : "fail") + "]";
    return {gain_ok && gap_ok, detail};
}

Verdict determinism() {
    ExperimentSpec s;
    s.name = "accept_determinism";
    s.antennas = {4, 16};
    s.snr_db = {1.0, 10.0};
    s.max_doppler_hz = {0.0, 10.9e3};
    s.delay_bins = {64};
    s.doppler_bins = 16;
    s.blocks = 2;
    s.trials = 3;
    s.master_seed = 901;
    auto csv = [&](std::size_t w) {
        std::ostringstream os;
        write_csv(run_experiment(s, w), os);
        return os.str();
    };
    const std::string first = csv(1);
    const bool same_run = csv(1) == first;
    const bool same_workers = csv(8) == first;
    return {same_run && same_workers, std::string("repeat run ") + (same_run ? "identical" : "DIFFERS") +
                                          ", 1 vs 8 workers " + (same_workers ? "identical" : "DIFFERS") + " (" +
                                          std::to_string(first.size()) + " bytes)"};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"1 oracle equivalence", oracle_equivalence},
        {"2 identity-channel recovery", identity_recovery},
        {"3 linear SINR growth with Q (LTI)", linear_sinr_growth},
        {"4 rect saturation vs RDC at 10.9 kHz", saturation_and_rdc},
        {"5 residual Doppler row profile", residual_doppler_shape},
        {"6 Jakes expectation Monte Carlo", jakes_monte_carlo},
        {"7 symbol-duration / Doppler duality", symbol_duration_duality},
        {"8 RDC BER gain and 5.5 kHz vs static", rdc_ber_gain},
        {"9 determinism", determinism},
    };
    std::vector<bool> selected(criteria.size(), argc == 1);
    for (int i = 1; i < argc; ++i) {
        const int k = std::atoi(argv[i]);
        if (k < 1 || k > int(criteria.size())) {
            std::fprintf(stderr, "usage: %s [criterion numbers 1-%zu]\n", argv[0], criteria.size());
            return 64;
        }
        selected[std::size_t(k - 1)] = true;
    }
    int failed = 0;
    std::size_t ran = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected[i])
            continue;
        ++ran;
        const auto& [name, check] = criteria[i];
        const auto start = Clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        std::printf("[%s] %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), secs);
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria failed\n", failed, ran);
    return failed;
}
