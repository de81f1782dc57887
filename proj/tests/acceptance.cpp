// SPDX-License-Identifier: Apache-2.0
//
// cskfde - colour shift keying link simulation over diffuse optical channels
// Copyright (C) 2026 The cskfde Authors
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

// Acceptance run: one PASS/FAIL line per criterion check, non-zero exit if any check fails.

#include "cskfde/channel.hpp"
#include "cskfde/cli.hpp"
#include "cskfde/colorimetry.hpp"
#include "cskfde/fde.hpp"
#include "cskfde/harness.hpp"
#include "cskfde/modem.hpp"
#include "cskfde/rng.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace csk;

namespace
{
    int failures = 0;

    void report(bool ok, int criterion, const std::string &what)
    {
        if (!ok)
            ++failures;
        std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
        std::fflush(stdout);
    }

    std::string fmt(const char *f, auto... args)
    {
        char buf[512];
        std::snprintf(buf, sizeof buf, f, args...);
        return buf;
    }

    std::string name(Scheme s, unsigned m) { return fmt("%s %u-CSK", s == Scheme::Tled ? "TLED" : "QLED", m); }

    std::vector<std::pair<Scheme, unsigned>> all_alphabets()
    {
        std::vector<std::pair<Scheme, unsigned>> out;
        for (unsigned m : {4u, 8u, 16u})
            out.emplace_back(Scheme::Tled, m);
        for (unsigned m : {4u, 8u, 16u, 64u, 256u, 1024u, 4096u})
            out.emplace_back(Scheme::Qled, m);
        return out;
    }

    // Criterion 1

    void data_rates()
    {
        struct Case
        {
            unsigned order;
            std::size_t l;
            double expected_mbps;
            double exact;
        };
        const Case cases[] = {{16, 8, 85.33, 64.0 * 24e6 * 4.0 / 72.0},
                              {4096, 8, 256.0, 256e6},
                              {16, 0, 96.0, 96e6}};
        for (const auto &c : cases)
        {
            const double r = data_rate(c.order, 64, c.l, 24e6);
            const bool ok = r == c.exact && std::round(r / 1e4) / 100.0 == c.expected_mbps;
            report(ok, 1, fmt("data rate M=%u N=64 L=%zu: %.6f Mbit/s (expected %.2f)", c.order, c.l, r / 1e6,
                              c.expected_mbps));
        }
    }

    // Criterion 5

    void properties()
    {
        {
            bool ok = true;
            std::uint64_t bits = 0;
            for (const auto &[scheme, m] : all_alphabets())
                for (double dt : {0.0, 0.5, 1.0})
                {
                    ExperimentConfig cfg;
                    cfg.scheme = scheme;
                    cfg.order = m;
                    cfg.dt = dt;
                    cfg.fde = true;
                    const auto p = run_noiseless(cfg, 1'000'000);
                    bits += p.bits;
                    if (p.errors != 0 || p.bits < 1'000'000)
                    {
                        ok = false;
                        std::printf("  loopback %s Dt=%g: %llu errors\n", name(scheme, m).c_str(), dt,
                                    static_cast<unsigned long long>(p.errors));
                    }
                }
            report(ok, 5, fmt("noiseless FDE loopback, every alphabet x Dt {0, 0.5, 1}, %llu bits total",
                              static_cast<unsigned long long>(bits)));
        }
        {
            double worst_xy = 0.0, worst_sum = 0.0;
            std::size_t max_nonzero_qled = 0, points = 0;
            for (const auto &[scheme, m] : all_alphabets())
            {
                const auto c = build_constellation(scheme, m);
                const auto sources = scheme == Scheme::Tled ? default_tled_sources() : default_qled_sources();
                for (const auto &p : c.points())
                {
                    const auto xy = chromaticity_from_intensity(p.intensity, sources.sources);
                    worst_xy = std::max({worst_xy, std::abs(xy.x - p.xy.x), std::abs(xy.y - p.xy.y)});
                    worst_sum = std::max(worst_sum, std::abs(p.intensity.sum() - 1.0));
                    if (scheme == Scheme::Qled)
                        max_nonzero_qled = std::max(max_nonzero_qled, p.intensity.nonzero_count());
                    ++points;
                }
            }
            report(worst_xy < 1e-12, 5, fmt("chromaticity round trip over %zu points, max error %.2e", points, worst_xy));
            report(worst_sum < 1e-12, 5, fmt("intensity sum = 1, max deviation %.2e", worst_sum));
            report(max_nonzero_qled <= 3, 5, fmt("QLED non-zero intensities per symbol <= 3 (max %zu)", max_nonzero_qled));
        }
        {
            Rng rng(derive_seed(99, 0));
            double dft_err = 0.0, round_err = 0.0, parseval_err = 0.0;
            for (std::size_t n = 1; n <= 1024; n *= 2)
            {
                std::vector<double> x(n);
                for (auto &v : x)
                    v = rng.uniform() * 2.0 - 1.0;
                const auto fast = dft(x);
                std::vector<cplx> xc(x.begin(), x.end());
                const auto slow = oracle::naive_dft(xc, false);
                double energy_t = 0.0, energy_f = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                {
                    dft_err = std::max(dft_err, std::abs(fast[k] - slow[k]));
                    energy_t += x[k] * x[k];
                    energy_f += std::norm(fast[k]);
                }
                const auto back = idft(fast);
                for (std::size_t k = 0; k < n; ++k)
                    round_err = std::max(round_err, std::abs(back[k] - xc[k]));
                parseval_err = std::max(parseval_err, std::abs(energy_t - energy_f / double(n)) / energy_t);
            }
            report(dft_err < 1e-10, 5, fmt("DFT vs naive oracle, N = 1..1024, max error %.2e", dft_err));
            report(round_err < 1e-12, 5, fmt("idft(dft(x)) = x, max error %.2e", round_err));
            report(parseval_err < 1e-12, 5, fmt("Parseval with 1/N inverse scaling, max relative error %.2e", parseval_err));
        }
        {
            // Full framed pipeline on N = 16 blocks against a dense circulant solve.
            const std::size_t n = 16, l = 8;
            double worst = 0.0;
            Rng rng(derive_seed(99, 1));
            for (double dt : {0.1, 0.5, 1.0})
            {
                const auto taps = discretize_impulse_response(dt, 4, 24e6);
                std::vector<double> tx(3 * n);
                for (auto &v : tx)
                    v = rng.uniform();
                SymbolStream stream(1, 3 * (n + l));
                for (std::size_t b = 0; b < 3; ++b)
                {
                    const std::span<const double> block(tx.data() + b * n, n);
                    for (std::size_t i = 0; i < n + l; ++i)
                        stream.band(0)[b * (n + l) + i] = block[(i + n - l) % n];
                }
                ChannelModel model;
                model.taps = taps;
                const auto rx = apply_channel(stream, model, CILMatrix::identity(1), NoiseModel{0.0}, 1);
                const auto eq = build_zfe(taps, n);
                const auto h = oracle::circulant(taps, n);
                for (std::size_t b = 0; b < 3; ++b)
                {
                    std::vector<double> y(n);
                    for (std::size_t i = 0; i < n; ++i)
                        y[i] = rx.band(0)[b * (n + l) + l + i];
                    const auto fast = equalize_block(y, eq);
                    const auto slow = oracle::solve(h, y);
                    for (std::size_t i = 0; i < n; ++i)
                        worst = std::max({worst, std::abs(fast[i] - slow[i]), std::abs(fast[i] - tx[b * n + i])});
                }
            }
            report(worst < 1e-9, 5, fmt("framed FDE vs circulant-inversion oracle, N = 16, max error %.2e", worst));
        }
        {
            double worst = 0.0;
            for (Scheme s : {Scheme::Tled, Scheme::Qled})
            {
                const auto g = default_cil(s);
                const std::size_t d = g.size();
                oracle::Matrix a(d, std::vector<double>(d));
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j)
                        a[i][j] = g(i, j);
                const auto inv = g.inverse();
                const auto ref = oracle::inverse(a);
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j)
                    {
                        double acc = 0.0;
                        for (std::size_t k = 0; k < d; ++k)
                            acc += inv[i * d + k] * g(k, j);
                        worst = std::max({worst, std::abs(acc - (i == j ? 1.0 : 0.0)),
                                          std::abs(inv[i * d + j] - ref[i][j]) * 1e-2});
                    }
            }
            report(worst < 1e-12, 5, fmt("G^-1 G = I for TLED and QLED defaults, max error %.2e", worst));

            SymbolStream tx(4, 1);
            tx.band(2)[0] = 1.0;
            const auto rx = apply_channel(tx, make_channel_model(0.0, 4, 24e6), default_qled_cil(), NoiseModel{0.0}, 1);
            const bool ok = rx.band(0)[0] == 0.0 && rx.band(1)[0] == 0.003 && rx.band(2)[0] == 0.255 &&
                            rx.band(3)[0] == 0.030;
            report(ok, 5, fmt("yellow-band injection reads [%g, %g, %g, %g] (expected [0, 0.003, 0.255, 0.03])",
                              rx.band(0)[0], rx.band(1)[0], rx.band(2)[0], rx.band(3)[0]));
        }
    }

    bool monotone(const std::vector<BerPoint> &points, std::string &detail)
    {
        for (std::size_t i = 1; i < points.size(); ++i)
        {
            const auto a = wilson_interval(points[i - 1].errors, points[i - 1].bits);
            const auto b = wilson_interval(points[i].errors, points[i].bits);
            if (b.lo > a.hi)
            {
                detail = fmt("BER rises from %.3e at %.2f dB to %.3e at %.2f dB", points[i - 1].ber,
                             points[i - 1].snr_db, points[i].ber, points[i].snr_db);
                return false;
            }
        }
        return true;
    }

    void curves(unsigned threads)
    {
        struct Case
        {
            Scheme scheme;
            unsigned order;
            double dt;
            bool fde;
        };
        const Case cases[] = {{Scheme::Tled, 4, 0.5, true},  {Scheme::Tled, 4, 0.5, false}, {Scheme::Tled, 16, 1.0, true},
                              {Scheme::Qled, 4, 1.0, false}, {Scheme::Qled, 64, 0.1, true}};
        for (const auto &c : cases)
        {
            ExperimentConfig cfg;
            cfg.scheme = c.scheme;
            cfg.order = c.order;
            cfg.dt = c.dt;
            cfg.fde = c.fde;
            cfg.seed = 2024;
            cfg.max_bits = 4'000'000;
            for (double s = 0.0; s <= 20.0; s += 1.0)
                cfg.snr_grid.push_back(s);
            const auto curve = run_ber_curve(cfg, threads);
            std::string detail = "non-increasing within 95% Wilson intervals";
            const bool ok = monotone(curve.points, detail);
            report(ok, 5, fmt("BER curve %s Dt=%g FDE %s, 0..20 dB: %s", name(c.scheme, c.order).c_str(), c.dt,
                              c.fde ? "on" : "off", detail.c_str()));
        }
    }

    // Criteria 2 to 4

    struct Key
    {
        Scheme scheme;
        unsigned order;
        double dt;
        bool fde;
        auto operator<=>(const Key &) const = default;
    };

    std::map<Key, PowerRequirement> requirements(unsigned threads)
    {
        std::vector<TableEntry> entries;
        auto add = [&](Scheme s, unsigned m, double dt, bool fde) {
            for (const auto &e : entries)
                if (e.scheme == s && e.order == m && e.dt == dt && e.fde == fde)
                    return;
            entries.push_back({s, m, dt, fde});
        };
        for (auto [s, m] : std::vector<std::pair<Scheme, unsigned>>{
                 {Scheme::Tled, 4}, {Scheme::Tled, 16}, {Scheme::Qled, 4}, {Scheme::Qled, 64}})
            for (double dt : {0.1, 1.0})
                add(s, m, dt, true);
        add(Scheme::Qled, 4, 1.0, false);
        for (unsigned m : {4u, 8u, 16u})
        {
            add(Scheme::Tled, m, 0.1, true);
            add(Scheme::Qled, m, 0.1, true);
        }
        add(Scheme::Tled, 4, 0.1, false);
        add(Scheme::Tled, 4, 0.5, false);
        add(Scheme::Tled, 16, 0.5, false);
        add(Scheme::Tled, 4, 1.0, false);

        ExperimentConfig base;
        base.seed = 20240601;
        base.target_ber = 1e-6;
        const auto rows = run_table(base, entries, threads);
        std::map<Key, PowerRequirement> out;
        for (const auto &r : rows)
        {
            const auto &e = r.entry;
            out[{e.scheme, e.order, e.dt, e.fde}] = r.requirement;
            std::printf("  %-28s %s dB  (%zu decision points)\n", to_string(e).c_str(),
                        format_db(r.requirement.achievable ? r.requirement.snr_o_db : INFINITY).c_str(),
                        r.requirement.trace.size());
        }
        std::fflush(stdout);
        return out;
    }

    double value(const PowerRequirement &r) { return r.achievable ? r.snr_o_db : INFINITY; }

    void table_checks(const std::map<Key, PowerRequirement> &req)
    {
        auto get = [&](Scheme s, unsigned m, double dt, bool fde) { return value(req.at({s, m, dt, fde})); };

        struct Spot
        {
            Scheme scheme;
            unsigned order;
            double dt;
            double table;
        };
        const Spot spots[] = {{Scheme::Tled, 4, 0.1, 8.1},    {Scheme::Tled, 4, 1.0, 10.8},
                              {Scheme::Tled, 16, 0.1, 12.6},  {Scheme::Tled, 16, 1.0, 13.87},
                              {Scheme::Qled, 4, 0.1, 5.3},    {Scheme::Qled, 4, 1.0, 7.9},
                              {Scheme::Qled, 64, 0.1, 13.62}, {Scheme::Qled, 64, 1.0, 14.42}};
        for (const auto &s : spots)
        {
            const double v = get(s.scheme, s.order, s.dt, true);
            report(std::abs(v - s.table) <= 0.75, 2,
                   fmt("%s Dt=%g FDE: %s dB (table %.2f +/- 0.75)", name(s.scheme, s.order).c_str(), s.dt,
                       format_db(v).c_str(), s.table));
        }

        {
            const double d = get(Scheme::Qled, 4, 1.0, false) - get(Scheme::Qled, 4, 1.0, true);
            report(std::abs(d - 12.6) <= 1.0, 3,
                   fmt("(a) QLED 4-CSK Dt=1 unequalised - FDE: %s dB (expected 12.6 +/- 1.0)", format_db(d).c_str()));
        }
        const double gaps[] = {2.8, 2.05, 2.6};
        const unsigned orders[] = {4, 8, 16};
        for (int i = 0; i < 3; ++i)
        {
            const double d = get(Scheme::Tled, orders[i], 0.1, true) - get(Scheme::Qled, orders[i], 0.1, true);
            report(std::abs(d - gaps[i]) <= 0.5, 3,
                   fmt("(b) TLED - QLED %u-CSK FDE gap at Dt=0.1: %s dB (expected %.2f +/- 0.5)", orders[i],
                       format_db(d).c_str(), gaps[i]));
        }
        {
            const double d = get(Scheme::Tled, 4, 0.5, false) - get(Scheme::Tled, 4, 0.1, false);
            report(std::abs(d - 8.1) <= 1.0, 3,
                   fmt("(c) TLED 4-CSK unequalised Dt 0.1 -> 0.5: %s dB (expected 8.1 +/- 1.0)", format_db(d).c_str()));
        }

        const double t16 = get(Scheme::Tled, 16, 0.5, false);
        report(!std::isfinite(t16), 4,
               fmt("TLED 16-CSK unequalised Dt=0.5: %s (expected Unachievable at 40 dB)", format_db(t16).c_str()));
        const double t4 = get(Scheme::Tled, 4, 1.0, false);
        report(!std::isfinite(t4), 4,
               fmt("TLED 4-CSK unequalised Dt=1: %s (expected Unachievable at 40 dB)", format_db(t4).c_str()));
        const double q4 = get(Scheme::Qled, 4, 1.0, false);
        report(std::abs(q4 - 20.5) <= 1.0, 4,
               fmt("QLED 4-CSK unequalised Dt=1: %s dB (expected 20.5 +/- 1.0)", format_db(q4).c_str()));
    }

    // Criterion 6

    void determinism()
    {
        const auto dir = std::filesystem::temp_directory_path() / "cskfde_acceptance";
        std::filesystem::create_directories(dir);
        const std::vector<std::vector<std::string>> invocations{
            {"ber-curve", "--scheme", "qled", "--order", "16", "--dt", "0.5", "--fde", "on", "--snr-range", "6:14:2",
             "--seed", "5", "--max-bits", "2000000", "--threads", "2"},
            {"power-vs-dt", "--scheme", "tled", "--order", "8", "--dt", "0,0.5,1", "--fde", "off", "--target-ber",
             "1e-3", "--seed", "5"},
            {"table1", "--entries", "qled:4:0.1:fde,tled:4:0.5:nofde", "--target-ber", "1e-4", "--seed", "5",
             "--threads", "2"},
            {"constellation", "--scheme", "qled", "--order", "64"},
            {"loopback-check", "--scheme", "tled", "--order", "16", "--dt", "1", "--bits", "200000"},
        };
        for (const auto &args : invocations)
        {
            std::string outputs[2];
            int codes[2];
            for (int k = 0; k < 2; ++k)
            {
                std::ostringstream out, err;
                codes[k] = cli::run(args, out, err);
                outputs[k] = out.str() + "\n--\n" + err.str();
            }
            std::string line;
            for (const auto &a : args)
                line += (line.empty() ? "" : " ") + a;
            report(codes[0] == 0 && codes[0] == codes[1] && outputs[0] == outputs[1] && !outputs[0].empty(), 6,
                   fmt("byte-identical repeated output: cskfde %s", line.c_str()));
        }
    }
}

int main(int argc, char **argv)
{
    const auto t0 = std::chrono::steady_clock::now();
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    bool quick = false;
    for (int i = 1; i < argc; ++i)
    {
        const std::string a = argv[i];
        if (a == "--quick")
            quick = true;
        else if (a.rfind("--threads=", 0) == 0)
            threads = static_cast<unsigned>(std::stoul(a.substr(10)));
    }

    data_rates();
    properties();
    curves(threads);
    determinism();
    if (!quick)
        table_checks(requirements(threads));

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d check(s) failed, %.0f s\n", failures, secs);
    return failures == 0 ? 0 : 1;
}
