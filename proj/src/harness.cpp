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

#include "cskfde/harness.hpp"
#include "cskfde/errors.hpp"
#include "cskfde/fde.hpp"
#include "cskfde/modem.hpp"
#include "cskfde/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace csk
{
    namespace
    {
        constexpr double decision_z = 3.2905267314919255; // two-sided 99.9 %

        CILMatrix cil_for(const ExperimentConfig &cfg)
        {
            return cfg.cil ? *cfg.cil : default_cil(cfg.scheme);
        }

        struct StopRule
        {
            std::uint64_t min_errors = 100;
            std::uint64_t max_bits = 0;
            std::optional<double> decision_target;
        };

        class LinkSimulator
        {
        public:
            LinkSimulator(const ExperimentConfig &cfg, const Constellation &c, double sigma, std::uint64_t seed)
                : c_(c), k_(c.bits_per_symbol()), dim_(c.dimension()), n_(cfg.n), l_(effective_prefix(cfg)),
                  framed_(cfg.n + effective_prefix(cfg)),
                  channel_(make_channel_model(cfg.dt, cfg.order, cfg.rs, cfg.channel_taps).taps, cil_for(cfg),
                           NoiseModel{sigma}, derive_seed(seed, 1)),
                  cal_(cil_for(cfg)), symbols_(derive_seed(seed, 0)), idx_(n_), tx_(dim_ * framed_),
                  rx_(dim_ * framed_), blk_(dim_ * n_), recv_(dim_)
            {
                if (cfg.fde)
                    eq_.emplace(build_zfe(make_channel_model(cfg.dt, cfg.order, cfg.rs, cfg.channel_taps).taps, n_));
            }

            // Bit errors in the next block.
            std::uint64_t run_block()
            {
                const auto table = c_.flat_intensities();
                for (std::size_t i = 0; i < n_; ++i)
                    idx_[i] = symbols_.bits(k_);
                for (std::size_t b = 0; b < dim_; ++b)
                {
                    double *dst = tx_.data() + b * framed_;
                    for (std::size_t i = 0; i < n_; ++i)
                        dst[l_ + i] = table[idx_[i] * dim_ + b];
                    for (std::size_t i = 0; i < l_; ++i)
                        dst[i] = dst[n_ + i];
                }
                channel_.process(tx_, rx_, framed_);
                cal_.apply(rx_, framed_);
                for (std::size_t b = 0; b < dim_; ++b)
                    std::copy(rx_.begin() + static_cast<std::ptrdiff_t>(b * framed_ + l_),
                              rx_.begin() + static_cast<std::ptrdiff_t>((b + 1) * framed_),
                              blk_.begin() + static_cast<std::ptrdiff_t>(b * n_));
                if (eq_)
                {
                    std::size_t b = 0;
                    for (; b + 1 < dim_; b += 2)
                        eq_->equalize_pair(std::span<double>(blk_.data() + b * n_, n_),
                                           std::span<double>(blk_.data() + (b + 1) * n_, n_));
                    if (b < dim_)
                        eq_->equalize(std::span<double>(blk_.data() + b * n_, n_));
                }
                std::uint64_t errors = 0;
                for (std::size_t i = 0; i < n_; ++i)
                {
                    for (std::size_t b = 0; b < dim_; ++b)
                        recv_[b] = blk_[b * n_ + i];
                    const std::size_t det = ml_detect(recv_, c_);
                    errors += static_cast<std::uint64_t>(std::popcount(c_.label_of(idx_[i]) ^ c_.label_of(det)));
                }
                return errors;
            }

            std::uint64_t bits_per_block() const noexcept { return static_cast<std::uint64_t>(n_) * k_; }

        private:
            const Constellation &c_;
            unsigned k_;
            std::size_t dim_, n_, l_, framed_;
            ChannelState channel_;
            Calibrator cal_;
            std::optional<BlockEqualizer> eq_;
            Rng symbols_;
            std::vector<std::size_t> idx_;
            std::vector<double> tx_, rx_, blk_, recv_;
        };

        BerPoint simulate(const ExperimentConfig &cfg, const Constellation &c, double sigma, std::uint64_t seed,
                          const StopRule &rule)
        {
            LinkSimulator sim(cfg, c, sigma, seed);
            sim.run_block(); // warm-up
            BerPoint p;
            const std::uint64_t per_block = sim.bits_per_block();
            while (true)
            {
                p.errors += sim.run_block();
                p.bits += per_block;
                if (p.errors >= rule.min_errors || p.bits >= rule.max_bits)
                    break;
                if (rule.decision_target)
                {
                    const auto ci = wilson_interval(p.errors, p.bits, decision_z);
                    if (ci.lo > *rule.decision_target || ci.hi < *rule.decision_target)
                        break;
                }
            }
            p.ber = p.bits ? static_cast<double>(p.errors) / static_cast<double>(p.bits) : 0.0;
            p.censored = p.errors < rule.min_errors && p.bits >= rule.max_bits;
            return p;
        }

        std::string fmt(const char *f, double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, f, v);
            return buf;
        }

        template <class F>
        void parallel_for(std::size_t count, unsigned threads, F &&body)
        {
            threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
            if (threads <= 1)
            {
                for (std::size_t i = 0; i < count; ++i)
                    body(i);
                return;
            }
            std::atomic<std::size_t> next{0};
            std::exception_ptr failure;
            std::mutex m;
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < count; i = next++)
                    {
                        try
                        {
                            body(i);
                        }
                        catch (...)
                        {
                            std::lock_guard lock(m);
                            if (!failure)
                                failure = std::current_exception();
                        }
                    }
                });
            for (auto &th : pool)
                th.join();
            if (failure)
                std::rethrow_exception(failure);
        }
    }

    void validate(const ExperimentConfig &cfg)
    {
        if (!is_supported_order(cfg.scheme, cfg.order))
            throw Error(ErrorCode::UnsupportedOrder, std::to_string(cfg.order) + "-CSK is not supported for " +
                                                         std::string(to_string(cfg.scheme)));
        if (!(cfg.dt >= 0.0) || !std::isfinite(cfg.dt))
            throw Error(ErrorCode::InvalidParameter, "Dt must be finite and non-negative");
        if (!(cfg.rs > 0.0) || !std::isfinite(cfg.rs))
            throw Error(ErrorCode::InvalidParameter, "symbol rate must be positive");
        if (cfg.n == 0 || (cfg.n & (cfg.n - 1)) != 0)
            throw Error(ErrorCode::InvalidParameter, "block length must be a power of two");
        if (cfg.cp > cfg.n)
            throw Error(ErrorCode::InvalidPrefix, "cyclic prefix longer than the block");
        if (cfg.channel_taps == 0 || cfg.channel_taps > cfg.n)
            throw Error(ErrorCode::InvalidParameter, "channel tap count must be in 1..N");
        if (cfg.fde && cfg.cp + 1 < cfg.channel_taps)
            throw Error(ErrorCode::InvalidPrefix, "cyclic prefix shorter than the channel memory");
        if (!(cfg.target_ber > 0.0 && cfg.target_ber < 0.5))
            throw Error(ErrorCode::InvalidTarget, "target BER must lie in (0, 0.5)");
        if (cfg.max_bits == 0)
            throw Error(ErrorCode::InvalidParameter, "max_bits must be positive");
        for (double s : cfg.snr_grid)
            if (!std::isfinite(s))
                throw Error(ErrorCode::InvalidParameter, "SNR values must be finite");
        if (!(cfg.snr_lo < cfg.snr_hi) || !std::isfinite(cfg.snr_lo) || !std::isfinite(cfg.snr_hi))
            throw Error(ErrorCode::InvalidParameter, "SNR search range must be finite with lo < hi");
        if (!(cfg.bracket_db > 0.0))
            throw Error(ErrorCode::InvalidParameter, "bisection bracket must be positive");
        if (cfg.cil && cfg.cil->size() != led_count(cfg.scheme))
            throw Error(ErrorCode::DimensionMismatch, "cross-talk matrix size does not match the scheme");
    }

    std::size_t effective_prefix(const ExperimentConfig &cfg) { return cfg.fde ? cfg.cp : 0; }

    double data_rate(unsigned order, std::size_t n, std::size_t l, double rs)
    {
        return static_cast<double>(n) * rs * std::log2(static_cast<double>(order)) / static_cast<double>(n + l);
    }

    double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

    double q_inverse(double p)
    {
        if (!(p > 0.0 && p <= 0.5))
            throw Error(ErrorCode::InvalidTarget, "tail probability must lie in (0, 0.5]");
        if (p == 0.5)
            return 0.0;
        // Newton on log Q, started from the asymptotic tail expansion.
        const double t = std::sqrt(-2.0 * std::log(p));
        double x = t - (2.515517 + 0.802853 * t + 0.010328 * t * t) /
                           (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t);
        for (int i = 0; i < 50; ++i)
        {
            const double q = q_function(x);
            const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
            const double step = (q - p) / pdf;
            x += step;
            if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x)))
                break;
        }
        return x;
    }

    double ook_reference(double target_ber, double sigma)
    {
        if (!(sigma >= 0.0))
            throw Error(ErrorCode::InvalidParameter, "noise deviation must be non-negative");
        return sigma * q_inverse(target_ber);
    }

    double noise_sigma(double snr_o_db, std::size_t detectors, double mean_power)
    {
        return mean_power / (std::sqrt(static_cast<double>(detectors)) * std::pow(10.0, snr_o_db / 10.0));
    }

    double optical_snr_db(double sigma, std::size_t detectors, double mean_power)
    {
        return 10.0 * std::log10(mean_power / (std::sqrt(static_cast<double>(detectors)) * sigma));
    }

    double normalisation_offset_db(double target_ber) { return 10.0 * std::log10(q_inverse(target_ber)); }

    WilsonInterval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z)
    {
        if (trials == 0)
            return {0.0, 1.0};
        const double n = static_cast<double>(trials);
        const double p = static_cast<double>(errors) / n;
        const double z2 = z * z;
        const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
        return {errors == 0 ? 0.0 : std::max(0.0, centre - half), errors == trials ? 1.0 : std::min(1.0, centre + half)};
    }

    BerPoint run_ber_point(const ExperimentConfig &cfg, double snr_o_db)
    {
        return run_ber_point(cfg, snr_o_db, cfg.seed);
    }

    BerPoint run_ber_point(const ExperimentConfig &cfg, double snr_o_db, std::uint64_t seed)
    {
        validate(cfg);
        if (!std::isfinite(snr_o_db))
            throw Error(ErrorCode::InvalidParameter, "SNR must be finite");
        const Constellation c = build_constellation(cfg.scheme, cfg.order);
        const double sigma = noise_sigma(snr_o_db, c.dimension(), c.mean_total_intensity());
        BerPoint p = simulate(cfg, c, sigma, seed, StopRule{cfg.min_bit_errors, cfg.max_bits, std::nullopt});
        p.snr_db = snr_o_db;
        return p;
    }

    BerPoint run_noiseless(const ExperimentConfig &cfg, std::uint64_t bits)
    {
        validate(cfg);
        const Constellation c = build_constellation(cfg.scheme, cfg.order);
        BerPoint p = simulate(cfg, c, 0.0, cfg.seed, StopRule{std::numeric_limits<std::uint64_t>::max(), bits, std::nullopt});
        p.snr_db = std::numeric_limits<double>::infinity();
        p.censored = false;
        return p;
    }

    BerCurve run_ber_curve(const ExperimentConfig &cfg, unsigned threads)
    {
        validate(cfg);
        const Constellation c = build_constellation(cfg.scheme, cfg.order);
        BerCurve curve;
        curve.config = cfg;
        curve.points.resize(cfg.snr_grid.size());
        parallel_for(cfg.snr_grid.size(), threads, [&](std::size_t i) {
            const double sigma = noise_sigma(cfg.snr_grid[i], c.dimension(), c.mean_total_intensity());
            BerPoint p = simulate(cfg, c, sigma, derive_seed(cfg.seed, i),
                                  StopRule{cfg.min_bit_errors, cfg.max_bits, std::nullopt});
            p.snr_db = cfg.snr_grid[i];
            curve.points[i] = p;
        });
        return curve;
    }

    PowerRequirement find_power_requirement(const ExperimentConfig &cfg, double target_ber, double snr_lo, double snr_hi)
    {
        ExperimentConfig local = cfg;
        local.target_ber = target_ber;
        local.snr_lo = snr_lo;
        local.snr_hi = snr_hi;
        validate(local);

        const Constellation c = build_constellation(cfg.scheme, cfg.order);
        const double offset = normalisation_offset_db(target_ber);
        const StopRule rule{cfg.min_bit_errors, cfg.max_bits,
                            cfg.early_stop ? std::optional<double>(target_ber) : std::nullopt};

        PowerRequirement r;
        r.target_ber = target_ber;
        auto eval = [&](double norm_db) {
            const double sigma = noise_sigma(norm_db + offset, c.dimension(), c.mean_total_intensity());
            BerPoint p = simulate(cfg, c, sigma, cfg.seed, rule);
            p.snr_db = norm_db;
            r.trace.push_back(p);
            return p;
        };

        double lo = snr_lo, hi = snr_hi;
        BerPoint at_hi = eval(hi);
        if (at_hi.ber > target_ber)
        {
            r.achievable = false;
            r.snr_o_db = std::numeric_limits<double>::infinity();
            r.upper = at_hi;
            return r;
        }
        BerPoint at_lo = eval(lo);
        if (at_lo.ber <= target_ber)
        {
            r.achievable = true;
            r.snr_o_db = lo;
            r.upper = at_lo;
            return r;
        }
        while (hi - lo > cfg.bracket_db)
        {
            const double mid = 0.5 * (lo + hi);
            BerPoint p = eval(mid);
            if (p.ber > target_ber)
                lo = mid;
            else
            {
                hi = mid;
                at_hi = p;
            }
        }
        r.achievable = true;
        r.snr_o_db = 0.5 * (lo + hi);
        r.bracket_width_db = hi - lo;
        r.upper = at_hi;
        return r;
    }

    PowerRequirement find_power_requirement(const ExperimentConfig &cfg)
    {
        return find_power_requirement(cfg, cfg.target_ber, cfg.snr_lo, cfg.snr_hi);
    }

    TableEntry parse_table_entry(const std::string &text)
    {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ':'))
            parts.push_back(item);
        if (parts.size() != 4)
            throw Error(ErrorCode::InvalidConfig, "table entry '" + text + "' is not scheme:M:Dt:fde");
        TableEntry e;
        try
        {
            e.scheme = parse_scheme(parts[0]);
            std::size_t used = 0;
            const unsigned long m = std::stoul(parts[1], &used);
            if (used != parts[1].size())
                throw std::invalid_argument("order");
            e.order = static_cast<unsigned>(m);
            e.dt = std::stod(parts[2], &used);
            if (used != parts[2].size())
                throw std::invalid_argument("dt");
        }
        catch (const Error &)
        {
            throw;
        }
        catch (const std::exception &)
        {
            throw Error(ErrorCode::InvalidConfig, "table entry '" + text + "' has a malformed field");
        }
        std::string f = parts[3];
        std::transform(f.begin(), f.end(), f.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        if (f == "fde" || f == "on" || f == "1" || f == "true")
            e.fde = true;
        else if (f == "nofde" || f == "off" || f == "0" || f == "false" || f == "uneq")
            e.fde = false;
        else
            throw Error(ErrorCode::InvalidConfig, "table entry '" + text + "': equaliser flag must be fde or nofde");
        if (!is_supported_order(e.scheme, e.order))
            throw Error(ErrorCode::UnsupportedOrder, std::to_string(e.order) + "-CSK is not supported for " +
                                                         std::string(to_string(e.scheme)));
        if (!(e.dt >= 0.0) || !std::isfinite(e.dt))
            throw Error(ErrorCode::InvalidConfig, "table entry '" + text + "': Dt must be non-negative");
        return e;
    }

    std::string to_string(const TableEntry &e)
    {
        std::string s(to_string(e.scheme));
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        return s + ":" + std::to_string(e.order) + ":" + fmt("%g", e.dt) + ":" + (e.fde ? "fde" : "nofde");
    }

    std::uint64_t entry_seed(std::uint64_t master, const TableEntry &e)
    {
        std::uint64_t dt_bits;
        std::memcpy(&dt_bits, &e.dt, sizeof dt_bits);
        std::uint64_t h = splitmix64(e.scheme == Scheme::Tled ? 1 : 2);
        h = splitmix64(h ^ e.order);
        h = splitmix64(h ^ dt_bits);
        h = splitmix64(h ^ (e.fde ? 0x5bd1e995ull : 0x1b873593ull));
        return derive_seed(master, h);
    }

    std::vector<RequirementRow> run_table(const ExperimentConfig &base, const std::vector<TableEntry> &entries,
                                          unsigned threads)
    {
        std::vector<RequirementRow> rows(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i)
        {
            ExperimentConfig cfg = base;
            cfg.scheme = entries[i].scheme;
            cfg.order = entries[i].order;
            cfg.dt = entries[i].dt;
            cfg.fde = entries[i].fde;
            if (base.cil && base.cil->size() != led_count(cfg.scheme))
                cfg.cil.reset();
            validate(cfg);
        }
        parallel_for(entries.size(), threads, [&](std::size_t i) {
            ExperimentConfig cfg = base;
            cfg.scheme = entries[i].scheme;
            cfg.order = entries[i].order;
            cfg.dt = entries[i].dt;
            cfg.fde = entries[i].fde;
            if (base.cil && base.cil->size() != led_count(cfg.scheme))
                cfg.cil.reset();
            cfg.seed = entry_seed(base.seed, entries[i]);
            rows[i] = RequirementRow{entries[i], find_power_requirement(cfg)};
        });
        return rows;
    }

    std::vector<RequirementRow> sweep_dt(const ExperimentConfig &base, const std::vector<double> &dts, double target_ber,
                                         unsigned threads)
    {
        ExperimentConfig cfg = base;
        cfg.target_ber = target_ber;
        std::vector<TableEntry> entries;
        for (double dt : dts)
            entries.push_back(TableEntry{base.scheme, base.order, dt, base.fde});
        return run_table(cfg, entries, threads);
    }

    std::vector<TableEntry> table1_entries()
    {
        std::vector<TableEntry> out;
        for (bool fde : {false, true})
        {
            for (unsigned m : {4u, 8u, 16u})
                for (double dt : {0.1, 0.5, 1.0})
                    out.push_back({Scheme::Tled, m, dt, fde});
            for (unsigned m : {4u, 8u, 16u, 64u, 256u, 1024u, 4096u})
                for (double dt : {0.1, 0.5, 1.0})
                    out.push_back({Scheme::Qled, m, dt, fde});
        }
        return out;
    }

    std::string format_db(double v) { return std::isfinite(v) ? fmt("%.2f", v) : "inf"; }

    namespace
    {
        void write_row(std::ostream &out, Scheme scheme, unsigned order, double dt, bool fde, const std::string &snr,
                       const BerPoint &p)
        {
            out << to_string(scheme) << ',' << order << ',' << fmt("%g", dt) << ',' << (fde ? "on" : "off") << ','
                << snr << ',' << fmt("%.6e", p.ber) << ',' << p.bits << ',' << p.errors << '\n';
        }
    }

    void write_curve_csv(std::ostream &out, const BerCurve &curve)
    {
        out << "scheme,M,Dt,fde,snr_db,ber,bits,errors\n";
        const auto &c = curve.config;
        for (const auto &p : curve.points)
            write_row(out, c.scheme, c.order, c.dt, c.fde, fmt("%.4f", p.snr_db), p);
    }

    void write_requirements_csv(std::ostream &out, const std::vector<RequirementRow> &rows)
    {
        out << "scheme,M,Dt,fde,snr_db,ber,bits,errors\n";
        for (const auto &r : rows)
            write_row(out, r.entry.scheme, r.entry.order, r.entry.dt, r.entry.fde,
                      r.requirement.achievable ? fmt("%.4f", r.requirement.snr_o_db) : "inf", r.requirement.upper);
    }

    std::string requirements_json(const std::vector<RequirementRow> &rows, double target_ber)
    {
        nlohmann::ordered_json j;
        j["target_ber"] = target_ber;
        j["unit"] = "dB relative to OOK";
        for (const char *mode : {"unequalised", "fde"})
            j[mode] = nlohmann::ordered_json::object();
        for (const auto &r : rows)
        {
            auto &slot = j[r.entry.fde ? "fde" : "unequalised"][std::string(to_string(r.entry.scheme))]
                          [std::to_string(r.entry.order)][fmt("%g", r.entry.dt)];
            if (r.requirement.achievable)
                slot = std::round(r.requirement.snr_o_db * 100.0) / 100.0;
            else
                slot = "inf";
        }
        return j.dump(2) + "\n";
    }
}
