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

#pragma once

#include "cskfde/channel.hpp"
#include "cskfde/colorimetry.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace csk
{
    struct ExperimentConfig
    {
        Scheme scheme = Scheme::Qled;
        unsigned order = 4;
        double dt = 0.0;
        bool fde = true;
        std::size_t n = 64;           // block length
        std::size_t cp = 8;           // cyclic prefix, used only with FDE
        double rs = 24e6;             // symbol rate
        std::size_t channel_taps = 8; // L_ch
        std::vector<double> snr_grid; // optical SNR points [dB]
        double target_ber = 1e-6;
        std::uint64_t min_bit_errors = 100;
        std::uint64_t max_bits = 1'000'000'000;
        std::uint64_t seed = 1;
        double snr_lo = 0.0; // bisection range, normalised dB
        double snr_hi = 40.0;
        double bracket_db = 0.1;
        bool early_stop = true; // stop a decision point once a 99.9% Wilson interval excludes the target
        std::optional<CILMatrix> cil;
    };

    // Throws UnsupportedOrder or InvalidParameter.
    void validate(const ExperimentConfig &cfg);

    // Cyclic prefix actually transmitted: cfg.cp with FDE, none without.
    std::size_t effective_prefix(const ExperimentConfig &cfg);

    // (N / (N + L)) Rs log2 M
    double data_rate(unsigned order, std::size_t n, std::size_t l, double rs);

    double q_function(double x);
    double q_inverse(double p); // throws InvalidTarget outside (0, 0.5]

    // OOK levels {0, 2P}, threshold P, unit responsivity: P = sigma Q^-1(target).
    double ook_reference(double target_ber, double sigma);

    // SNR_o = 10 log10(P_tx / (sqrt(detectors) sigma)), P_tx the mean transmitted optical power.
    double noise_sigma(double snr_o_db, std::size_t detectors, double mean_power = 1.0);
    double optical_snr_db(double sigma, std::size_t detectors, double mean_power = 1.0);

    // Normalised requirement = SNR_o - normalisation_offset_db(target) = 10 log10(P_tx / ook_reference).
    double normalisation_offset_db(double target_ber);

    struct WilsonInterval
    {
        double lo = 0.0;
        double hi = 1.0;
    };

    WilsonInterval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z = 1.959963984540054);

    struct BerPoint
    {
        double snr_db = 0.0;
        double ber = 0.0;
        std::uint64_t bits = 0;
        std::uint64_t errors = 0;
        bool censored = false; // max_bits reached before min_bit_errors
    };

    struct BerCurve
    {
        std::vector<BerPoint> points;
        ExperimentConfig config;
    };

    // One Monte Carlo point at the given (raw) optical SNR. The first block is a warm-up and not counted.
    BerPoint run_ber_point(const ExperimentConfig &cfg, double snr_o_db);
    BerPoint run_ber_point(const ExperimentConfig &cfg, double snr_o_db, std::uint64_t seed);

    // Noiseless run over at least the given number of counted bits.
    BerPoint run_noiseless(const ExperimentConfig &cfg, std::uint64_t bits);

    // Points of cfg.snr_grid, point i seeded with derive_seed(cfg.seed, i).
    BerCurve run_ber_curve(const ExperimentConfig &cfg, unsigned threads = 1);

    struct PowerRequirement
    {
        bool achievable = false;
        double snr_o_db = 0.0; // normalised to the OOK reference
        double target_ber = 1e-6;
        double bracket_width_db = 0.0;
        BerPoint upper; // measurement at the upper bracket edge
        std::vector<BerPoint> trace;
    };

    // Bisection over normalised dB in [snr_lo, snr_hi]; every evaluation reuses the stream of cfg.seed.
    PowerRequirement find_power_requirement(const ExperimentConfig &cfg, double target_ber, double snr_lo, double snr_hi);
    PowerRequirement find_power_requirement(const ExperimentConfig &cfg);

    struct TableEntry
    {
        Scheme scheme = Scheme::Qled;
        unsigned order = 4;
        double dt = 0.0;
        bool fde = true;
    };

    // "qled:4:1.0:fde" or "tled:16:0.5:nofde" (also on/off)
    TableEntry parse_table_entry(const std::string &text);
    std::string to_string(const TableEntry &entry);

    struct RequirementRow
    {
        TableEntry entry;
        PowerRequirement requirement;
    };

    // Entry seeds derive from (base.seed, entry) only, so results do not depend on order or threads.
    std::uint64_t entry_seed(std::uint64_t master, const TableEntry &entry);
    std::vector<RequirementRow> run_table(const ExperimentConfig &base, const std::vector<TableEntry> &entries,
                                          unsigned threads = 1);
    std::vector<RequirementRow> sweep_dt(const ExperimentConfig &base, const std::vector<double> &dts, double target_ber,
                                         unsigned threads = 1);

    // Entries of the published requirement table (all orders, Dt 0.1 / 0.5 / 1, with and without FDE).
    std::vector<TableEntry> table1_entries();

    std::string format_db(double v);

    // scheme,M,Dt,fde,snr_db,ber,bits,errors
    void write_curve_csv(std::ostream &out, const BerCurve &curve);
    // As above; snr_db holds the normalised requirement ("inf" if unachievable), the remaining
    // columns the measurement at the upper bracket edge.
    void write_requirements_csv(std::ostream &out, const std::vector<RequirementRow> &rows);
    // {"target_ber":..,"unequalised":{"TLED":{"4":{"0.1":8.3,..}}},"fde":{..}}
    std::string requirements_json(const std::vector<RequirementRow> &rows, double target_ber);
}
