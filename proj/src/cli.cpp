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

#include "cskfde/cli.hpp"
#include "cskfde/config.hpp"
#include "cskfde/errors.hpp"
#include "cskfde/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <sstream>
#include <thread>

namespace csk::cli
{
    namespace
    {
        struct Flags
        {
            std::string scheme = "qled";
            unsigned order = 4;
            double dt = 0.0;
            std::vector<double> dts{0.0};
            std::string fde = "on";
            std::size_t n = 64;
            std::size_t cp = 8;
            double rs = 24e6;
            std::vector<double> snr;
            std::string snr_range;
            double target_ber = 1e-6;
            std::uint64_t seed = 1;
            std::uint64_t min_errors = 100;
            std::uint64_t max_bits = 1'000'000'000;
            std::uint64_t bits = 1'000'000;
            unsigned threads = 1;
            std::string out;
            std::string json;
            std::string config;
            std::vector<std::string> entries;
        };

        bool is_usage_error(ErrorCode c)
        {
            switch (c)
            {
            case ErrorCode::UnsupportedOrder:
            case ErrorCode::InvalidConfig:
            case ErrorCode::InvalidPrefix:
            case ErrorCode::InvalidParameter:
            case ErrorCode::InvalidTarget:
            case ErrorCode::DimensionMismatch:
                return true;
            default:
                return false;
            }
        }

        bool parse_onoff(const std::string &v)
        {
            if (v == "on" || v == "true" || v == "1" || v == "yes")
                return true;
            if (v == "off" || v == "false" || v == "0" || v == "no")
                return false;
            throw Error(ErrorCode::InvalidConfig, "--fde expects on or off, got '" + v + "'");
        }

        void emit(const std::string &text, const std::string &path, std::ostream &out)
        {
            if (path.empty() || path == "-")
            {
                out << text;
                return;
            }
            std::ofstream f(path, std::ios::binary);
            if (!f)
                throw Error(ErrorCode::InvalidConfig, "cannot write " + path);
            f << text;
        }
    }

    int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"Colour shift keying link simulator with cyclic-prefix frequency-domain equalisation", "cskfde"};
        app.require_subcommand(1);
        Flags f;

        auto add_common = [&f](CLI::App *sub) {
            sub->add_option("--n", f.n, "block length N")->capture_default_str();
            sub->add_option("--cp", f.cp, "cyclic prefix length L")->capture_default_str();
            sub->add_option("--rs", f.rs, "symbol rate Rs [symbols/s]")->default_str("24e6");
            sub->add_option("--seed", f.seed, "master RNG seed")->capture_default_str();
            sub->add_option("--config", f.config, "JSON experiment file (flags override it)");
        };
        auto add_link = [&f, &add_common](CLI::App *sub, bool dt_list) {
            sub->add_option("--scheme", f.scheme, "LED scheme: tled or qled")->capture_default_str();
            sub->add_option("--order", f.order, "constellation order M")->capture_default_str();
            if (dt_list)
                sub->add_option("--dt", f.dts, "normalised delay spreads Drms/Tb (comma separated)")
                    ->delimiter(',')
                    ->default_str("0");
            else
                sub->add_option("--dt", f.dt, "normalised delay spread Drms/Tb")->capture_default_str();
            sub->add_option("--fde", f.fde, "frequency-domain equaliser: on or off")->capture_default_str();
            add_common(sub);
        };
        auto add_mc = [&f](CLI::App *sub) {
            sub->add_option("--min-errors", f.min_errors, "bit errors per point")->capture_default_str();
            sub->add_option("--max-bits", f.max_bits, "bit budget per point")->capture_default_str();
            sub->add_option("--threads", f.threads, "worker threads")->capture_default_str();
            sub->add_option("--out", f.out, "CSV output path (default stdout)");
        };

        auto *curve = app.add_subcommand("ber-curve", "BER against optical SNR");
        add_link(curve, false);
        add_mc(curve);
        curve->add_option("--snr", f.snr, "SNR points [dB] (comma separated)")->delimiter(',');
        curve->add_option("--snr-range", f.snr_range, "SNR grid lo:hi:step [dB]");

        auto *pvd = app.add_subcommand("power-vs-dt", "normalised power requirement against Dt");
        add_link(pvd, true);
        add_mc(pvd);
        pvd->add_option("--target-ber", f.target_ber, "target BER")->capture_default_str();
        pvd->add_option("--json", f.json, "JSON summary path");

        auto *t1 = app.add_subcommand("table1", "normalised power requirement table");
        add_common(t1);
        add_mc(t1);
        t1->add_option("--target-ber", f.target_ber, "target BER")->capture_default_str();
        t1->add_option("--entries", f.entries, "scheme:M:Dt:fde|nofde entries (default: full table)")->delimiter(',');
        t1->add_option("--json", f.json, "JSON summary path");

        auto *cons = app.add_subcommand("constellation", "constellation points as CSV");
        cons->add_option("--scheme", f.scheme, "LED scheme: tled or qled")->capture_default_str();
        cons->add_option("--order", f.order, "constellation order M")->capture_default_str();
        cons->add_option("--out", f.out, "CSV output path (default stdout)");

        auto *loop = app.add_subcommand("loopback-check", "noiseless end-to-end bit check");
        add_link(loop, false);
        loop->add_option("--bits", f.bits, "bits to transmit")->capture_default_str();
        loop->add_option("--out", f.out, "report path (default stdout)");

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::CallForHelp &e)
        {
            out << app.help();
            return 0;
        }
        catch (const CLI::CallForAllHelp &e)
        {
            out << app.help("", CLI::AppFormatMode::All);
            return 0;
        }
        catch (const CLI::ParseError &e)
        {
            err << "error: " << e.what() << "\n\n" << app.help();
            return 2;
        }

        CLI::App *sub = app.get_subcommands().front();
        ExperimentConfig cfg;
        try
        {
            auto given = [sub](const char *name) { return sub->get_option_no_throw(name) && sub->count(name) > 0; };

            if (sub == cons)
            {
                const Scheme scheme = parse_scheme(f.scheme);
                if (!is_supported_order(scheme, f.order))
                    throw Error(ErrorCode::UnsupportedOrder, std::to_string(f.order) + "-CSK is not supported for " +
                                                                 std::string(to_string(scheme)));
                emit(constellation_csv(build_constellation(scheme, f.order)), f.out, out);
                return 0;
            }

            if (!f.config.empty())
                apply_config_file(cfg, f.config);
            if (given("--scheme") || f.config.empty())
                cfg.scheme = parse_scheme(f.scheme);
            if (given("--order") || f.config.empty())
                cfg.order = f.order;
            if (given("--dt") || f.config.empty())
                cfg.dt = sub == pvd || sub == t1 ? f.dts.front() : f.dt;
            if (given("--fde") || f.config.empty())
                cfg.fde = parse_onoff(f.fde);
            if (given("--n"))
                cfg.n = f.n;
            if (given("--cp"))
                cfg.cp = f.cp;
            if (given("--rs"))
                cfg.rs = f.rs;
            if (given("--seed"))
                cfg.seed = f.seed;
            if (given("--min-errors"))
                cfg.min_bit_errors = f.min_errors;
            if (given("--max-bits"))
                cfg.max_bits = f.max_bits;
            if (given("--target-ber"))
                cfg.target_ber = f.target_ber;
            if (given("--snr"))
                cfg.snr_grid = f.snr;
            if (given("--snr-range"))
                cfg.snr_grid = parse_snr_range(f.snr_range);
            const unsigned threads = f.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : f.threads;

            if (sub == curve)
            {
                validate(cfg);
                if (cfg.snr_grid.empty())
                    throw Error(ErrorCode::InvalidConfig, "ber-curve needs --snr or --snr-range");
                std::ostringstream csv;
                write_curve_csv(csv, run_ber_curve(cfg, threads));
                emit(csv.str(), f.out, out);
                return 0;
            }
            if (sub == pvd || sub == t1)
            {
                std::vector<TableEntry> entries;
                if (sub == pvd)
                {
                    validate(cfg);
                    const std::vector<double> dts = given("--dt") ? f.dts : std::vector<double>{cfg.dt};
                    for (double dt : dts)
                        entries.push_back({cfg.scheme, cfg.order, dt, cfg.fde});
                }
                else if (!f.entries.empty())
                {
                    for (const auto &e : f.entries)
                        entries.push_back(parse_table_entry(e));
                }
                else
                    entries = table1_entries();
                const auto rows = run_table(cfg, entries, threads);
                std::ostringstream csv;
                write_requirements_csv(csv, rows);
                emit(csv.str(), f.out, out);
                if (!f.json.empty())
                    emit(requirements_json(rows, cfg.target_ber), f.json, out);
                return 0;
            }
            if (sub == loop)
            {
                const BerPoint p = run_noiseless(cfg, f.bits);
                std::ostringstream rep;
                rep << "scheme,M,Dt,fde,bits,errors\n"
                    << to_string(cfg.scheme) << ',' << cfg.order << ',' << cfg.dt << ',' << (cfg.fde ? "on" : "off")
                    << ',' << p.bits << ',' << p.errors << '\n';
                emit(rep.str(), f.out, out);
                if (p.errors != 0)
                {
                    err << "loopback check failed: " << p.errors << " bit errors in " << p.bits << " bits\n";
                    return 1;
                }
                return 0;
            }
        }
        catch (const Error &e)
        {
            err << "error: " << e.what() << '\n';
            if (is_usage_error(e.code()))
            {
                err << '\n' << sub->help();
                return 2;
            }
            return 1;
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return 1;
        }
        return 2;
    }

    int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
    {
        std::vector<const char *> argv;
        argv.push_back("cskfde");
        for (const auto &a : args)
            argv.push_back(a.c_str());
        return run(static_cast<int>(argv.size()), argv.data(), out, err);
    }
}
