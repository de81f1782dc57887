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

#include "cskfde/config.hpp"
#include "cskfde/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace csk
{
    namespace
    {
        using nlohmann::json;

        template <class T>
        T get(const json &j, const char *key)
        {
            try
            {
                return j.at(key).get<T>();
            }
            catch (const json::exception &e)
            {
                throw Error(ErrorCode::InvalidConfig, std::string("config key '") + key + "': " + e.what());
            }
        }
    }

    std::vector<double> snr_range(double lo, double hi, double step)
    {
        if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi))
            throw Error(ErrorCode::InvalidConfig, "SNR range needs finite lo <= hi and a positive step");
        std::vector<double> out;
        const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5));
        for (std::size_t i = 0; i <= count; ++i)
            out.push_back(lo + static_cast<double>(i) * step);
        return out;
    }

    std::vector<double> parse_snr_range(const std::string &text)
    {
        std::vector<double> v;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ':'))
        {
            try
            {
                std::size_t used = 0;
                v.push_back(std::stod(item, &used));
                if (used != item.size())
                    throw std::invalid_argument(item);
            }
            catch (const std::exception &)
            {
                throw Error(ErrorCode::InvalidConfig, "SNR range '" + text + "' is not lo:hi:step");
            }
        }
        if (v.size() != 3)
            throw Error(ErrorCode::InvalidConfig, "SNR range '" + text + "' is not lo:hi:step");
        return snr_range(v[0], v[1], v[2]);
    }

    void apply_config_json(ExperimentConfig &cfg, const std::string &json_text)
    {
        json j;
        try
        {
            j = json::parse(json_text);
        }
        catch (const json::exception &e)
        {
            throw Error(ErrorCode::InvalidConfig, std::string("malformed JSON: ") + e.what());
        }
        if (!j.is_object())
            throw Error(ErrorCode::InvalidConfig, "configuration must be a JSON object");

        static const std::set<std::string> known = {
            "scheme", "order", "dt", "fde", "n", "cp", "rs", "channel_taps", "snr", "snr_range", "target_ber",
            "min_bit_errors", "max_bits", "seed", "snr_lo", "snr_hi", "bracket_db", "early_stop", "cil"};
        for (const auto &item : j.items())
            if (!known.count(item.key()))
                throw Error(ErrorCode::InvalidConfig, "unknown config key '" + item.key() + "'");

        if (j.contains("scheme"))
            cfg.scheme = parse_scheme(get<std::string>(j, "scheme"));
        if (j.contains("order"))
            cfg.order = get<unsigned>(j, "order");
        if (j.contains("dt"))
            cfg.dt = get<double>(j, "dt");
        if (j.contains("fde"))
            cfg.fde = get<bool>(j, "fde");
        if (j.contains("n"))
            cfg.n = get<std::size_t>(j, "n");
        if (j.contains("cp"))
            cfg.cp = get<std::size_t>(j, "cp");
        if (j.contains("rs"))
            cfg.rs = get<double>(j, "rs");
        if (j.contains("channel_taps"))
            cfg.channel_taps = get<std::size_t>(j, "channel_taps");
        if (j.contains("snr"))
            cfg.snr_grid = get<std::vector<double>>(j, "snr");
        if (j.contains("snr_range"))
        {
            const auto r = get<std::vector<double>>(j, "snr_range");
            if (r.size() != 3)
                throw Error(ErrorCode::InvalidConfig, "snr_range must be [lo, hi, step]");
            cfg.snr_grid = snr_range(r[0], r[1], r[2]);
        }
        if (j.contains("target_ber"))
            cfg.target_ber = get<double>(j, "target_ber");
        if (j.contains("min_bit_errors"))
            cfg.min_bit_errors = get<std::uint64_t>(j, "min_bit_errors");
        if (j.contains("max_bits"))
            cfg.max_bits = get<std::uint64_t>(j, "max_bits");
        if (j.contains("seed"))
            cfg.seed = get<std::uint64_t>(j, "seed");
        if (j.contains("snr_lo"))
            cfg.snr_lo = get<double>(j, "snr_lo");
        if (j.contains("snr_hi"))
            cfg.snr_hi = get<double>(j, "snr_hi");
        if (j.contains("bracket_db"))
            cfg.bracket_db = get<double>(j, "bracket_db");
        if (j.contains("early_stop"))
            cfg.early_stop = get<bool>(j, "early_stop");
        if (j.contains("cil"))
        {
            const auto rows = get<std::vector<std::vector<double>>>(j, "cil");
            std::vector<double> flat;
            for (const auto &row : rows)
            {
                if (row.size() != rows.size())
                    throw Error(ErrorCode::InvalidConfig, "cil must be a square matrix");
                flat.insert(flat.end(), row.begin(), row.end());
            }
            cfg.cil = CILMatrix(rows.size(), std::move(flat));
        }
    }

    void apply_config_file(ExperimentConfig &cfg, const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw Error(ErrorCode::InvalidConfig, "cannot open config file " + path);
        std::stringstream ss;
        ss << f.rdbuf();
        apply_config_json(cfg, ss.str());
    }
}
