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

#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace csk;

namespace
{
    struct Result
    {
        int code;
        std::string out;
        std::string err;
    };

    Result invoke(const std::vector<std::string> &args)
    {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return {code, out.str(), err.str()};
    }

    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }

    std::filesystem::path scratch(const std::string &name)
    {
        const auto dir = std::filesystem::temp_directory_path() / "cskfde_cli_test";
        std::filesystem::create_directories(dir);
        return dir / name;
    }
}

TEST_CASE("help lists the default link parameters", "[cli]")
{
    for (const char *sub : {"ber-curve", "power-vs-dt", "table1", "loopback-check"})
    {
        const auto r = invoke({sub, "--help"});
        CHECK(r.code == 0);
        CHECK(r.out.find("--n UINT [64]") != std::string::npos);
        CHECK(r.out.find("--cp UINT [8]") != std::string::npos);
        CHECK(r.out.find("--rs FLOAT [24e6]") != std::string::npos);
    }
    const auto top = invoke({"--help"});
    CHECK(top.code == 0);
    for (const char *sub : {"ber-curve", "power-vs-dt", "table1", "constellation", "loopback-check"})
        CHECK(top.out.find(sub) != std::string::npos);
}

TEST_CASE("usage errors exit with status 2", "[cli]")
{
    const auto order = invoke({"ber-curve", "--order", "32", "--scheme", "tled", "--snr", "10"});
    CHECK(order.code == 2);
    CHECK(order.err.find("UnsupportedOrder") != std::string::npos);
    CHECK(invoke({"constellation", "--order", "32", "--scheme", "tled"}).code == 2);
    CHECK(invoke({"ber-curve", "--bogus"}).code == 2);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"ber-curve", "--fde", "maybe", "--snr", "1"}).code == 2);
    CHECK(invoke({"ber-curve"}).code == 2); // no SNR grid
    CHECK(invoke({"table1", "--entries", "qled:5:1:fde"}).code == 2);
    CHECK(invoke({"loopback-check", "--config", "/nonexistent.json"}).code == 2);
}

TEST_CASE("constellation export", "[cli]")
{
    const auto r = invoke({"constellation", "--scheme", "qled", "--order", "16"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("label,x,y,I_0,I_1,I_2,I_3\n0000,", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 17);
}

TEST_CASE("loopback check", "[cli]")
{
    const auto r = invoke({"loopback-check", "--scheme", "tled", "--order", "16", "--dt", "1", "--fde", "on",
                           "--bits", "100000"});
    CHECK(r.code == 0);
    CHECK(r.out == "scheme,M,Dt,fde,bits,errors\ntled,16,1,on,100096,0\n");
}

TEST_CASE("BER curve output and determinism", "[cli]")
{
    const auto a = scratch("curve_a.csv"), b = scratch("curve_b.csv");
    const std::vector<std::string> base{"ber-curve", "--scheme", "tled", "--order", "4", "--dt", "0.5", "--fde", "on",
                                        "--snr-range", "4:8:2", "--seed", "7", "--max-bits", "200000"};
    auto args = base;
    args.insert(args.end(), {"--out", a.string()});
    REQUIRE(invoke(args).code == 0);
    args = base;
    args.insert(args.end(), {"--out", b.string(), "--threads", "3"});
    REQUIRE(invoke(args).code == 0);
    const auto text = slurp(a);
    CHECK(text == slurp(b));
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    CHECK(text.find("tled,4,0.5,on,6.0000,") != std::string::npos);
}

TEST_CASE("requirement tables", "[cli]")
{
    const auto csv = scratch("t1.csv"), json = scratch("t1.json");
    const std::vector<std::string> args{"table1", "--entries", "qled:4:0:fde,tled:4:0:nofde", "--target-ber", "1e-3",
                                        "--seed", "3", "--out", csv.string(), "--json", json.string()};
    REQUIRE(invoke(args).code == 0);
    const auto first = slurp(csv), first_json = slurp(json);
    REQUIRE(invoke(args).code == 0);
    CHECK(slurp(csv) == first);
    CHECK(slurp(json) == first_json);
    CHECK(first.rfind("scheme,M,Dt,fde,snr_db,ber,bits,errors\nqled,4,0,on,", 0) == 0);
    CHECK(first.find("\ntled,4,0,off,") != std::string::npos);
    CHECK(first_json.find("\"target_ber\": 0.001") != std::string::npos);

    const auto pvd = invoke({"power-vs-dt", "--scheme", "qled", "--order", "4", "--dt", "0,0.1", "--fde", "on",
                             "--target-ber", "1e-3", "--seed", "3"});
    CHECK(pvd.code == 0);
    CHECK(std::count(pvd.out.begin(), pvd.out.end(), '\n') == 3);
}

TEST_CASE("configuration file merges under flags", "[cli]")
{
    const auto cfg_path = scratch("exp.json");
    {
        std::ofstream f(cfg_path);
        f << R"({"scheme": "tled", "order": 8, "dt": 0.5, "fde": true, "seed": 11})";
    }
    const auto from_file = invoke({"loopback-check", "--config", cfg_path.string(), "--bits", "1000"});
    CHECK(from_file.code == 0);
    CHECK(from_file.out.find("tled,8,0.5,on,") != std::string::npos);
    const auto overridden = invoke({"loopback-check", "--config", cfg_path.string(), "--order", "16", "--bits", "1000"});
    CHECK(overridden.out.find("tled,16,0.5,on,") != std::string::npos);

    ExperimentConfig cfg;
    apply_config_json(cfg, R"({"snr_range": [0, 4, 2], "cil": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "max_bits": 5})");
    CHECK(cfg.snr_grid == std::vector<double>{0, 2, 4});
    REQUIRE(cfg.cil);
    CHECK(cfg.cil->size() == 3);
    CHECK(cfg.max_bits == 5);
    CHECK_THROWS_AS(apply_config_json(cfg, R"({"unknown": 1})"), Error);
    CHECK_THROWS_AS(apply_config_json(cfg, R"({"order": "four"})"), Error);
    CHECK_THROWS_AS(apply_config_json(cfg, "[1, 2]"), Error);
    CHECK_THROWS_AS(apply_config_json(cfg, R"({"cil": [[1, 0], [0]]})"), Error);
    CHECK(parse_snr_range("0:1:0.25").size() == 5);
    CHECK_THROWS_AS(parse_snr_range("0:1"), Error);
}
