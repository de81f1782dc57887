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

#include "cskfde/harness.hpp"

#include <string>

namespace csk
{
    // JSON experiment file. Recognised keys (all optional):
    //   scheme, order, dt, fde, n, cp, rs, channel_taps, snr (list), snr_range ([lo, hi, step]),
    //   target_ber, min_bit_errors, max_bits, seed, snr_lo, snr_hi, bracket_db, early_stop,
    //   cil (square list of rows)
    // Unknown keys raise InvalidConfig.
    void apply_config_json(ExperimentConfig &cfg, const std::string &json_text);
    void apply_config_file(ExperimentConfig &cfg, const std::string &path);

    // lo:hi:step (inclusive of hi within half a step)
    std::vector<double> parse_snr_range(const std::string &text);
    std::vector<double> snr_range(double lo, double hi, double step);
}
