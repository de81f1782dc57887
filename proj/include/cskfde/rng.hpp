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

#include <cstdint>

namespace csk
{
    // SplitMix64 finaliser, used to derive independent stream seeds.
    std::uint64_t splitmix64(std::uint64_t x) noexcept;
    std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

    // xoshiro256** (Blackman and Vigna) with its state filled from the seed by SplitMix64.
    // Uniforms take the top 53 bits; Gaussians use the Marsaglia polar method with the second
    // variate of each pair cached. The sequence is fixed by the seed alone.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed);

        std::uint64_t next_u64() noexcept
        {
            const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
            const std::uint64_t t = s_[1] << 17;
            s_[2] ^= s_[0];
            s_[3] ^= s_[1];
            s_[1] ^= s_[2];
            s_[0] ^= s_[3];
            s_[2] ^= t;
            s_[3] = rotl(s_[3], 45);
            return result;
        }

        // Top count bits of one draw, count <= 32
        std::uint32_t bits(unsigned count) noexcept
        {
            return count == 0 ? 0u : static_cast<std::uint32_t>(next_u64() >> (64 - count));
        }

        // Uniform on [0, 1)
        double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

        // Standard normal
        double normal();

    private:
        static std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

        std::uint64_t s_[4];
        double cached_ = 0.0;
        bool has_cached_ = false;
    };
}
