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

#include "cskfde/colorimetry.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace csk
{
    // One real-valued intensity sequence per LED band; all bands share one length.
    class SymbolStream
    {
    public:
        SymbolStream() = default;
        SymbolStream(std::size_t bands, std::size_t length);
        explicit SymbolStream(std::vector<std::vector<double>> bands);

        std::size_t band_count() const noexcept { return bands_.size(); }
        std::size_t length() const noexcept { return bands_.empty() ? 0 : bands_.front().size(); }

        std::span<const double> band(std::size_t b) const { return bands_[b]; }
        std::span<double> band(std::size_t b) { return bands_[b]; }
        const std::vector<std::vector<double>> &bands() const noexcept { return bands_; }

        // Intensities across bands at one time index.
        std::vector<double> sample(std::size_t t) const;

        bool operator==(const SymbolStream &) const = default;

    private:
        std::vector<std::vector<double>> bands_;
    };

    // Bits are stored one per byte with values 0 or 1, most significant label bit first.
    using BitVector = std::vector<std::uint8_t>;

    std::vector<IntensityVector> modulate(std::span<const std::uint8_t> bits, const Constellation &constellation);

    // Symbol sequence laid out band by band.
    SymbolStream to_stream(std::span<const IntensityVector> symbols, std::size_t bands);

    struct FramedBlock
    {
        SymbolStream payload; // N entries per band
        SymbolStream prefix;  // the last L payload entries per band

        std::size_t payload_length() const noexcept { return payload.length(); }
        std::size_t prefix_length() const noexcept { return prefix.length(); }
        std::size_t sub_blocks() const noexcept { return payload.length() + prefix.length(); }

        // Prefix followed by payload, N + L entries per band.
        SymbolStream serialize() const;
    };

    FramedBlock add_cyclic_prefix(const SymbolStream &block, std::size_t prefix_length);
    SymbolStream remove_cyclic_prefix(const SymbolStream &framed, std::size_t payload_length, std::size_t prefix_length);

    // Index of the nearest alphabet point in intensity space; ties resolve to the lowest index.
    std::size_t ml_detect(std::span<const double> received, const Constellation &constellation);

    BitVector demap(std::span<const std::size_t> indices, const Constellation &constellation);

    // Whole transmit chain for a bit sequence: map, split into N-symbol blocks, prefix each block.
    // A trailing partial block is completed with the all-zeros label symbol.
    struct TxFrame
    {
        SymbolStream stream;
        std::size_t blocks = 0;
        std::size_t padded_symbols = 0;
        std::size_t padded_bits = 0;
    };

    TxFrame frame_bits(std::span<const std::uint8_t> bits, const Constellation &constellation,
                       std::size_t payload_length, std::size_t prefix_length);

    // Inverse of frame_bits over an unmodified stream; the padding recorded in the frame is dropped.
    BitVector unframe_bits(const SymbolStream &stream, const Constellation &constellation,
                           std::size_t payload_length, std::size_t prefix_length, std::size_t padded_bits);
}
