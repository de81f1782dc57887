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

#include "cskfde/modem.hpp"
#include "cskfde/errors.hpp"

#include <limits>
#include <string>

namespace csk
{
    SymbolStream::SymbolStream(std::size_t bands, std::size_t length)
        : bands_(bands, std::vector<double>(length, 0.0))
    {
    }

    SymbolStream::SymbolStream(std::vector<std::vector<double>> bands) : bands_(std::move(bands))
    {
        for (const auto &b : bands_)
            if (b.size() != bands_.front().size())
                throw Error(ErrorCode::LengthMismatch, "all bands of a symbol stream must have equal length");
    }

    std::vector<double> SymbolStream::sample(std::size_t t) const
    {
        std::vector<double> out(bands_.size());
        for (std::size_t b = 0; b < bands_.size(); ++b)
            out[b] = bands_[b].at(t);
        return out;
    }

    std::vector<IntensityVector> modulate(std::span<const std::uint8_t> bits, const Constellation &constellation)
    {
        const unsigned k = constellation.bits_per_symbol();
        if (bits.size() % k != 0)
            throw Error(ErrorCode::LengthMismatch, std::to_string(bits.size()) + " bits do not divide into " +
                                                       std::to_string(k) + "-bit symbols");
        std::vector<IntensityVector> symbols;
        symbols.reserve(bits.size() / k);
        for (std::size_t i = 0; i < bits.size(); i += k)
        {
            std::uint32_t label = 0;
            for (unsigned b = 0; b < k; ++b)
                label = (label << 1) | (bits[i + b] & 1u);
            symbols.push_back(constellation[constellation.index_of_label(label)].intensity);
        }
        return symbols;
    }

    SymbolStream to_stream(std::span<const IntensityVector> symbols, std::size_t bands)
    {
        SymbolStream out(bands, symbols.size());
        for (std::size_t t = 0; t < symbols.size(); ++t)
        {
            if (symbols[t].size() != bands)
                throw Error(ErrorCode::DimensionMismatch, "symbol dimension does not match band count");
            for (std::size_t b = 0; b < bands; ++b)
                out.band(b)[t] = symbols[t][b];
        }
        return out;
    }

    SymbolStream FramedBlock::serialize() const
    {
        const std::size_t n = payload.length(), l = prefix.length();
        SymbolStream out(payload.band_count(), n + l);
        for (std::size_t b = 0; b < payload.band_count(); ++b)
        {
            auto dst = out.band(b);
            std::copy(prefix.band(b).begin(), prefix.band(b).end(), dst.begin());
            std::copy(payload.band(b).begin(), payload.band(b).end(), dst.begin() + static_cast<std::ptrdiff_t>(l));
        }
        return out;
    }

    FramedBlock add_cyclic_prefix(const SymbolStream &block, std::size_t prefix_length)
    {
        const std::size_t n = block.length();
        if (prefix_length > n)
            throw Error(ErrorCode::InvalidPrefix, "cyclic prefix of " + std::to_string(prefix_length) +
                                                      " exceeds the block length " + std::to_string(n));
        SymbolStream prefix(block.band_count(), prefix_length);
        for (std::size_t b = 0; b < block.band_count(); ++b)
        {
            auto src = block.band(b);
            std::copy(src.end() - static_cast<std::ptrdiff_t>(prefix_length), src.end(), prefix.band(b).begin());
        }
        return FramedBlock{block, std::move(prefix)};
    }

    SymbolStream remove_cyclic_prefix(const SymbolStream &framed, std::size_t payload_length, std::size_t prefix_length)
    {
        if (framed.length() != payload_length + prefix_length)
            throw Error(ErrorCode::LengthMismatch, "framed block has " + std::to_string(framed.length()) +
                                                       " entries, expected " +
                                                       std::to_string(payload_length + prefix_length));
        SymbolStream out(framed.band_count(), payload_length);
        for (std::size_t b = 0; b < framed.band_count(); ++b)
        {
            auto src = framed.band(b);
            std::copy(src.begin() + static_cast<std::ptrdiff_t>(prefix_length), src.end(), out.band(b).begin());
        }
        return out;
    }

    std::size_t ml_detect(std::span<const double> received, const Constellation &constellation)
    {
        const std::size_t dim = constellation.dimension();
        if (received.size() != dim)
            throw Error(ErrorCode::DimensionMismatch, "received vector has " + std::to_string(received.size()) +
                                                          " entries, the scheme uses " + std::to_string(dim));
        const auto table = constellation.flat_intensities();
        std::size_t best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < constellation.size(); ++i)
        {
            double d2 = 0.0;
            for (std::size_t k = 0; k < dim; ++k)
            {
                double d = received[k] - table[i * dim + k];
                d2 += d * d;
            }
            if (d2 < best_d2)
            {
                best_d2 = d2;
                best = i;
            }
        }
        return best;
    }

    BitVector demap(std::span<const std::size_t> indices, const Constellation &constellation)
    {
        const unsigned k = constellation.bits_per_symbol();
        BitVector bits;
        bits.reserve(indices.size() * k);
        for (std::size_t idx : indices)
        {
            std::uint32_t label = constellation.label_of(idx);
            for (unsigned b = 0; b < k; ++b)
                bits.push_back(static_cast<std::uint8_t>((label >> (k - 1 - b)) & 1u));
        }
        return bits;
    }

    TxFrame frame_bits(std::span<const std::uint8_t> bits, const Constellation &constellation,
                       std::size_t payload_length, std::size_t prefix_length)
    {
        if (payload_length == 0)
            throw Error(ErrorCode::InvalidParameter, "block length must be positive");
        if (prefix_length > payload_length)
            throw Error(ErrorCode::InvalidPrefix, "cyclic prefix longer than the block");
        const unsigned k = constellation.bits_per_symbol();
        const std::size_t symbols = (bits.size() + k - 1) / k;
        const std::size_t blocks = (symbols + payload_length - 1) / payload_length;

        TxFrame frame;
        frame.blocks = blocks;
        frame.padded_symbols = blocks * payload_length - symbols;
        frame.padded_bits = blocks * payload_length * k - bits.size();

        BitVector padded(bits.begin(), bits.end());
        padded.resize(blocks * payload_length * k, 0);
        const auto mapped = modulate(padded, constellation);

        const std::size_t dim = constellation.dimension();
        const std::size_t framed_len = payload_length + prefix_length;
        frame.stream = SymbolStream(dim, blocks * framed_len);
        for (std::size_t blk = 0; blk < blocks; ++blk)
        {
            std::span<const IntensityVector> block_symbols(mapped.data() + blk * payload_length, payload_length);
            const auto framed = add_cyclic_prefix(to_stream(block_symbols, dim), prefix_length).serialize();
            for (std::size_t b = 0; b < dim; ++b)
                std::copy(framed.band(b).begin(), framed.band(b).end(),
                          frame.stream.band(b).begin() + static_cast<std::ptrdiff_t>(blk * framed_len));
        }
        return frame;
    }

    BitVector unframe_bits(const SymbolStream &stream, const Constellation &constellation,
                           std::size_t payload_length, std::size_t prefix_length, std::size_t padded_bits)
    {
        const std::size_t framed_len = payload_length + prefix_length;
        if (framed_len == 0 || stream.length() % framed_len != 0)
            throw Error(ErrorCode::LengthMismatch, "stream is not a whole number of framed blocks");
        const std::size_t dim = constellation.dimension();
        if (stream.band_count() != dim)
            throw Error(ErrorCode::DimensionMismatch, "stream band count does not match the scheme");

        std::vector<std::size_t> indices;
        indices.reserve(stream.length() / framed_len * payload_length);
        std::vector<double> rx(dim);
        for (std::size_t start = 0; start < stream.length(); start += framed_len)
        {
            for (std::size_t t = start + prefix_length; t < start + framed_len; ++t)
            {
                for (std::size_t b = 0; b < dim; ++b)
                    rx[b] = stream.band(b)[t];
                indices.push_back(ml_detect(rx, constellation));
            }
        }
        BitVector bits = demap(indices, constellation);
        if (padded_bits > bits.size())
            throw Error(ErrorCode::LengthMismatch, "padding exceeds the recovered bit count");
        bits.resize(bits.size() - padded_bits);
        return bits;
    }
}
