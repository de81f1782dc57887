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
#include "cskfde/modem.hpp"
#include "cskfde/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace csk
{
    struct ChannelModel
    {
        double dt = 0.0;  // normalised delay spread D_rms / T_b
        double tau = 0.0; // decay constant [s]
        double ts = 0.0;  // symbol period [s]
        double tb = 0.0;  // bit duration [s]
        std::vector<double> taps;
    };

    // Symbol-spaced taps h[k] ~ exp(-k Ts / tau), k = 0 .. tap_count-1, normalised to unit sum,
    // with Tb = 1 / (Rs log2 M) and tau = 2 Dt Tb. Dt = 0 gives [1, 0, ..., 0].
    std::vector<double> discretize_impulse_response(double dt, unsigned order, double rs, std::size_t tap_count = 8);
    ChannelModel make_channel_model(double dt, unsigned order, double rs, std::size_t tap_count = 8);

    // Square matrix of effective responsivities, rows = receive detectors, columns = LED bands.
    class CILMatrix
    {
    public:
        CILMatrix() = default;
        CILMatrix(std::size_t n, std::vector<double> row_major);
        static CILMatrix identity(std::size_t n);

        std::size_t size() const noexcept { return n_; }
        double operator()(std::size_t row, std::size_t col) const { return g_[row * n_ + col]; }
        std::span<const double> values() const noexcept { return g_; }

        // Row-major inverse; throws SingularMatrix.
        std::vector<double> inverse() const;
        double condition_number() const;
        bool diagonally_dominant() const;

        void apply(std::span<const double> in, std::span<double> out) const;

    private:
        std::size_t n_ = 0;
        std::vector<double> g_;
    };

    CILMatrix default_tled_cil(); // rows / columns R, G, B
    CILMatrix default_qled_cil(); // rows / columns B, C, Y, R
    CILMatrix default_cil(Scheme scheme);

    struct NoiseModel
    {
        double sigma = 0.0; // per-detector standard deviation

        static NoiseModel from_psd(double no); // sigma = sqrt(No / 2)
    };

    // Streaming channel: linear convolution with carried-over history, per-sample mixing by G,
    // then additive Gaussian noise per detector sample.
    class ChannelState
    {
    public:
        ChannelState(std::vector<double> taps, CILMatrix g, NoiseModel noise, std::uint64_t seed);

        std::size_t band_count() const noexcept { return g_.size(); }
        const std::vector<double> &taps() const noexcept { return taps_; }

        // Band-major buffers: in[b * length + t], out likewise.
        void process(std::span<const double> in, std::span<double> out, std::size_t length);
        SymbolStream process(const SymbolStream &tx);

    private:
        std::vector<double> taps_;
        CILMatrix g_;
        NoiseModel noise_;
        Rng rng_;
        std::vector<double> history_; // last taps-1 inputs per band, oldest first
        std::vector<double> conv_;
        std::vector<double> ext_;
    };

    SymbolStream apply_channel(const SymbolStream &tx, const ChannelModel &model, const CILMatrix &g,
                               const NoiseModel &noise, std::uint64_t seed);

    // Per-sample multiplication by G^-1.
    class Calibrator
    {
    public:
        explicit Calibrator(const CILMatrix &g);
        std::size_t size() const noexcept { return n_; }
        void apply(std::span<double> band_major, std::size_t length) const;

    private:
        std::size_t n_;
        std::vector<double> inv_;
    };

    SymbolStream calibrate(const SymbolStream &rx, const CILMatrix &g);

    struct SampledCurve
    {
        std::vector<double> wavelength_nm;
        std::vector<double> value;
    };

    // Two-column CSV (wavelength nm, value); non-numeric lines and '#' comments are skipped.
    SampledCurve load_curve_csv(const std::string &path);
    SampledCurve parse_curve_csv(const std::string &text);

    // g = int_filter S T R dl / int_source S dl by trapezoidal quadrature on the common grid, the
    // numerator over the filter band (first to last sample with T != 0), the denominator over the
    // source band (likewise for S). Throws EmptySupport when the SPD integrates to zero and
    // LengthMismatch for curves on different grids.
    double effective_responsivity(const SampledCurve &spd, const SampledCurve &filter, const SampledCurve &responsivity);
}
