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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace csk
{
    using cplx = std::complex<double>;

    // Radix-2 FFT of a fixed power-of-two size.
    // Forward: X_k = sum_n x_n exp(-j 2 pi k n / N). Inverse carries the 1/N factor, so
    // idft(dft(x)) = x and sum |x_n|^2 = (1/N) sum |X_k|^2.
    class Fft
    {
    public:
        explicit Fft(std::size_t n); // throws InvalidLength

        std::size_t size() const noexcept { return n_; }
        void forward(std::span<cplx> data) const;
        void inverse(std::span<cplx> data) const;

    private:
        void transform(std::span<cplx> data, bool inverse) const;

        std::size_t n_;
        std::vector<std::size_t> bitrev_;
        std::vector<double> tw_re_, tw_im_; // exp(-j 2 pi k / N), k < N/2
    };

    std::vector<cplx> dft(std::span<const double> block);
    std::vector<cplx> dft(std::span<const cplx> block);
    std::vector<cplx> idft(std::span<const cplx> spectrum);

    struct SpectralChannel
    {
        std::vector<cplx> lambda; // size-N DFT of the zero-padded taps
    };

    SpectralChannel spectral_channel(std::span<const double> taps, std::size_t n);

    struct EqualizerSpec
    {
        std::vector<cplx> z; // zero-forcing coefficients, z_k = conj(lambda_k) / |lambda_k|^2
    };

    constexpr double spectral_null_threshold = 1e-12;
    constexpr double imaginary_residue_limit = 1e-9;

    // Throws SpectralNull if any |lambda_k| < 1e-12, InvalidLength for taps longer than N.
    EqualizerSpec build_zfe(std::span<const double> taps, std::size_t n);

    // Throws InvalidLength for a block of the wrong size. Fails with InvalidParameter if the
    // inverse transform leaves an imaginary residue above 1e-9.
    std::vector<double> equalize_block(std::span<const double> rx_block, const EqualizerSpec &eq);

    // Reusable equaliser with preallocated work space.
    class BlockEqualizer
    {
    public:
        explicit BlockEqualizer(const EqualizerSpec &eq);

        std::size_t size() const noexcept { return fft_.size(); }

        // In place, with the imaginary residue check.
        void equalize(std::span<double> block);

        // Two real blocks through one complex transform (a + j b); valid because z is
        // conjugate-symmetric.
        void equalize_pair(std::span<double> a, std::span<double> b);

    private:
        void multiply_z();

        Fft fft_;
        std::vector<cplx> z_;
        std::vector<cplx> work_;
    };
}
