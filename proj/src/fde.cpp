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

#include "cskfde/fde.hpp"
#include "cskfde/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace csk
{
    Fft::Fft(std::size_t n) : n_(n)
    {
        if (n == 0 || (n & (n - 1)) != 0)
            throw Error(ErrorCode::InvalidLength, "transform length " + std::to_string(n) + " is not a power of two");
        unsigned bits = 0;
        while ((std::size_t{1} << bits) < n)
            ++bits;
        bitrev_.resize(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            std::size_t r = 0;
            for (unsigned b = 0; b < bits; ++b)
                if (i & (std::size_t{1} << b))
                    r |= std::size_t{1} << (bits - 1 - b);
            bitrev_[i] = r;
        }
        tw_re_.resize(n / 2);
        tw_im_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k)
        {
            const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            tw_re_[k] = std::cos(a);
            tw_im_[k] = std::sin(a);
        }
    }

    void Fft::forward(std::span<cplx> data) const { transform(data, false); }

    void Fft::inverse(std::span<cplx> data) const
    {
        transform(data, true);
        const double s = 1.0 / static_cast<double>(n_);
        for (auto &v : data)
            v *= s;
    }

    void Fft::transform(std::span<cplx> data, bool inverse) const
    {
        if (data.size() != n_)
            throw Error(ErrorCode::InvalidLength, "block of " + std::to_string(data.size()) +
                                                      " samples, transform size " + std::to_string(n_));
        for (std::size_t i = 0; i < n_; ++i)
            if (i < bitrev_[i])
                std::swap(data[i], data[bitrev_[i]]);
        double *d = reinterpret_cast<double *>(data.data());
        const double sgn = inverse ? -1.0 : 1.0;
        for (std::size_t len = 2; len <= n_; len <<= 1)
        {
            const std::size_t half = len / 2, step = n_ / len;
            for (std::size_t start = 0; start < n_; start += len)
                for (std::size_t k = 0; k < half; ++k)
                {
                    const double wr = tw_re_[k * step], wi = sgn * tw_im_[k * step];
                    double *u = d + 2 * (start + k);
                    double *v = d + 2 * (start + k + half);
                    const double xr = v[0] * wr - v[1] * wi;
                    const double xi = v[0] * wi + v[1] * wr;
                    v[0] = u[0] - xr;
                    v[1] = u[1] - xi;
                    u[0] += xr;
                    u[1] += xi;
                }
        }
    }

    std::vector<cplx> dft(std::span<const double> block)
    {
        std::vector<cplx> out(block.begin(), block.end());
        Fft(block.size()).forward(out);
        return out;
    }

    std::vector<cplx> dft(std::span<const cplx> block)
    {
        std::vector<cplx> out(block.begin(), block.end());
        Fft(block.size()).forward(out);
        return out;
    }

    std::vector<cplx> idft(std::span<const cplx> spectrum)
    {
        std::vector<cplx> out(spectrum.begin(), spectrum.end());
        Fft(spectrum.size()).inverse(out);
        return out;
    }

    SpectralChannel spectral_channel(std::span<const double> taps, std::size_t n)
    {
        if (taps.empty() || taps.size() > n)
            throw Error(ErrorCode::InvalidLength, std::to_string(taps.size()) + " taps do not fit a block of " +
                                                      std::to_string(n));
        std::vector<double> padded(n, 0.0);
        std::copy(taps.begin(), taps.end(), padded.begin());
        return SpectralChannel{dft(std::span<const double>(padded))};
    }

    EqualizerSpec build_zfe(std::span<const double> taps, std::size_t n)
    {
        const auto ch = spectral_channel(taps, n);
        EqualizerSpec eq;
        eq.z.resize(n);
        for (std::size_t k = 0; k < n; ++k)
        {
            const cplx l = ch.lambda[k];
            const double mag2 = std::norm(l);
            if (std::sqrt(mag2) < spectral_null_threshold)
                throw Error(ErrorCode::SpectralNull, "channel has a spectral null at bin " + std::to_string(k));
            eq.z[k] = std::conj(l) / mag2;
        }
        return eq;
    }

    std::vector<double> equalize_block(std::span<const double> rx_block, const EqualizerSpec &eq)
    {
        std::vector<double> out(rx_block.begin(), rx_block.end());
        if (out.size() != eq.z.size())
            throw Error(ErrorCode::InvalidLength, "block of " + std::to_string(out.size()) +
                                                      " samples, equaliser size " + std::to_string(eq.z.size()));
        BlockEqualizer(eq).equalize(out);
        return out;
    }

    BlockEqualizer::BlockEqualizer(const EqualizerSpec &eq) : fft_(eq.z.size()), z_(eq.z), work_(eq.z.size()) {}

    void BlockEqualizer::multiply_z()
    {
        double *w = reinterpret_cast<double *>(work_.data());
        const double *z = reinterpret_cast<const double *>(z_.data());
        for (std::size_t k = 0; k < z_.size(); ++k)
        {
            const double re = w[2 * k] * z[2 * k] - w[2 * k + 1] * z[2 * k + 1];
            const double im = w[2 * k] * z[2 * k + 1] + w[2 * k + 1] * z[2 * k];
            w[2 * k] = re;
            w[2 * k + 1] = im;
        }
    }

    void BlockEqualizer::equalize(std::span<double> block)
    {
        if (block.size() != z_.size())
            throw Error(ErrorCode::InvalidLength, "block of " + std::to_string(block.size()) +
                                                      " samples, equaliser size " + std::to_string(z_.size()));
        for (std::size_t i = 0; i < block.size(); ++i)
            work_[i] = cplx(block[i], 0.0);
        fft_.forward(work_);
        multiply_z();
        fft_.inverse(work_);
        double residue = 0.0;
        for (std::size_t i = 0; i < block.size(); ++i)
        {
            residue = std::max(residue, std::abs(work_[i].imag()));
            block[i] = work_[i].real();
        }
        if (residue > imaginary_residue_limit)
            throw Error(ErrorCode::InvalidParameter, "imaginary residue after equalisation exceeds 1e-9; "
                                                     "equaliser is not conjugate-symmetric");
    }

    void BlockEqualizer::equalize_pair(std::span<double> a, std::span<double> b)
    {
        if (a.size() != z_.size() || b.size() != z_.size())
            throw Error(ErrorCode::InvalidLength, "block size does not match the equaliser");
        for (std::size_t i = 0; i < a.size(); ++i)
            work_[i] = cplx(a[i], b[i]);
        fft_.forward(work_);
        multiply_z();
        fft_.inverse(work_);
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            a[i] = work_[i].real();
            b[i] = work_[i].imag();
        }
    }
}
