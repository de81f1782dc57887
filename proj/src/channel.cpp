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

#include "cskfde/channel.hpp"
#include "cskfde/errors.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <fstream>
#include <sstream>

namespace csk
{
    namespace
    {
        using MatX = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

        MatX to_eigen(const CILMatrix &g)
        {
            MatX m(g.size(), g.size());
            for (std::size_t r = 0; r < g.size(); ++r)
                for (std::size_t c = 0; c < g.size(); ++c)
                    m(r, c) = g(r, c);
            return m;
        }

        double trapezoid(std::span<const double> x, std::span<const double> y)
        {
            double s = 0.0;
            for (std::size_t i = 1; i < x.size(); ++i)
                s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
            return s;
        }
    }

    std::vector<double> discretize_impulse_response(double dt, unsigned order, double rs, std::size_t tap_count)
    {
        if (!(rs > 0.0) || !std::isfinite(rs))
            throw Error(ErrorCode::InvalidParameter, "symbol rate must be positive");
        if (order < 2)
            throw Error(ErrorCode::InvalidParameter, "modulation order must be at least 2");
        if (!(dt >= 0.0) || !std::isfinite(dt))
            throw Error(ErrorCode::InvalidParameter, "delay spread must be finite and non-negative");
        if (tap_count == 0)
            throw Error(ErrorCode::InvalidParameter, "at least one channel tap is required");

        std::vector<double> h(tap_count, 0.0);
        h[0] = 1.0;
        if (dt == 0.0)
            return h;

        const double ts = 1.0 / rs;
        const double tb = 1.0 / (rs * std::log2(static_cast<double>(order)));
        const double tau = 2.0 * dt * tb;
        double sum = 0.0;
        for (std::size_t k = 0; k < tap_count; ++k)
        {
            h[k] = std::exp(-static_cast<double>(k) * ts / tau);
            sum += h[k];
        }
        for (auto &v : h)
            v /= sum;
        return h;
    }

    ChannelModel make_channel_model(double dt, unsigned order, double rs, std::size_t tap_count)
    {
        ChannelModel m;
        m.taps = discretize_impulse_response(dt, order, rs, tap_count);
        m.dt = dt;
        m.ts = 1.0 / rs;
        m.tb = 1.0 / (rs * std::log2(static_cast<double>(order)));
        m.tau = 2.0 * dt * m.tb;
        return m;
    }

    CILMatrix::CILMatrix(std::size_t n, std::vector<double> row_major) : n_(n), g_(std::move(row_major))
    {
        if (n_ == 0 || g_.size() != n_ * n_)
            throw Error(ErrorCode::DimensionMismatch, "cross-talk matrix needs " + std::to_string(n_ * n_) +
                                                          " entries, got " + std::to_string(g_.size()));
        for (double v : g_)
            if (!std::isfinite(v))
                throw Error(ErrorCode::InvalidParameter, "cross-talk matrix entries must be finite");
    }

    CILMatrix CILMatrix::identity(std::size_t n)
    {
        std::vector<double> g(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            g[i * n + i] = 1.0;
        return CILMatrix(n, std::move(g));
    }

    std::vector<double> CILMatrix::inverse() const
    {
        const MatX m = to_eigen(*this);
        Eigen::FullPivLU<MatX> lu(m);
        if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-300)
            throw Error(ErrorCode::SingularMatrix, "cross-talk matrix is not invertible");
        const MatX inv = lu.inverse();
        return std::vector<double>(inv.data(), inv.data() + n_ * n_);
    }

    double CILMatrix::condition_number() const
    {
        Eigen::JacobiSVD<MatX> svd(to_eigen(*this));
        const auto &s = svd.singularValues();
        if (s(s.size() - 1) == 0.0)
            return std::numeric_limits<double>::infinity();
        return s(0) / s(s.size() - 1);
    }

    bool CILMatrix::diagonally_dominant() const
    {
        for (std::size_t r = 0; r < n_; ++r)
        {
            double off = 0.0;
            for (std::size_t c = 0; c < n_; ++c)
                if (c != r)
                    off += std::abs((*this)(r, c));
            if (std::abs((*this)(r, r)) <= off)
                return false;
        }
        return true;
    }

    void CILMatrix::apply(std::span<const double> in, std::span<double> out) const
    {
        if (in.size() != n_ || out.size() != n_)
            throw Error(ErrorCode::DimensionMismatch, "vector size does not match the cross-talk matrix");
        for (std::size_t r = 0; r < n_; ++r)
        {
            double s = 0.0;
            for (std::size_t c = 0; c < n_; ++c)
                s += g_[r * n_ + c] * in[c];
            out[r] = s;
        }
    }

    CILMatrix default_tled_cil()
    {
        return CILMatrix(3, {0.271, 0.030, 0.0,
                             0.0, 0.255, 0.0,
                             0.0, 0.0, 0.200});
    }

    CILMatrix default_qled_cil()
    {
        return CILMatrix(4, {0.200, 0.003, 0.0, 0.0,
                             0.007, 0.220, 0.003, 0.0,
                             0.0, 0.002, 0.255, 0.0,
                             0.0, 0.0, 0.030, 0.271});
    }

    CILMatrix default_cil(Scheme scheme)
    {
        return scheme == Scheme::Tled ? default_tled_cil() : default_qled_cil();
    }

    NoiseModel NoiseModel::from_psd(double no)
    {
        if (!(no >= 0.0))
            throw Error(ErrorCode::InvalidParameter, "noise PSD must be non-negative");
        return NoiseModel{std::sqrt(no / 2.0)};
    }

    ChannelState::ChannelState(std::vector<double> taps, CILMatrix g, NoiseModel noise, std::uint64_t seed)
        : taps_(std::move(taps)), g_(std::move(g)), noise_(noise), rng_(seed)
    {
        if (taps_.empty())
            throw Error(ErrorCode::InvalidParameter, "channel needs at least one tap");
        if (!(noise_.sigma >= 0.0))
            throw Error(ErrorCode::InvalidParameter, "noise deviation must be non-negative");
        history_.assign(g_.size() * (taps_.size() - 1), 0.0);
    }

    void ChannelState::process(std::span<const double> in, std::span<double> out, std::size_t length)
    {
        const std::size_t nb = g_.size();
        const std::size_t mem = taps_.size() - 1;
        if (in.size() != nb * length || out.size() != nb * length)
            throw Error(ErrorCode::DimensionMismatch, "buffer size does not match band count x length");

        conv_.resize(nb * length);
        ext_.resize(mem + length);
        auto &ext = ext_;
        for (std::size_t b = 0; b < nb; ++b)
        {
            std::copy(history_.begin() + static_cast<std::ptrdiff_t>(b * mem),
                      history_.begin() + static_cast<std::ptrdiff_t>((b + 1) * mem), ext.begin());
            std::copy(in.begin() + static_cast<std::ptrdiff_t>(b * length),
                      in.begin() + static_cast<std::ptrdiff_t>((b + 1) * length),
                      ext.begin() + static_cast<std::ptrdiff_t>(mem));
            double *y = conv_.data() + b * length;
            for (std::size_t t = 0; t < length; ++t)
            {
                double s = 0.0;
                const double *x = ext.data() + t + mem;
                for (std::size_t k = 0; k <= mem; ++k)
                    s += taps_[k] * x[-static_cast<std::ptrdiff_t>(k)];
                y[t] = s;
            }
            std::copy(ext.end() - static_cast<std::ptrdiff_t>(mem), ext.end(),
                      history_.begin() + static_cast<std::ptrdiff_t>(b * mem));
        }

        const auto g = g_.values();
        const double sigma = noise_.sigma;
        for (std::size_t t = 0; t < length; ++t)
            for (std::size_t d = 0; d < nb; ++d)
            {
                double s = 0.0;
                for (std::size_t b = 0; b < nb; ++b)
                    s += g[d * nb + b] * conv_[b * length + t];
                if (sigma > 0.0)
                    s += sigma * rng_.normal();
                out[d * length + t] = s;
            }
    }

    SymbolStream ChannelState::process(const SymbolStream &tx)
    {
        if (tx.band_count() != g_.size())
            throw Error(ErrorCode::DimensionMismatch, "cross-talk matrix is " + std::to_string(g_.size()) + "x" +
                                                          std::to_string(g_.size()) + " but the stream has " +
                                                          std::to_string(tx.band_count()) + " bands");
        const std::size_t n = tx.length();
        std::vector<double> in(g_.size() * n), out(g_.size() * n);
        for (std::size_t b = 0; b < g_.size(); ++b)
            std::copy(tx.band(b).begin(), tx.band(b).end(), in.begin() + static_cast<std::ptrdiff_t>(b * n));
        process(in, out, n);
        std::vector<std::vector<double>> bands(g_.size());
        for (std::size_t b = 0; b < g_.size(); ++b)
            bands[b].assign(out.begin() + static_cast<std::ptrdiff_t>(b * n),
                            out.begin() + static_cast<std::ptrdiff_t>((b + 1) * n));
        return SymbolStream(std::move(bands));
    }

    SymbolStream apply_channel(const SymbolStream &tx, const ChannelModel &model, const CILMatrix &g,
                               const NoiseModel &noise, std::uint64_t seed)
    {
        ChannelState state(model.taps, g, noise, seed);
        return state.process(tx);
    }

    Calibrator::Calibrator(const CILMatrix &g) : n_(g.size()), inv_(g.inverse())
    {
        if (n_ > 8)
            throw Error(ErrorCode::DimensionMismatch, "at most 8 bands are supported");
    }

    void Calibrator::apply(std::span<double> band_major, std::size_t length) const
    {
        if (band_major.size() != n_ * length)
            throw Error(ErrorCode::DimensionMismatch, "buffer size does not match band count x length");
        std::array<double, 8> v{};
        for (std::size_t t = 0; t < length; ++t)
        {
            for (std::size_t b = 0; b < n_; ++b)
                v[b] = band_major[b * length + t];
            for (std::size_t r = 0; r < n_; ++r)
            {
                double s = 0.0;
                for (std::size_t c = 0; c < n_; ++c)
                    s += inv_[r * n_ + c] * v[c];
                band_major[r * length + t] = s;
            }
        }
    }

    SymbolStream calibrate(const SymbolStream &rx, const CILMatrix &g)
    {
        if (rx.band_count() != g.size())
            throw Error(ErrorCode::DimensionMismatch, "stream band count does not match the cross-talk matrix");
        Calibrator cal(g);
        const std::size_t n = rx.length();
        std::vector<double> buf(g.size() * n);
        for (std::size_t b = 0; b < g.size(); ++b)
            std::copy(rx.band(b).begin(), rx.band(b).end(), buf.begin() + static_cast<std::ptrdiff_t>(b * n));
        cal.apply(buf, n);
        std::vector<std::vector<double>> bands(g.size());
        for (std::size_t b = 0; b < g.size(); ++b)
            bands[b].assign(buf.begin() + static_cast<std::ptrdiff_t>(b * n),
                            buf.begin() + static_cast<std::ptrdiff_t>((b + 1) * n));
        return SymbolStream(std::move(bands));
    }

    SampledCurve parse_curve_csv(const std::string &text)
    {
        SampledCurve c;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line))
        {
            if (line.empty() || line[0] == '#')
                continue;
            for (auto &ch : line)
                if (ch == ',' || ch == ';' || ch == '\t')
                    ch = ' ';
            std::istringstream fields(line);
            double wl, v;
            if (!(fields >> wl >> v))
                continue;
            if (!c.wavelength_nm.empty() && wl <= c.wavelength_nm.back())
                throw Error(ErrorCode::InvalidParameter, "curve wavelengths must be strictly increasing");
            c.wavelength_nm.push_back(wl);
            c.value.push_back(v);
        }
        if (c.wavelength_nm.size() < 2)
            throw Error(ErrorCode::EmptySupport, "curve needs at least two samples");
        return c;
    }

    SampledCurve load_curve_csv(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw Error(ErrorCode::InvalidConfig, "cannot open curve file " + path);
        std::stringstream ss;
        ss << f.rdbuf();
        return parse_curve_csv(ss.str());
    }

    double effective_responsivity(const SampledCurve &spd, const SampledCurve &filter, const SampledCurve &responsivity)
    {
        const std::size_t n = spd.wavelength_nm.size();
        if (spd.value.size() != n || filter.wavelength_nm.size() != n || filter.value.size() != n ||
            responsivity.wavelength_nm.size() != n || responsivity.value.size() != n)
            throw Error(ErrorCode::LengthMismatch, "curves must share one wavelength grid");
        for (std::size_t i = 0; i < n; ++i)
            if (filter.wavelength_nm[i] != spd.wavelength_nm[i] || responsivity.wavelength_nm[i] != spd.wavelength_nm[i])
                throw Error(ErrorCode::LengthMismatch, "curves must share one wavelength grid");

        const auto band = [](const std::vector<double> &v) {
            std::size_t lo = 0, hi = v.size();
            while (lo < v.size() && v[lo] == 0.0)
                ++lo;
            while (hi > lo && v[hi - 1] == 0.0)
                --hi;
            return std::pair{lo, hi};
        };
        const std::span<const double> wl(spd.wavelength_nm);

        const auto [s0, s1] = band(spd.value);
        const double den = s1 > s0 ? trapezoid(wl.subspan(s0, s1 - s0), std::span<const double>(spd.value).subspan(s0, s1 - s0)) : 0.0;
        if (!(std::abs(den) > 0.0))
            throw Error(ErrorCode::EmptySupport, "source spectrum integrates to zero");

        const auto [f0, f1] = band(filter.value);
        if (f1 <= f0)
            return 0.0;
        std::vector<double> prod(f1 - f0);
        for (std::size_t i = f0; i < f1; ++i)
            prod[i - f0] = spd.value[i] * filter.value[i] * responsivity.value[i];
        return trapezoid(wl.subspan(f0, f1 - f0), prod) / den;
    }
}
