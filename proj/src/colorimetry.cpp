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

#include "cskfde/colorimetry.hpp"
#include "cskfde/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace csk
{
    namespace
    {
        constexpr double singular_det = 1e-12;
        constexpr double gamut_tolerance = 1e-9;
        constexpr double boundary_tolerance = 1e-12;

        double cross(Chromaticity o, Chromaticity a, Chromaticity b)
        {
            return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
        }

        Chromaticity midpoint(Chromaticity a, Chromaticity b)
        {
            return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
        }

        // Convex polygon membership, either orientation, boundary inclusive.
        bool inside_convex(Chromaticity p, std::span<const Chromaticity> polygon)
        {
            bool any_pos = false, any_neg = false;
            for (std::size_t i = 0; i < polygon.size(); ++i)
            {
                double c = cross(polygon[i], polygon[(i + 1) % polygon.size()], p);
                if (c > boundary_tolerance)
                    any_pos = true;
                else if (c < -boundary_tolerance)
                    any_neg = true;
            }
            return !(any_pos && any_neg);
        }

        Chromaticity diagonal_intersection(Chromaticity b, Chromaticity y, Chromaticity c, Chromaticity r)
        {
            // b + t (y - b) = c + s (r - c)
            double dx1 = y.x - b.x, dy1 = y.y - b.y;
            double dx2 = r.x - c.x, dy2 = r.y - c.y;
            double den = dx1 * dy2 - dy1 * dx2;
            double t = ((c.x - b.x) * dy2 - (c.y - b.y) * dx2) / den;
            return {b.x + t * dx1, b.y + t * dy1};
        }

        std::uint32_t gray(std::uint32_t n) { return n ^ (n >> 1); }
    }

    std::string_view to_string(Scheme scheme)
    {
        return scheme == Scheme::Tled ? "tled" : "qled";
    }

    Scheme parse_scheme(std::string_view text)
    {
        std::string lower(text);
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch)
                       { return static_cast<char>(std::tolower(ch)); });
        if (lower == "tled")
            return Scheme::Tled;
        if (lower == "qled")
            return Scheme::Qled;
        throw Error(ErrorCode::InvalidParameter, "unknown scheme '" + std::string(text) + "'");
    }

    std::size_t led_count(Scheme scheme)
    {
        return scheme == Scheme::Tled ? 3 : 4;
    }

    IntensityVector::IntensityVector(std::size_t n) : size_(n)
    {
        if (n > max_size)
            throw Error(ErrorCode::DimensionMismatch, "intensity vectors hold at most 4 entries");
    }

    IntensityVector::IntensityVector(std::initializer_list<double> values) : IntensityVector(values.size())
    {
        std::copy(values.begin(), values.end(), values_.begin());
    }

    double IntensityVector::sum() const noexcept
    {
        double s = 0.0;
        for (std::size_t i = 0; i < size_; ++i)
            s += values_[i];
        return s;
    }

    std::size_t IntensityVector::nonzero_count() const noexcept
    {
        return static_cast<std::size_t>(std::count_if(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(size_),
                                                      [](double v)
                                                      { return v != 0.0; }));
    }

    SourceSet default_tled_sources()
    {
        return SourceSet{{{"R", {0.734, 0.265}}, {"G", {0.402, 0.597}}, {"B", {0.169, 0.007}}}};
    }

    SourceSet default_qled_sources()
    {
        return SourceSet{{{"B", {0.169, 0.007}}, {"C", {0.011, 0.733}}, {"Y", {0.402, 0.597}}, {"R", {0.734, 0.265}}}};
    }

    void validate_sources(Scheme scheme, const SourceSet &sources)
    {
        if (sources.size() != led_count(scheme))
            throw Error(ErrorCode::InvalidParameter, std::string(to_string(scheme)) + " needs " +
                                                         std::to_string(led_count(scheme)) + " sources, got " +
                                                         std::to_string(sources.size()));
        for (const auto &s : sources.sources)
            if (!std::isfinite(s.xy.x) || !std::isfinite(s.xy.y))
                throw Error(ErrorCode::InvalidParameter, "source '" + s.name + "' has a non-finite chromaticity");

        if (scheme == Scheme::Tled)
        {
            if (std::abs(cross(sources[0], sources[1], sources[2])) < singular_det)
                throw Error(ErrorCode::SingularTriad, "TLED sources are collinear");
            return;
        }
        int sign = 0;
        for (std::size_t i = 0; i < 4; ++i)
        {
            double c = cross(sources[i], sources[(i + 1) % 4], sources[(i + 2) % 4]);
            int s = c > singular_det ? 1 : (c < -singular_det ? -1 : 0);
            if (s == 0 || (sign != 0 && s != sign))
                throw Error(ErrorCode::InvalidParameter, "QLED sources do not form a convex quadrilateral");
            sign = s;
        }
    }

    IntensityVector intensity_from_chromaticity(Chromaticity target, const std::array<Chromaticity, 3> &triad)
    {
        Eigen::Matrix3d a;
        a << triad[0].x, triad[1].x, triad[2].x,
            triad[0].y, triad[1].y, triad[2].y,
            1.0, 1.0, 1.0;
        if (std::abs(a.determinant()) < singular_det)
            throw Error(ErrorCode::SingularTriad, "source triad is collinear");

        Eigen::Vector3d solved = a.partialPivLu().solve(Eigen::Vector3d(target.x, target.y, 1.0));

        IntensityVector out(3);
        for (int i = 0; i < 3; ++i)
        {
            if (solved[i] < -gamut_tolerance)
                throw Error(ErrorCode::OutsideGamut, "target chromaticity lies outside the triad");
            out[static_cast<std::size_t>(i)] = std::max(solved[i], 0.0);
        }
        double total = out.sum();
        for (auto &v : out.values())
            v /= total;
        return out;
    }

    Chromaticity chromaticity_from_intensity(const IntensityVector &intensity, std::span<const NamedSource> sources)
    {
        if (intensity.size() != sources.size())
            throw Error(ErrorCode::DimensionMismatch, "intensity and source counts differ");
        Chromaticity xy{0.0, 0.0};
        for (std::size_t i = 0; i < sources.size(); ++i)
        {
            xy.x += intensity[i] * sources[i].xy.x;
            xy.y += intensity[i] * sources[i].xy.y;
        }
        return xy;
    }

    std::array<std::size_t, 3> triad_of(SubQuadrilateral region)
    {
        switch (region)
        {
        case SubQuadrilateral::Pbqo:
            return {0, 1, 2};
        case SubQuadrilateral::Oqcr:
            return {1, 2, 3};
        case SubQuadrilateral::Sord:
            return {2, 3, 0};
        case SubQuadrilateral::Apos:
            return {3, 0, 1};
        }
        return {0, 1, 2};
    }

    TriadSelection select_qled_triad(Chromaticity target, const SourceSet &sources)
    {
        validate_sources(Scheme::Qled, sources);
        const Chromaticity b = sources[0], c = sources[1], y = sources[2], r = sources[3];

        const std::array<Chromaticity, 4> gamut{b, c, y, r};
        if (!inside_convex(target, gamut))
            throw Error(ErrorCode::OutsideGamut, "target chromaticity lies outside the QLED gamut");

        const Chromaticity o = diagonal_intersection(b, y, c, r);
        const Chromaticity p = midpoint(b, c), q = midpoint(c, y), rr = midpoint(y, r), s = midpoint(r, b);

        const std::array<std::array<Chromaticity, 4>, 4> regions{{
            {p, c, q, o},
            {o, q, y, rr},
            {s, o, rr, r},
            {b, p, o, s},
        }};
        for (int id = 0; id < 4; ++id)
        {
            if (inside_convex(target, regions[static_cast<std::size_t>(id)]))
            {
                auto region = static_cast<SubQuadrilateral>(id);
                return {triad_of(region), region};
            }
        }
        throw Error(ErrorCode::OutsideGamut, "target chromaticity is not covered by any sub-quadrilateral");
    }

    Constellation::Constellation(Scheme scheme, unsigned order, std::vector<ConstellationPoint> points)
        : scheme_(scheme), order_(order), bits_(0), dimension_(led_count(scheme)), points_(std::move(points))
    {
        if (order < 2 || !std::has_single_bit(order))
            throw Error(ErrorCode::UnsupportedOrder, "constellation order must be a power of two");
        bits_ = static_cast<unsigned>(std::countr_zero(order));
        if (points_.size() != order)
            throw Error(ErrorCode::LengthMismatch, "constellation has " + std::to_string(points_.size()) +
                                                       " points, expected " + std::to_string(order));

        index_by_label_.assign(order, std::numeric_limits<std::size_t>::max());
        flat_.reserve(order * dimension_);
        for (std::size_t i = 0; i < points_.size(); ++i)
        {
            const auto &pt = points_[i];
            if (pt.label >= order || index_by_label_[pt.label] != std::numeric_limits<std::size_t>::max())
                throw Error(ErrorCode::InvalidParameter, "constellation labels must be distinct and below M");
            index_by_label_[pt.label] = i;

            if (pt.intensity.size() != dimension_)
                throw Error(ErrorCode::DimensionMismatch, "intensity vector size does not match the scheme");
            for (double v : pt.intensity.values())
                if (v < 0.0 || v > 1.0)
                    throw Error(ErrorCode::OutsideGamut, "constellation intensity outside [0, 1]");
            if (std::abs(pt.intensity.sum() - 1.0) > 1e-9)
                throw Error(ErrorCode::InvalidParameter, "constellation intensities must sum to one");
            if (scheme == Scheme::Qled && pt.intensity.nonzero_count() > 3)
                throw Error(ErrorCode::InvalidParameter, "QLED symbols mix at most three LEDs");
            flat_.insert(flat_.end(), pt.intensity.values().begin(), pt.intensity.values().end());
        }
        if (!(min_distance() > 0.0))
            throw Error(ErrorCode::InvalidParameter, "constellation points must be distinct");
    }

    std::size_t Constellation::index_of_label(std::uint32_t label) const
    {
        if (label >= order_)
            throw Error(ErrorCode::IndexOutOfRange, "label " + std::to_string(label) + " is not in the alphabet");
        return index_by_label_[label];
    }

    std::uint32_t Constellation::label_of(std::size_t index) const
    {
        if (index >= points_.size())
            throw Error(ErrorCode::IndexOutOfRange, "constellation index " + std::to_string(index) + " out of range");
        return points_[index].label;
    }

    double Constellation::min_distance() const
    {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < points_.size(); ++i)
            for (std::size_t j = i + 1; j < points_.size(); ++j)
            {
                double d2 = 0.0;
                for (std::size_t k = 0; k < dimension_; ++k)
                {
                    double d = flat_[i * dimension_ + k] - flat_[j * dimension_ + k];
                    d2 += d * d;
                }
                best = std::min(best, d2);
            }
        return std::sqrt(best);
    }

    double Constellation::mean_total_intensity() const
    {
        double total = 0.0;
        for (const auto &pt : points_)
            total += pt.intensity.sum();
        return total / static_cast<double>(points_.size());
    }

    bool is_supported_order(Scheme scheme, unsigned order)
    {
        if (scheme == Scheme::Tled)
            return order == 4 || order == 8 || order == 16;
        switch (order)
        {
        case 4:
        case 8:
        case 16:
        case 64:
        case 256:
        case 1024:
        case 4096:
            return true;
        default:
            return false;
        }
    }

    const TledLayoutTable &default_tled_layouts()
    {
        // Weights in ninths of the triangle; labels from an exhaustive / annealed search that
        // minimises the union-bound bit error weight over the thirds lattice.
        static const TledLayoutTable table = []
        {
            auto ninths = [](std::uint32_t label, int a, int b, int c)
            {
                return TledLayoutEntry{label, {a / 9.0, b / 9.0, c / 9.0}};
            };
            TledLayoutTable t;
            t[4] = {ninths(0b00, 3, 3, 3), ninths(0b01, 9, 0, 0), ninths(0b10, 0, 9, 0), ninths(0b11, 0, 0, 9)};
            t[8] = {ninths(0, 9, 0, 0), ninths(1, 0, 9, 0), ninths(3, 0, 0, 9), ninths(2, 6, 3, 0),
                    ninths(4, 3, 6, 0), ninths(5, 0, 6, 3), ninths(7, 3, 0, 6), ninths(6, 3, 3, 3)};
            t[16] = {ninths(10, 0, 0, 9), ninths(12, 0, 3, 6), ninths(15, 0, 6, 3), ninths(9, 0, 9, 0),
                     ninths(6, 3, 0, 6), ninths(5, 3, 3, 3), ninths(3, 3, 6, 0), ninths(2, 6, 0, 3),
                     ninths(1, 6, 3, 0), ninths(8, 9, 0, 0), ninths(14, 1, 1, 7), ninths(13, 1, 4, 4),
                     ninths(11, 1, 7, 1), ninths(4, 4, 1, 4), ninths(7, 4, 4, 1), ninths(0, 7, 1, 1)};
            return t;
        }();
        return table;
    }

    Constellation build_tled_constellation(unsigned order, const SourceSet &sources, const TledLayoutTable &layouts)
    {
        if (!is_supported_order(Scheme::Tled, order))
            throw Error(ErrorCode::UnsupportedOrder, "TLED supports 4, 8 and 16-CSK, not " + std::to_string(order));
        validate_sources(Scheme::Tled, sources);
        auto it = layouts.find(order);
        if (it == layouts.end())
            throw Error(ErrorCode::UnsupportedOrder, "no TLED layout configured for order " + std::to_string(order));

        const std::array<Chromaticity, 3> triad{sources[0], sources[1], sources[2]};
        std::vector<ConstellationPoint> points;
        points.reserve(order);
        for (const auto &entry : it->second)
        {
            double wsum = entry.weights[0] + entry.weights[1] + entry.weights[2];
            if (std::abs(wsum - 1.0) > 1e-9)
                throw Error(ErrorCode::InvalidConfig, "TLED layout weights must sum to one");
            Chromaticity xy{0.0, 0.0};
            for (std::size_t k = 0; k < 3; ++k)
            {
                xy.x += entry.weights[k] * triad[k].x;
                xy.y += entry.weights[k] * triad[k].y;
            }
            points.push_back({entry.label, xy, intensity_from_chromaticity(xy, triad)});
        }
        return Constellation(Scheme::Tled, order, std::move(points));
    }

    Constellation build_qled_constellation(unsigned order, const SourceSet &sources)
    {
        if (!is_supported_order(Scheme::Qled, order))
            throw Error(ErrorCode::UnsupportedOrder, "QLED supports M in {4, 8, 16, 64, 256, 1024, 4096}, not " +
                                                         std::to_string(order));
        validate_sources(Scheme::Qled, sources);

        // Unit square: B at (0,0), C at (1,0), Y at (1,1), R at (0,1).
        auto place = [&](std::uint32_t label, double u, double v)
        {
            SubQuadrilateral region;
            std::array<double, 3> w;
            if (u >= 0.5 && v <= 0.5)
            {
                region = SubQuadrilateral::Pbqo;
                w = {1.0 - u, u - v, v};
            }
            else if (u >= 0.5 && v >= 0.5)
            {
                region = SubQuadrilateral::Oqcr;
                w = {1.0 - v, u + v - 1.0, 1.0 - u};
            }
            else if (u <= 0.5 && v >= 0.5)
            {
                region = SubQuadrilateral::Sord;
                w = {u, v - u, 1.0 - v};
            }
            else
            {
                region = SubQuadrilateral::Apos;
                w = {v, 1.0 - u - v, u};
            }
            const auto idx = triad_of(region);
            const std::array<Chromaticity, 3> triad{sources[idx[0]], sources[idx[1]], sources[idx[2]]};
            Chromaticity xy{0.0, 0.0};
            for (std::size_t k = 0; k < 3; ++k)
            {
                xy.x += w[k] * triad[k].x;
                xy.y += w[k] * triad[k].y;
            }
            IntensityVector mix = intensity_from_chromaticity(xy, triad);
            IntensityVector full(4);
            for (std::size_t k = 0; k < 3; ++k)
                full[idx[k]] = mix[k];
            return ConstellationPoint{label, xy, full};
        };

        std::vector<ConstellationPoint> points;
        points.reserve(order);
        if (order == 8)
        {
            static constexpr std::array<std::array<double, 2>, 8> ring{{
                {0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}, {1.0, 0.5}, {1.0, 1.0}, {0.5, 1.0}, {0.0, 1.0}, {0.0, 0.5}}};
            for (std::uint32_t i = 0; i < 8; ++i)
                points.push_back(place(gray(i), ring[i][0], ring[i][1]));
        }
        else
        {
            const std::uint32_t side = 1u << (std::countr_zero(order) / 2);
            const int column_bits = std::countr_zero(side);
            const double step = 1.0 / static_cast<double>(side - 1);
            for (std::uint32_t row = 0; row < side; ++row)
                for (std::uint32_t col = 0; col < side; ++col)
                    points.push_back(place((gray(row) << column_bits) | gray(col), col * step, row * step));
        }
        return Constellation(Scheme::Qled, order, std::move(points));
    }

    Constellation build_constellation(Scheme scheme, unsigned order)
    {
        return scheme == Scheme::Tled ? build_tled_constellation(order, default_tled_sources())
                                      : build_qled_constellation(order, default_qled_sources());
    }

    std::string constellation_csv(const Constellation &constellation)
    {
        std::ostringstream out;
        out.precision(17);
        out << "label,x,y,I_0,I_1,I_2,I_3\n";
        for (const auto &pt : constellation.points())
        {
            std::string bits(constellation.bits_per_symbol(), '0');
            for (unsigned b = 0; b < constellation.bits_per_symbol(); ++b)
                if (pt.label & (1u << (constellation.bits_per_symbol() - 1 - b)))
                    bits[b] = '1';
            out << bits << ',' << pt.xy.x << ',' << pt.xy.y;
            for (std::size_t k = 0; k < IntensityVector::max_size; ++k)
                out << ',' << (k < pt.intensity.size() ? pt.intensity[k] : 0.0);
            out << '\n';
        }
        return out.str();
    }
}
