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

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace csk
{
    enum class Scheme
    {
        Tled, // three LED primaries, triangular gamut
        Qled  // four LED primaries (B, C, Y, R), quadrilateral gamut
    };

    std::string_view to_string(Scheme scheme);
    Scheme parse_scheme(std::string_view text); // accepts "tled" / "qled", any case
    std::size_t led_count(Scheme scheme);

    // CIE 1931 (x, y) coordinate
    struct Chromaticity
    {
        double x = 0.0;
        double y = 0.0;
        bool operator==(const Chromaticity &) const = default;
    };

    // Per-LED optical intensity fractions of one symbol. Holds 3 (TLED) or 4 (QLED) entries.
    class IntensityVector
    {
    public:
        static constexpr std::size_t max_size = 4;

        IntensityVector() = default;
        explicit IntensityVector(std::size_t n);
        IntensityVector(std::initializer_list<double> values);

        std::size_t size() const noexcept { return size_; }
        double operator[](std::size_t i) const { return values_[i]; }
        double &operator[](std::size_t i) { return values_[i]; }
        std::span<const double> values() const noexcept { return {values_.data(), size_}; }
        std::span<double> values() noexcept { return {values_.data(), size_}; }

        double sum() const noexcept;
        std::size_t nonzero_count() const noexcept;
        bool operator==(const IntensityVector &) const = default;

    private:
        std::array<double, max_size> values_{};
        std::size_t size_ = 0;
    };

    struct NamedSource
    {
        std::string name;
        Chromaticity xy;
    };

    // Ordered LED primaries: 3 for TLED, 4 for QLED in traversal order B, C, Y, R.
    struct SourceSet
    {
        std::vector<NamedSource> sources;

        std::size_t size() const noexcept { return sources.size(); }
        Chromaticity operator[](std::size_t i) const { return sources[i].xy; }
    };

    // Band-centre chromaticities of the IEEE 802.15.7 colour bands 110 (R), 010 (G), 000 (B).
    SourceSet default_tled_sources();
    // Blue, cyan, yellow, red primaries at the band-000, 001, 010 and 110 centres.
    SourceSet default_qled_sources();

    // Throw InvalidParameter unless the set is usable for the scheme (non-collinear triad,
    // or convex quadrilateral in listed order).
    void validate_sources(Scheme scheme, const SourceSet &sources);

    /// Solves [x y 1]^T = [[x_i x_j x_k] [y_i y_j y_k] [1 1 1]] [I_i I_j I_k]^T for the intensities.
    /// Slightly negative solutions (down to -1e-9) are clamped to zero and the vector renormalised.
    /// Throws SingularTriad for a collinear triad, OutsideGamut for a target outside the triangle.
    IntensityVector intensity_from_chromaticity(Chromaticity target, const std::array<Chromaticity, 3> &triad);

    // Colour produced by mixing the sources with the given intensities.
    Chromaticity chromaticity_from_intensity(const IntensityVector &intensity, std::span<const NamedSource> sources);

    // Sub-quadrilaterals of the QLED gamut. p, q, r, s are the midpoints of edges BC, CY, YR, RB
    // and o the intersection of the diagonals BY and CR.
    enum class SubQuadrilateral : int
    {
        Pbqo = 0, // corner C, mixed from B C Y
        Oqcr = 1, // corner Y, mixed from C Y R
        Sord = 2, // corner R, mixed from Y R B
        Apos = 3  // corner B, mixed from R B C
    };

    struct TriadSelection
    {
        std::array<std::size_t, 3> indices;
        SubQuadrilateral region;
    };

    std::array<std::size_t, 3> triad_of(SubQuadrilateral region);

    // Boundary points resolve to the lowest region id. Throws OutsideGamut outside BCYR.
    TriadSelection select_qled_triad(Chromaticity target, const SourceSet &sources);

    struct ConstellationPoint
    {
        std::uint32_t label = 0;
        Chromaticity xy;
        IntensityVector intensity;
    };

    class Constellation
    {
    public:
        // Validates every invariant of a CSK alphabet (labels, intensity ranges, distinct points).
        Constellation(Scheme scheme, unsigned order, std::vector<ConstellationPoint> points);

        Scheme scheme() const noexcept { return scheme_; }
        unsigned order() const noexcept { return order_; }
        unsigned bits_per_symbol() const noexcept { return bits_; }
        std::size_t dimension() const noexcept { return dimension_; }
        std::size_t size() const noexcept { return points_.size(); }

        const std::vector<ConstellationPoint> &points() const noexcept { return points_; }
        const ConstellationPoint &operator[](std::size_t i) const { return points_[i]; }

        std::size_t index_of_label(std::uint32_t label) const;
        std::uint32_t label_of(std::size_t index) const;

        // Row-major size() x dimension() intensity table.
        std::span<const double> flat_intensities() const noexcept { return flat_; }

        double min_distance() const;
        double mean_total_intensity() const;

    private:
        Scheme scheme_;
        unsigned order_;
        unsigned bits_;
        std::size_t dimension_;
        std::vector<ConstellationPoint> points_;
        std::vector<std::size_t> index_by_label_;
        std::vector<double> flat_;
    };

    bool is_supported_order(Scheme scheme, unsigned order);

    // Symbol placement inside the TLED triangle, as barycentric weights over the source triad.
    struct TledLayoutEntry
    {
        std::uint32_t label;
        std::array<double, 3> weights;
    };
    using TledLayout = std::vector<TledLayoutEntry>;
    using TledLayoutTable = std::map<unsigned, TledLayout>;

    // 4-CSK: vertices and centroid. 8- and 16-CSK: points on the thirds lattice of the triangle
    // (16-CSK adds the centroids of the six upright sub-triangles), labels chosen to minimise
    // the nearest-neighbour Hamming weight.
    const TledLayoutTable &default_tled_layouts();

    Constellation build_tled_constellation(unsigned order, const SourceSet &sources,
                                           const TledLayoutTable &layouts = default_tled_layouts());

    // Square sqrt(M) x sqrt(M) grid with per-axis Gray labels (M = 8 uses the 3 x 3 grid without
    // its centre, labelled cyclically). Grid cell (u, v) in quadrant Q is mixed from the triad of Q
    // with the barycentric weights of (u, v) inside the unit-square image of that triad, so the
    // alphabet is uniform in intensity space; for a parallelogram gamut this coincides with
    // bilinear placement followed by select_qled_triad.
    Constellation build_qled_constellation(unsigned order, const SourceSet &sources);

    // Default sources and layouts.
    Constellation build_constellation(Scheme scheme, unsigned order);

    // CSV export: label,x,y,I_0..I_3 (absent LEDs are written as 0).
    std::string constellation_csv(const Constellation &constellation);
}
