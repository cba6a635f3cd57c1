// SPDX-License-Identifier: Apache-2.0
//
// caisac: carrier-aggregated MIMO-OFDM ISAC link-level simulator
// Copyright (C) 2026 The caisac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CAISAC_COMMON_HPP
#define CAISAC_COMMON_HPP

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace caisac
{
    using cplx = std::complex<double>;

    inline constexpr double kSpeedOfLight = 299792458.0;
    inline constexpr double kPi = std::numbers::pi;
    inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

    inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
    inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

    enum class Errc
    {
        invalid_config,
        unsupported_numerology,
        inconsistent_config,
        cp_too_short,
        overloaded_spatial_layers,
        dimension_mismatch,
        unsupported_shape,
        invalid_input,
        degenerate_frame,
        insufficient_peaks,
        bands_not_aligned,
        pairing_error,
        degenerate_geometry,
        empty_trials,
        infeasible_split,
        unknown_column,
        empty_plot,
        config_parse,
        io_error,
    };

    std::string_view errc_name(Errc code);

    // All library failures are reported through this exception type.
    class Error : public std::runtime_error
    {
    public:
        Error(Errc code, const std::string &what);
        Errc code() const noexcept { return code_; }
        // Message without the code-name prefix.
        const std::string &detail() const noexcept { return detail_; }

    private:
        Errc code_;
        std::string detail_;
    };

    // Dense 3-D complex array, first index fastest.
    class Cube
    {
    public:
        Cube() = default;
        Cube(std::size_t d0, std::size_t d1, std::size_t d2, cplx fill = {})
            : d0_(d0), d1_(d1), d2_(d2), data_(d0 * d1 * d2, fill) {}

        std::size_t dim0() const { return d0_; }
        std::size_t dim1() const { return d1_; }
        std::size_t dim2() const { return d2_; }
        std::size_t size() const { return data_.size(); }

        cplx &operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[i + d0_ * (j + d1_ * k)]; }
        const cplx &operator()(std::size_t i, std::size_t j, std::size_t k) const { return data_[i + d0_ * (j + d1_ * k)]; }

        // Pointer to the contiguous fibre along the first dimension.
        cplx *fibre(std::size_t j, std::size_t k) { return data_.data() + d0_ * (j + d1_ * k); }
        const cplx *fibre(std::size_t j, std::size_t k) const { return data_.data() + d0_ * (j + d1_ * k); }

        cplx *data() { return data_.data(); }
        const cplx *data() const { return data_.data(); }
        const std::vector<cplx> &storage() const { return data_; }

        bool operator==(const Cube &other) const = default;

    private:
        std::size_t d0_ = 0, d1_ = 0, d2_ = 0;
        std::vector<cplx> data_;
    };
}

#endif
