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

#ifndef CAISAC_RNG_HPP
#define CAISAC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "caisac/common.hpp"

namespace caisac
{
    using Rng = std::mt19937_64;

    // Stage tags used when splitting a master seed into child streams.
    enum class Stage : std::uint32_t
    {
        comm_frame = 1,
        sensing_frame = 2,
        rcs = 3,
        sensing_noise = 4,
        comm_channel = 5,
        comm_noise = 6,
    };

    /// Child seed for (master, trial, band, stage).
    ///
    /// The six 32-bit words {master lo, master hi, trial lo, trial hi, band, stage}
    /// are fed to std::seed_seq and the first two generated words form the seed.
    inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, int band, Stage stage)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                          static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                          static_cast<std::uint32_t>(band), static_cast<std::uint32_t>(stage)};
        std::uint32_t out[2];
        seq.generate(out, out + 2);
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    // Circularly symmetric complex normal with total variance var.
    inline cplx complex_normal(Rng &rng, double var = 1.0)
    {
        std::normal_distribution<double> n(0.0, std::sqrt(0.5 * var));
        double re = n(rng);
        double im = n(rng);
        return {re, im};
    }
}

#endif
