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

#ifndef CAISAC_TESTS_SUPPORT_HPP
#define CAISAC_TESTS_SUPPORT_HPP

#include <cmath>
#include <complex>

#include "caisac/common.hpp"
#include "caisac/waveform.hpp"

namespace caisac_test
{
    using caisac::CarrierComponentConfig;

    // 3.5 GHz / 30 kHz and 28 GHz / 240 kHz, N = 512, N_s = 162.304 on both.
    inline CarrierComponentConfig full_low() { return {3.5e9, 30e3, 512, 14, 162.304, 1}; }
    inline CarrierComponentConfig full_high() { return {28e9, 240e3, 512, 28, 162.304, 2}; }

    // Same carriers at N = 128 with the CP scaled to keep T.
    inline CarrierComponentConfig desk_low() { return {3.5e9, 30e3, 128, 14, 40.576, 1}; }
    inline CarrierComponentConfig desk_high() { return {28e9, 240e3, 128, 28, 40.576, 2}; }

    // Phase difference wrapped to (-pi, pi].
    inline double phase_diff(double a, double b)
    {
        return std::remainder(a - b, 2.0 * caisac::kPi);
    }

    inline bool throws_code(caisac::Errc code, auto &&fn)
    {
        try
        {
            fn();
        }
        catch (const caisac::Error &e)
        {
            return e.code() == code;
        }
        return false;
    }
}

#endif
