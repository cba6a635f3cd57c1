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

#include "caisac/common.hpp"

namespace caisac
{
    std::string_view errc_name(Errc code)
    {
        switch (code)
        {
        case Errc::invalid_config: return "invalid-config";
        case Errc::unsupported_numerology: return "unsupported-numerology";
        case Errc::inconsistent_config: return "inconsistent-config";
        case Errc::cp_too_short: return "cp-too-short";
        case Errc::overloaded_spatial_layers: return "overloaded-spatial-layers";
        case Errc::dimension_mismatch: return "dimension-mismatch";
        case Errc::unsupported_shape: return "unsupported-shape";
        case Errc::invalid_input: return "invalid-input";
        case Errc::degenerate_frame: return "degenerate-frame";
        case Errc::insufficient_peaks: return "insufficient-peaks";
        case Errc::bands_not_aligned: return "bands-not-aligned";
        case Errc::pairing_error: return "pairing-error";
        case Errc::degenerate_geometry: return "degenerate-geometry";
        case Errc::empty_trials: return "empty-trials";
        case Errc::infeasible_split: return "infeasible-split";
        case Errc::unknown_column: return "unknown-column";
        case Errc::empty_plot: return "empty-plot";
        case Errc::config_parse: return "config-parse";
        case Errc::io_error: return "io-error";
        }
        return "unknown";
    }

    Error::Error(Errc code, const std::string &what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), detail_(what) {}
}
