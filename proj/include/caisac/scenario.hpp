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

#ifndef CAISAC_SCENARIO_HPP
#define CAISAC_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "caisac/channel.hpp"
#include "caisac/fusion.hpp"
#include "caisac/waveform.hpp"

namespace caisac
{
    struct MiSettings
    {
        std::vector<int> ue_antennas{4, 5, 6};
        int num_users = 4;
        int num_paths = 4;
        int draws = 200;
        std::vector<double> snr_grid_db;
    };

    struct CrlbSettings
    {
        std::vector<double> snr_grid_db;
        double angle_rad = 0.0;
        double hf_snr_offset_db = 0.0; // bounds compared at equal varpi by default
    };

    /// N_low + n2_coefficient N_high = total_subcarriers, symbol durations held fixed.
    struct BandwidthSettings
    {
        int total_subcarriers = 2560;
        int n2_coefficient = 4;
        int n2_min = 1;
        std::optional<int> n2_max; // unset: largest value leaving N_low >= 1
        double snr_db = -20.0;
        double hf_snr_offset_db = 0.0;
        int num_rx = 128;
        int num_symbols_low = 14;
        int num_symbols_high = 28;
        double symbol_duration_low_s = 43.9e-6;
        double symbol_duration_high_s = 5.49e-6;
        double element_spacing_wavelengths_high = 0.5;
    };

    struct Scenario
    {
        std::string name = "desk";
        std::string origin = "<defaults>"; // file the values came from, for messages

        CarrierComponentConfig low;
        CarrierComponentConfig high;
        bool align_low_cp = true; // band.low.cp_length_samples = auto

        ArrayConfig array;
        // Used when array.element_spacing_m is left at 0: spacing in wavelengths of the reference band.
        double spacing_wavelengths = 0.75;
        ShapeBand spacing_reference = ShapeBand::low;
        std::vector<TargetTruth> targets;

        std::vector<double> snr_grid_db;
        int trials = 100;
        std::uint64_t master_seed = 1;
        double hf_snr_offset_db = -5.0;
        bool noiseless = false; // echoes without noise; the SNR grid still sets the fusion weights
        std::optional<double> tx_steer_rad;

        bool run_symbol_level = true;
        bool run_data_level = true;
        bool run_low_band = true;
        bool run_high_band = true;

        PipelineConfig proc; // grids and noise variances are filled per run
        bool model_order_from_targets = true; // proc.model_order = targets: MUSIC order = number of targets
        std::optional<SearchGrid> range_grid;
        std::optional<SearchGrid> velocity_grid;

        MiSettings mi;
        CrlbSettings crlb;
        BandwidthSettings bandwidth;

        /// Cross-field checks; aligns the low-band CP when requested.
        void finalize();

        SearchGrid effective_range_grid() const;
        SearchGrid effective_velocity_grid() const;
        double max_delay_s() const;
    };

    /// Reference scene at desk scale: N_T = N_R = 8, N = 128, 100 trials.
    Scenario desk_scenario();

    /// Flat "section.key = value" text. '#' starts a comment. Unknown keys,
    /// duplicate keys and malformed values are config-parse errors carrying
    /// origin:line. Numeric lists are comma separated or start:step:stop.
    Scenario parse_scenario(std::string_view text, std::string_view origin = "<string>");

    Scenario load_scenario(const std::string &path);

    /// Inclusive start:step:stop expansion, tolerant to rounding at the end.
    std::vector<double> expand_range(double start, double step, double stop);
}

#endif
