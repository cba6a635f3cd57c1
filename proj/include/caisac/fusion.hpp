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

#ifndef CAISAC_FUSION_HPP
#define CAISAC_FUSION_HPP

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "caisac/channel.hpp"
#include "caisac/preproc.hpp"
#include "caisac/waveform.hpp"

namespace caisac
{
    struct FusionWeights
    {
        double w_low = 0.5;
        double w_high = 0.5;
    };

    /// Inverse-noise weighting; the two weights sum to exactly 1.
    FusionWeights mrc_weights(double sigma2_low, double sigma2_high);

    struct FusedDelayVector
    {
        Eigen::VectorXcd samples;
        std::vector<bool> support_mask;
        int fusion_case = 1; // 1: length Q N_2 with gaps, 2: length N_1

        bool has_gaps() const;
    };

    /// Merge weighted delay vectors on the low-band subcarrier lattice.
    ///
    /// Low-band entry n lands on index n, high-band entry n'' on Q n''. Where both
    /// bands land the sum is halved.
    FusedDelayVector fuse_delay(const Eigen::VectorXcd &g_low, const Eigen::VectorXcd &g_high, int q,
                                const FusionWeights &w);

    /// Uniform grid values[i] = min + i (max - min) / count, i = 0..count-1.
    struct SearchGrid
    {
        double min = 0.0;
        double max = 1.0;
        int count = 2;

        void validate() const;
        double step() const { return (max - min) / count; }
        double value(int i) const { return min + i * step(); }
        std::vector<double> values() const;
    };

    struct RecoveryResult
    {
        Eigen::VectorXcd samples;
        bool warning = false;
        int atoms_used = 0;
        double residual_ratio = 0.0; // |residual| / |filled entries|
    };

    /// Fill the gaps of a fused delay vector by orthogonal matching pursuit over
    /// the delay-ramp dictionary exp(-j 2 pi xi df 2R/c) of the range grid.
    ///
    /// Filled entries are kept as they are. The warning flag is raised when the
    /// residual stays above tolerance * |p| after max_sparsity atoms; the gaps
    /// then hold the best max_sparsity-term fit.
    RecoveryResult recover_missing(const FusedDelayVector &p, int max_sparsity, const SearchGrid &range_grid,
                                   double delta_f_low, double tolerance = 1e-3);

    struct SearchResult
    {
        double estimate = 0.0;
        int index = 0;
        std::vector<double> profile; // magnitude per grid point
    };

    /// |sum_xi p[xi] exp(+j 2 pi xi df 2R/c)| maximised over the grid.
    SearchResult range_search(const Eigen::VectorXcd &p, const SearchGrid &grid, double delta_f);

    /// |sum_m f[m] exp(-j 2 pi m fcT 2V/c)| maximised over the grid.
    SearchResult velocity_search(const Eigen::VectorXcd &f, const SearchGrid &grid, double fc_t_product);

    /// Weighted Doppler vectors averaged on their common symbols; beyond the
    /// shorter one the longer band's weighted entries are kept.
    Eigen::VectorXcd fuse_doppler(const Eigen::VectorXcd &e_low, const Eigen::VectorXcd &e_high,
                                  const CarrierComponentConfig &low, const CarrierComponentConfig &high,
                                  const FusionWeights &w);

    enum class MethodTag
    {
        symbol_level,
        data_level,
        low_band,
        high_band,
    };

    std::string_view method_name(MethodTag tag);

    struct EstimateSet
    {
        std::vector<double> ranges_m;
        std::vector<double> velocities_mps;
        std::vector<double> angles_rad;
        MethodTag method = MethodTag::symbol_level;

        std::size_t size() const { return ranges_m.size(); }
    };

    enum class PairingRule
    {
        by_index, // lists already aligned
        by_range, // sort each list by range first
    };

    enum class ShapeBand
    {
        high,
        low,
    };

    /// Convex combination of per-band estimates.
    EstimateSet data_level_fuse(const EstimateSet &low, const EstimateSet &high, double sigma2_low,
                                double sigma2_high, const CarrierComponentConfig &cfg_low,
                                const CarrierComponentConfig &cfg_high, ShapeBand shape = ShapeBand::high,
                                PairingRule pairing = PairingRule::by_range);

    /// Range grid [0, c T_s,min / 2) with 4 Q N_2 points.
    SearchGrid default_range_grid(const CarrierComponentConfig &low, const CarrierComponentConfig &high);

    /// Velocity grid [-V, V) with V = min_b c df_b / (20 fc_b) and 8 max(M_1, M_2) points.
    SearchGrid default_velocity_grid(const CarrierComponentConfig &low, const CarrierComponentConfig &high);

    struct PipelineConfig
    {
        SearchGrid range_grid;
        SearchGrid velocity_grid;
        AngleGrid angle_grid;
        std::optional<double> regularization; // default 1e-3 N_T
        std::optional<int> model_order;       // unset: automatic
        int snapshot_stride = 1;
        double sigma2_low = 1.0;  // noise variances assumed known to the fusion stage
        double sigma2_high = 1.0;
        ShapeBand data_level_shape = ShapeBand::high;
        double omp_tolerance = 1e-3;
        int omp_sparsity = 1; // atoms per target vector; each one carries a single delay
        bool fuse_symbols = true; // false: per-band and data-level only, no CP alignment needed
    };

    struct PipelineResult
    {
        EstimateSet symbol_level;
        EstimateSet data_level;
        EstimateSet low_band;
        EstimateSet high_band;
        AoAEstimate aoa;
        bool aoa_partial = false;
        int recovery_warnings = 0;
    };

    PipelineResult symbol_level_pipeline(const EchoCube &echo_low, const EchoCube &echo_high,
                                         const SensingFrame &frame_low, const SensingFrame &frame_high,
                                         const CarrierComponentConfig &cfg_low,
                                         const CarrierComponentConfig &cfg_high, const ArrayConfig &array,
                                         const PipelineConfig &pc);
}

#endif
