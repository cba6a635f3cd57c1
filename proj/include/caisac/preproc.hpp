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

#ifndef CAISAC_PREPROC_HPP
#define CAISAC_PREPROC_HPP

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "caisac/channel.hpp"
#include "caisac/waveform.hpp"

namespace caisac
{
    /// Per-RE channel estimates H(m,n) = y d^H / (|d|^2 + reg).
    ///
    /// Every estimate is rank one, so the cube keeps the factors (echo, data and
    /// the per-RE scalar) instead of N x M dense N_R x N_T matrices.
    struct ChannelEstimateCube
    {
        Cube echo;              // N_R x N x M
        Cube data;              // N_T x N x M
        Eigen::MatrixXd scale;  // N x M, 1/(|d|^2 + reg)
        Eigen::MatrixXcd tx_beamformer;
        int band = 0;

        int num_rx() const { return static_cast<int>(echo.dim0()); }
        int num_tx() const { return static_cast<int>(data.dim0()); }
        int num_subcarriers() const { return static_cast<int>(echo.dim1()); }
        int num_symbols() const { return static_cast<int>(echo.dim2()); }

        /// Dense N_R x N_T estimate on subcarrier n, symbol m.
        Eigen::MatrixXcd matrix(int n, int m) const;
    };

    /// Default regularisation 1e-3 * N_T.
    inline double default_regularization(int num_tx) { return 1e-3 * num_tx; }

    ChannelEstimateCube remove_tx_data(const EchoCube &echo, const SensingFrame &frame, double regularization);

    /// Half-open angle grid [min, max) with uniform step.
    struct AngleGrid
    {
        double min_rad = 0.0;
        double max_rad = kPi / 2;
        double step_rad = deg2rad(0.05);

        std::vector<double> values() const;
    };

    struct AoAEstimate
    {
        std::vector<double> angles_rad; // ascending
        std::vector<double> grid_rad;
        std::vector<double> spectrum;
        std::vector<double> eigenvalues; // descending
        int model_order = 0;
        bool partial = false;
    };

    /// Thrown when fewer local maxima than the model order exist; carries what was found.
    class InsufficientPeaksError : public Error
    {
    public:
        InsufficientPeaksError(AoAEstimate partial, const std::string &what)
            : Error(Errc::insufficient_peaks, what), partial_(std::move(partial)) {}
        const AoAEstimate &partial() const { return partial_; }

    private:
        AoAEstimate partial_;
    };

    /// Number of dominant eigenvalues by the largest ratio between consecutive ones.
    int estimate_model_order(const Eigen::VectorXd &eigenvalues_desc);

    /// MUSIC over the receive array. model_order unset selects it automatically.
    AoAEstimate estimate_aoa(const ChannelEstimateCube &est, double d_over_lambda, const AngleGrid &grid,
                             std::optional<int> model_order, int snapshot_stride = 1);

    struct TargetDelayDopplerGrid
    {
        Eigen::MatrixXcd samples; // N x M
        int target = 0;
    };

    /// a_Rx^H H W_Tx^H conj(a_Tx) / (N_R N_T) on every RE.
    TargetDelayDopplerGrid spatial_filter(const ChannelEstimateCube &est, double angle_rad, double d_over_lambda,
                                          int target = 0);

    /// w[k] = (L - k) / (L (L + 1) / 2), k = 0..L-1.
    Eigen::VectorXd triangular_weights(int length);

    Eigen::VectorXcd ccc_delay_feature(const TargetDelayDopplerGrid &grid);
    Eigen::VectorXcd ccc_doppler_feature(const TargetDelayDopplerGrid &grid);

    struct FeatureVectorPair
    {
        Eigen::VectorXcd delay_vec;
        Eigen::VectorXcd doppler_vec;
        int band = 0;
        int target = 0;
    };

    FeatureVectorPair extract_features(const TargetDelayDopplerGrid &grid, int band);
}

#endif
