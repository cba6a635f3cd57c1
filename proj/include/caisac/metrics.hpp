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

#ifndef CAISAC_METRICS_HPP
#define CAISAC_METRICS_HPP

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "caisac/channel.hpp"
#include "caisac/fusion.hpp"
#include "caisac/waveform.hpp"

namespace caisac
{
    /// Index sums over p < N_R, n < N, m < M weighted by d/lambda, df and f_C T.
    struct ThetaSums
    {
        double p = 0.0;  // sum (p d/lambda)^2
        double n = 0.0;  // sum (n df)^2
        double m = 0.0;  // sum (m fcT)^2
        double pn = 0.0; // sum_p sum_n p n (d/lambda) df
        double pm = 0.0; // sum_p sum_m p m (d/lambda) fcT
        double mn = 0.0; // sum_m sum_n m n df fcT
    };

    ThetaSums theta_sums(const CarrierComponentConfig &cfg, const ArrayConfig &array);

    /// Fisher information over (sin theta, tau, gamma = 2v/c).
    struct FisherInfo3
    {
        Eigen::Matrix3d matrix = Eigen::Matrix3d::Zero();
        double snr_linear = 0.0;
    };

    FisherInfo3 fim_band(const CarrierComponentConfig &cfg, const ArrayConfig &array, double snr_linear);

    /// Brute-force FIM: explicit sum over every (p, m, n) of
    /// Re(conj(ds/da) ds/db) for the unit-amplitude phase model.
    FisherInfo3 fim_numeric_oracle(const CarrierComponentConfig &cfg, const ArrayConfig &array, double snr_linear);

    struct BandCrlb
    {
        double sin_theta = 0.0;
        double delay_s2 = 0.0;
        double gamma = 0.0;
        Eigen::Vector3d inverse_diagonal = Eigen::Vector3d::Zero();
        double max_rel_discrepancy = 0.0; // closed form vs inverse diagonal
    };

    /// Closed-form bounds on (sin theta, tau, gamma) from the Theta sums,
    /// together with the diagonal of the inverse FIM for cross-checking.
    BandCrlb crlb_band(const FisherInfo3 &f, const CarrierComponentConfig &cfg, const ArrayConfig &array);

    enum class BandTag
    {
        low,
        high,
        ca,
    };

    std::string_view band_tag_name(BandTag tag);

    struct CrlbReport
    {
        double crlb_angle_rad2 = 0.0;
        double crlb_range_m2 = 0.0;
        double crlb_velocity_mps2 = 0.0;
        BandTag band_tag = BandTag::ca;
    };

    /// Bounds in physical units from an aggregate FIM: angle = [cos(theta) F]^-1_11,
    /// range and velocity = (c/2)^2 [F^-1]_22 and [F^-1]_33.
    CrlbReport crlb_from_fim(const Eigen::Matrix3d &f, double theta_rad, BandTag tag);

    CrlbReport crlb_ca(const FisherInfo3 &f_low, const FisherInfo3 &f_high, double theta_rad);

    struct ArmseReport
    {
        double armse_range_m = 0.0;
        double armse_velocity_mps = 0.0;
        double armse_angle_rad = 0.0;
        int num_trials = 0;
        double snr_db = 0.0;
    };

    /// Per-target RMSE across trials, averaged over targets.
    ArmseReport armse(const std::vector<EstimateSet> &trials, const std::vector<TargetTruth> &truth,
                      double snr_db = 0.0);

    struct TheoreticalRmse
    {
        double range_m = 0.0;
        double velocity_mps = 0.0;
    };

    /// sigma_R = c / (2 B sqrt(2 chi)), sigma_V = c / (2 M f_C T sqrt(2 chi)).
    TheoreticalRmse theoretical_rmse(double bandwidth_hz, double snr_linear, int num_symbols, double fc_hz,
                                     double symbol_duration_s);
}

#endif
