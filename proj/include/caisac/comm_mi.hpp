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

#ifndef CAISAC_COMM_MI_HPP
#define CAISAC_COMM_MI_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "caisac/channel.hpp"
#include "caisac/waveform.hpp"

namespace caisac
{
    /// Per-subcarrier responses of one band, N entries of N_T x N_U.
    using BandResponse = std::vector<Eigen::MatrixXcd>;
    /// Per-subcarrier input covariances of one band, N entries of N_T x N_T.
    using BandCovariance = std::vector<Eigen::MatrixXcd>;

    BandResponse band_response(const CommChannelRealization &ch, int num_subcarriers);

    /// Y = sum_b X^b H^b + W with Y of size (N M) x N_U; row n*M + m is symbol m on subcarrier n.
    Eigen::MatrixXcd simulate_comm_rx(const std::vector<CommFrame> &frames,
                                      const std::vector<CommChannelRealization> &channels,
                                      double noise_variance, std::uint64_t seed);

    /// E{X_n^H X_n}/M for precoder block W_n and total power P: (P/U) conj(W_n W_n^H).
    Eigen::MatrixXcd input_covariance(const Eigen::MatrixXcd &precoder_block, double total_power);

    BandCovariance input_covariance(const CommFrame &frame, double total_power);

    /// M sum_n log2 det(H_n^H R_n H_n / sigma^2 + I).
    double mi_single_band(const BandResponse &h, const BandCovariance &r, double noise_variance, int num_symbols);

    struct MiReport
    {
        double mi_bits = 0.0;
        std::vector<double> per_band_mi_bits;
        double mi_bits_per_dim = 0.0; // per complex receive dimension N M N_U
        double snr_db = 0.0;
        int num_ue_antennas = 0;
    };

    /// Carrier-aggregated MI: the Gram terms of both bands add inside each determinant.
    MiReport mi_ca(const std::vector<BandResponse> &h, const std::vector<BandCovariance> &r,
                   double noise_variance, int num_symbols);

    /// Eigenvalues of H_n^H R_n H_n for every subcarrier, concatenated.
    ///
    /// Lets an SNR sweep reuse one decomposition: MI(s2) = M sum log2(1 + lambda/s2).
    std::vector<double> gram_eigenvalues(const std::vector<BandResponse> &h, const std::vector<BandCovariance> &r);

    double mi_from_eigenvalues(const std::vector<double> &eigenvalues, double noise_variance, int num_symbols);
}

#endif
