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

#ifndef CAISAC_WAVEFORM_HPP
#define CAISAC_WAVEFORM_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "caisac/common.hpp"

namespace caisac
{
    /// Numerology of one carrier component.
    struct CarrierComponentConfig
    {
        double carrier_freq_hz = 0.0;
        double subcarrier_spacing_hz = 0.0;
        int num_subcarriers = 0;
        int num_symbols = 0;
        double cp_length_samples = 0.0; // real valued, see align_cp
        int band_index = 0;

        /// Throws invalid-config on non-positive spacing, carrier, counts or negative CP.
        void validate() const;

        double wavelength() const { return kSpeedOfLight / carrier_freq_hz; }
        double bandwidth_hz() const { return subcarrier_spacing_hz * num_subcarriers; }

        /// f_C * T, the Doppler phase advance per symbol per unit of 2v/c.
        double fc_t_product() const;

        /// Throws invalid-config when the subcarrier spacing is below ten times the Doppler shift.
        void check_doppler_guard(double max_speed_mps) const;
    };

    struct SymbolTiming
    {
        double elementary_s = 0.0; // 1/df
        double cp_s = 0.0;
        double total_s = 0.0;
    };

    SymbolTiming derive_timing(const CarrierComponentConfig &cfg);

    struct BandPairRatio
    {
        int q = 1;
        double rho = 0.0;
    };

    /// Q = df_high/df_low (integer >= 2), rho = fc_high/fc_low - Q in [0, 1).
    BandPairRatio band_ratio(const CarrierComponentConfig &low, const CarrierComponentConfig &high);

    /// Low-band CP length (samples) giving f_C T equal on both bands.
    ///
    /// Throws cp-too-short when either resulting CP duration does not exceed
    /// max_delay_s.
    double align_cp(const CarrierComponentConfig &low, const CarrierComponentConfig &high, double max_delay_s = 0.0);

    struct ArrayConfig
    {
        int num_tx = 1;
        int num_rx = 1;
        double element_spacing_m = 0.0;

        void validate() const;
        double spacing_over_lambda(const CarrierComponentConfig &cfg) const
        {
            return element_spacing_m / cfg.wavelength();
        }
    };

    /// Half-wavelength spacing at the highest carrier of the given bands.
    ArrayConfig default_array(int num_tx, int num_rx, const std::vector<CarrierComponentConfig> &bands);

    /// Downlink frame of one band.
    ///
    /// symbols(u + U*n, m) holds user u on subcarrier n, symbol m.
    /// precoder[n] is the N_T x U block of subcarrier n.
    /// precoded(k + N_T*n, m) is antenna k on subcarrier n.
    struct CommFrame
    {
        int num_users = 0;
        int num_tx = 0;
        int num_subcarriers = 0;
        int num_symbols = 0;
        Eigen::MatrixXcd symbols;
        std::vector<Eigen::MatrixXcd> precoder;
        Eigen::MatrixXcd precoded;

        /// X_n: the M x N_T transmit block of subcarrier n.
        Eigen::MatrixXcd transmit_block(int n) const;
    };

    CommFrame generate_comm_frame(const CarrierComponentConfig &cfg, int num_tx, int num_users, std::uint64_t seed);

    /// Sensing frame: data(k, n, m) is antenna k on subcarrier n, symbol m.
    struct SensingFrame
    {
        Cube data;
        Eigen::MatrixXcd tx_beamformer;

        int num_tx() const { return static_cast<int>(data.dim0()); }
        int num_subcarriers() const { return static_cast<int>(data.dim1()); }
        int num_symbols() const { return static_cast<int>(data.dim2()); }
    };

    /// Unit-modulus random-phase data. With steer_toward set, the beamformer is
    /// diag(conj(a_Tx(angle))) F / sqrt(N_T) with F the DFT matrix, a unitary
    /// matrix whose first column is conj(a_Tx(angle))/sqrt(N_T).
    SensingFrame generate_sensing_frame(const CarrierComponentConfig &cfg, const ArrayConfig &array,
                                        std::optional<double> steer_toward, std::uint64_t seed);

    /// Unit-modulus frame with every entry equal to one.
    SensingFrame constant_sensing_frame(const CarrierComponentConfig &cfg, const ArrayConfig &array);

    /// One antenna: freq is N x M. Returns M * (N + round(N_s)) samples, each
    /// symbol being the 1/N-normalised inverse DFT preceded by its cyclic prefix.
    Eigen::VectorXcd to_time_domain(const Eigen::MatrixXcd &freq, const CarrierComponentConfig &cfg);

    std::vector<Eigen::VectorXcd> to_time_domain(const std::vector<Eigen::MatrixXcd> &per_antenna,
                                                 const CarrierComponentConfig &cfg);

    /// Inverse of to_time_domain: strip CP and apply the forward DFT.
    Eigen::MatrixXcd from_time_domain(const Eigen::VectorXcd &stream, const CarrierComponentConfig &cfg);
}

#endif
