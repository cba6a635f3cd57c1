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

#ifndef CAISAC_CHANNEL_HPP
#define CAISAC_CHANNEL_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "caisac/common.hpp"
#include "caisac/waveform.hpp"

namespace caisac
{
    struct TargetTruth
    {
        double range_m = 0.0;
        double velocity_mps = 0.0;
        double angle_rad = 0.0;
        double rcs_variance = 1.0;

        void validate() const;
        double delay_s() const { return 2.0 * range_m / kSpeedOfLight; }
        double doppler_hz(const CarrierComponentConfig &cfg) const
        {
            return 2.0 * cfg.carrier_freq_hz * velocity_mps / kSpeedOfLight;
        }
    };

    /// Uniform linear array response, element p = exp(j 2 pi p d/lambda sin(angle)).
    Eigen::VectorXcd steering(double angle_rad, int num_elements, double d_over_lambda);

    /// Two-way amplitude sqrt(lambda^2 / ((4 pi)^3 r^4)).
    double attenuation_magnitude(double lambda_m, double range_m);

    /// kappa = attenuation_magnitude(lambda, r) * rcs_sample.
    cplx attenuation(double lambda_m, double range_m, cplx rcs_sample);

    /// One CN(0, rcs_variance) reflectivity sample per target.
    std::vector<cplx> draw_rcs(const std::vector<TargetTruth> &targets, std::uint64_t seed);

    /// N_R x N_T sensing channel on symbol m, subcarrier n.
    Eigen::MatrixXcd sensing_channel(const CarrierComponentConfig &cfg, const ArrayConfig &array,
                                     const std::vector<TargetTruth> &targets, int m, int n,
                                     const std::vector<cplx> &rcs_samples);

    /// samples(p, n, m): receive antenna p, subcarrier n, symbol m.
    struct EchoCube
    {
        Cube samples;
        double noise_variance = 0.0;
        int band = 0;

        int num_rx() const { return static_cast<int>(samples.dim0()); }
        int num_subcarriers() const { return static_cast<int>(samples.dim1()); }
        int num_symbols() const { return static_cast<int>(samples.dim2()); }
    };

    /// y = H W_Tx d + z with explicit reflectivity samples and a noise seed.
    EchoCube simulate_echo(const CarrierComponentConfig &cfg, const ArrayConfig &array,
                           const std::vector<TargetTruth> &targets, const SensingFrame &frame,
                           const std::vector<cplx> &rcs_samples, double noise_variance, std::uint64_t noise_seed);

    /// As above, drawing the reflectivity from rcs_seed.
    EchoCube simulate_echo(const CarrierComponentConfig &cfg, const ArrayConfig &array,
                           const std::vector<TargetTruth> &targets, const SensingFrame &frame,
                           double noise_variance, std::uint64_t rcs_seed, std::uint64_t noise_seed);

    struct CommChannelRealization
    {
        std::vector<Eigen::MatrixXcd> taps; // L matrices N_T x N_U
        int num_paths() const { return static_cast<int>(taps.size()); }
    };

    /// L taps with i.i.d. CN(0, 1) entries.
    CommChannelRealization comm_channel(int num_paths, int num_tx, int num_ue, std::uint64_t seed);

    /// sum_l taps[l] exp(-j 2 pi n l / N).
    Eigen::MatrixXcd freq_response(const CommChannelRealization &ch, int n, int num_subcarriers);
}

#endif
