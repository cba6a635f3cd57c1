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

#include "caisac/channel.hpp"

#include <cmath>
#include <random>

#include "caisac/rng.hpp"

namespace caisac
{
    void TargetTruth::validate() const
    {
        if (!(range_m > 0.0))
            throw Error(Errc::invalid_config, "target range must be positive");
        if (!(std::abs(angle_rad) < kPi / 2))
            throw Error(Errc::invalid_config, "target angle must lie strictly inside (-90, 90) degrees");
        if (!(rcs_variance >= 0.0))
            throw Error(Errc::invalid_config, "RCS variance must be non-negative");
    }

    Eigen::VectorXcd steering(double angle_rad, int num_elements, double d_over_lambda)
    {
        Eigen::VectorXcd a(num_elements);
        const double s = kTwoPi * d_over_lambda * std::sin(angle_rad);
        for (int p = 0; p < num_elements; ++p)
            a(p) = std::polar(1.0, s * p);
        return a;
    }

    double attenuation_magnitude(double lambda_m, double range_m)
    {
        if (!(range_m > 0.0))
            throw Error(Errc::invalid_input, "range must be positive");
        const double fourpi = 4.0 * kPi;
        return std::sqrt(lambda_m * lambda_m / (fourpi * fourpi * fourpi * std::pow(range_m, 4)));
    }

    cplx attenuation(double lambda_m, double range_m, cplx rcs_sample)
    {
        return attenuation_magnitude(lambda_m, range_m) * rcs_sample;
    }

    std::vector<cplx> draw_rcs(const std::vector<TargetTruth> &targets, std::uint64_t seed)
    {
        Rng rng(seed);
        std::vector<cplx> out;
        out.reserve(targets.size());
        for (const auto &t : targets)
            out.push_back(complex_normal(rng, t.rcs_variance));
        return out;
    }

    Eigen::MatrixXcd sensing_channel(const CarrierComponentConfig &cfg, const ArrayConfig &array,
                                     const std::vector<TargetTruth> &targets, int m, int n,
                                     const std::vector<cplx> &rcs_samples)
    {
        if (rcs_samples.size() != targets.size())
            throw Error(Errc::dimension_mismatch, "one RCS sample per target is required");
        if (m < 0 || m >= cfg.num_symbols || n < 0 || n >= cfg.num_subcarriers)
            throw Error(Errc::invalid_input, "resource element index out of range");
        const double dl = array.spacing_over_lambda(cfg);
        const double t_sym = derive_timing(cfg).total_s;
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(array.num_rx, array.num_tx);
        for (std::size_t i = 0; i < targets.size(); ++i)
        {
            const auto &tg = targets[i];
            cplx kappa = attenuation(cfg.wavelength(), tg.range_m, rcs_samples[i]);
            double phase = kTwoPi * (tg.doppler_hz(cfg) * m * t_sym - n * cfg.subcarrier_spacing_hz * tg.delay_s());
            h += kappa * std::polar(1.0, phase) * steering(tg.angle_rad, array.num_rx, dl) *
                 steering(tg.angle_rad, array.num_tx, dl).transpose();
        }
        return h;
    }

    EchoCube simulate_echo(const CarrierComponentConfig &cfg, const ArrayConfig &array,
                           const std::vector<TargetTruth> &targets, const SensingFrame &frame,
                           const std::vector<cplx> &rcs_samples, double noise_variance, std::uint64_t noise_seed)
    {
        cfg.validate();
        array.validate();
        if (rcs_samples.size() != targets.size())
            throw Error(Errc::dimension_mismatch, "one RCS sample per target is required");
        if (!(noise_variance >= 0.0))
            throw Error(Errc::invalid_input, "noise variance must be non-negative");
        const int nr = array.num_rx, nt = array.num_tx;
        const int nsc = cfg.num_subcarriers, nsym = cfg.num_symbols;
        if (frame.num_tx() != nt || frame.num_subcarriers() != nsc || frame.num_symbols() != nsym)
            throw Error(Errc::dimension_mismatch, "sensing frame does not match band and array");

        const SymbolTiming timing = derive_timing(cfg);
        for (const auto &tg : targets)
        {
            tg.validate();
            if (tg.delay_s() > timing.cp_s)
                throw Error(Errc::cp_too_short, "target delay exceeds the CP duration of band " +
                                                    std::to_string(cfg.band_index));
        }

        EchoCube echo;
        echo.samples = Cube(nr, nsc, nsym);
        echo.noise_variance = noise_variance;
        echo.band = cfg.band_index;

        const double dl = array.spacing_over_lambda(cfg);
        const Eigen::MatrixXcd &w = frame.tx_beamformer;
        for (std::size_t i = 0; i < targets.size(); ++i)
        {
            const auto &tg = targets[i];
            const cplx kappa = attenuation(cfg.wavelength(), tg.range_m, rcs_samples[i]);
            const Eigen::VectorXcd a_rx = steering(tg.angle_rad, nr, dl);
            // b^T d = a_Tx^T W d
            const Eigen::VectorXcd b = w.transpose() * steering(tg.angle_rad, nt, dl);
            const double fs = tg.doppler_hz(cfg);
            const double tau = tg.delay_s();
            Eigen::VectorXcd dopp(nsym), delay(nsc);
            for (int m = 0; m < nsym; ++m)
                dopp(m) = std::polar(1.0, kTwoPi * fs * m * timing.total_s);
            for (int n = 0; n < nsc; ++n)
                delay(n) = std::polar(1.0, -kTwoPi * n * cfg.subcarrier_spacing_hz * tau);

            for (int m = 0; m < nsym; ++m)
                for (int n = 0; n < nsc; ++n)
                {
                    const cplx *d = frame.data.fibre(n, m);
                    cplx s = 0.0;
                    for (int k = 0; k < nt; ++k)
                        s += b(k) * d[k];
                    s *= kappa * dopp(m) * delay(n);
                    cplx *y = echo.samples.fibre(n, m);
                    for (int p = 0; p < nr; ++p)
                        y[p] += s * a_rx(p);
                }
        }

        if (noise_variance > 0.0)
        {
            Rng rng(noise_seed);
            std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * noise_variance));
            cplx *y = echo.samples.data();
            for (std::size_t i = 0; i < echo.samples.size(); ++i)
            {
                double re = nd(rng);
                double im = nd(rng);
                y[i] += cplx(re, im);
            }
        }
        return echo;
    }

    EchoCube simulate_echo(const CarrierComponentConfig &cfg, const ArrayConfig &array,
                           const std::vector<TargetTruth> &targets, const SensingFrame &frame,
                           double noise_variance, std::uint64_t rcs_seed, std::uint64_t noise_seed)
    {
        return simulate_echo(cfg, array, targets, frame, draw_rcs(targets, rcs_seed), noise_variance, noise_seed);
    }

    CommChannelRealization comm_channel(int num_paths, int num_tx, int num_ue, std::uint64_t seed)
    {
        if (num_paths < 1)
            throw Error(Errc::invalid_config, "at least one path is required");
        if (num_tx < 1 || num_ue < 1)
            throw Error(Errc::invalid_config, "antenna counts must be positive");
        Rng rng(seed);
        std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
        CommChannelRealization ch;
        ch.taps.reserve(num_paths);
        for (int l = 0; l < num_paths; ++l)
        {
            Eigen::MatrixXcd h(num_tx, num_ue);
            for (int u = 0; u < num_ue; ++u)
                for (int k = 0; k < num_tx; ++k)
                {
                    double re = nd(rng);
                    double im = nd(rng);
                    h(k, u) = {re, im};
                }
            ch.taps.push_back(std::move(h));
        }
        return ch;
    }

    Eigen::MatrixXcd freq_response(const CommChannelRealization &ch, int n, int num_subcarriers)
    {
        if (ch.taps.empty())
            throw Error(Errc::invalid_input, "channel has no taps");
        if (num_subcarriers < 1)
            throw Error(Errc::invalid_input, "number of subcarriers must be positive");
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(ch.taps[0].rows(), ch.taps[0].cols());
        for (int l = 0; l < ch.num_paths(); ++l)
        {
            // Reduce n*l modulo N before forming the phase to keep it exact for large products.
            long long r = (static_cast<long long>(n) * l) % num_subcarriers;
            h += std::polar(1.0, -kTwoPi * static_cast<double>(r) / num_subcarriers) * ch.taps[l];
        }
        return h;
    }
}
