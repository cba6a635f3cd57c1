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

#include "caisac/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <unsupported/Eigen/FFT>

#include "caisac/channel.hpp"
#include "caisac/rng.hpp"

namespace caisac
{
    void CarrierComponentConfig::validate() const
    {
        if (!(subcarrier_spacing_hz > 0.0))
            throw Error(Errc::invalid_config, "subcarrier spacing must be positive");
        if (!(carrier_freq_hz > 0.0))
            throw Error(Errc::invalid_config, "carrier frequency must be positive");
        if (num_subcarriers < 1)
            throw Error(Errc::invalid_config, "number of subcarriers must be positive");
        if (num_symbols < 1)
            throw Error(Errc::invalid_config, "number of symbols must be positive");
        if (!(cp_length_samples >= 0.0) || !std::isfinite(cp_length_samples))
            throw Error(Errc::invalid_config, "CP length must be non-negative");
    }

    double CarrierComponentConfig::fc_t_product() const
    {
        return carrier_freq_hz * derive_timing(*this).total_s;
    }

    void CarrierComponentConfig::check_doppler_guard(double max_speed_mps) const
    {
        double fd = 2.0 * carrier_freq_hz * std::abs(max_speed_mps) / kSpeedOfLight;
        if (subcarrier_spacing_hz < 10.0 * fd)
            throw Error(Errc::invalid_config, "subcarrier spacing below ten times the maximum Doppler shift of band " +
                                                  std::to_string(band_index));
    }

    SymbolTiming derive_timing(const CarrierComponentConfig &cfg)
    {
        cfg.validate();
        SymbolTiming t;
        t.elementary_s = 1.0 / cfg.subcarrier_spacing_hz;
        t.cp_s = cfg.cp_length_samples * t.elementary_s / cfg.num_subcarriers;
        t.total_s = t.elementary_s + t.cp_s;
        return t;
    }

    BandPairRatio band_ratio(const CarrierComponentConfig &low, const CarrierComponentConfig &high)
    {
        low.validate();
        high.validate();
        double r = high.subcarrier_spacing_hz / low.subcarrier_spacing_hz;
        double q = std::round(r);
        if (std::abs(r - q) > 1e-9 * r || q < 2.0)
            throw Error(Errc::unsupported_numerology,
                        "subcarrier spacing ratio " + std::to_string(r) + " is not an integer >= 2");
        BandPairRatio out;
        out.q = static_cast<int>(q);
        out.rho = high.carrier_freq_hz / low.carrier_freq_hz - q;
        // Snap round-off so that exact ratios such as 28/3.5 give rho = 0.
        if (std::abs(out.rho) < 1e-12 * q)
            out.rho = 0.0;
        if (out.rho < 0.0 || out.rho >= 1.0)
            throw Error(Errc::inconsistent_config, "carrier ratio offset rho = " + std::to_string(out.rho) +
                                                       " outside [0, 1)");
        return out;
    }

    double align_cp(const CarrierComponentConfig &low, const CarrierComponentConfig &high, double max_delay_s)
    {
        BandPairRatio br = band_ratio(low, high);
        double q = br.q;
        double n1 = low.num_subcarriers;
        double n2 = high.num_subcarriers;
        double ns1 = (1.0 + br.rho / q) * (n1 / n2) * high.cp_length_samples + n1 * br.rho / q;

        CarrierComponentConfig aligned = low;
        aligned.cp_length_samples = ns1;
        double cp_low = derive_timing(aligned).cp_s;
        double cp_high = derive_timing(high).cp_s;
        if (max_delay_s > 0.0 && std::min(cp_low, cp_high) < max_delay_s)
            throw Error(Errc::cp_too_short, "CP duration " + std::to_string(std::min(cp_low, cp_high)) +
                                                " s is shorter than the maximum delay " + std::to_string(max_delay_s) + " s");
        return ns1;
    }

    void ArrayConfig::validate() const
    {
        if (num_tx < 1 || num_rx < 1)
            throw Error(Errc::invalid_config, "array element counts must be positive");
        if (!(element_spacing_m > 0.0))
            throw Error(Errc::invalid_config, "element spacing must be positive");
    }

    ArrayConfig default_array(int num_tx, int num_rx, const std::vector<CarrierComponentConfig> &bands)
    {
        if (bands.empty())
            throw Error(Errc::invalid_config, "at least one band is required");
        double fmax = 0.0;
        for (const auto &b : bands)
            fmax = std::max(fmax, b.carrier_freq_hz);
        ArrayConfig a;
        a.num_tx = num_tx;
        a.num_rx = num_rx;
        a.element_spacing_m = 0.5 * kSpeedOfLight / fmax;
        a.validate();
        return a;
    }

    Eigen::MatrixXcd CommFrame::transmit_block(int n) const
    {
        Eigen::MatrixXcd x(num_symbols, num_tx);
        for (int m = 0; m < num_symbols; ++m)
            for (int k = 0; k < num_tx; ++k)
                x(m, k) = precoded(k + num_tx * n, m);
        return x;
    }

    namespace
    {
        Eigen::MatrixXcd haar_unitary(int n, Rng &rng)
        {
            Eigen::MatrixXcd g(n, n);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    g(i, j) = complex_normal(rng);
            Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
            Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
            const Eigen::MatrixXcd &r = qr.matrixQR();
            for (int j = 0; j < n; ++j)
            {
                double mag = std::abs(r(j, j));
                if (mag > 0.0)
                    q.col(j) *= r(j, j) / mag;
            }
            return q;
        }
    }

    CommFrame generate_comm_frame(const CarrierComponentConfig &cfg, int num_tx, int num_users, std::uint64_t seed)
    {
        cfg.validate();
        if (num_tx < 1 || num_users < 1)
            throw Error(Errc::invalid_config, "antenna and user counts must be positive");
        if (num_users > num_tx)
            throw Error(Errc::overloaded_spatial_layers, std::to_string(num_users) + " users exceed " +
                                                             std::to_string(num_tx) + " transmit antennas");
        const int n_sc = cfg.num_subcarriers;
        const int n_sym = cfg.num_symbols;
        Rng rng(seed);

        CommFrame f;
        f.num_users = num_users;
        f.num_tx = num_tx;
        f.num_subcarriers = n_sc;
        f.num_symbols = n_sym;
        f.precoder.reserve(n_sc);
        for (int n = 0; n < n_sc; ++n)
            f.precoder.push_back(haar_unitary(num_tx, rng).leftCols(num_users));

        const double a = 1.0 / std::sqrt(2.0);
        std::uniform_int_distribution<int> bit(0, 1);
        f.symbols.resize(num_users * n_sc, n_sym);
        for (int m = 0; m < n_sym; ++m)
            for (int i = 0; i < num_users * n_sc; ++i)
            {
                double re = bit(rng) ? a : -a;
                double im = bit(rng) ? a : -a;
                f.symbols(i, m) = {re, im};
            }

        f.precoded.resize(num_tx * n_sc, n_sym);
        for (int n = 0; n < n_sc; ++n)
            f.precoded.middleRows(num_tx * n, num_tx) = f.precoder[n] * f.symbols.middleRows(num_users * n, num_users);
        return f;
    }

    SensingFrame generate_sensing_frame(const CarrierComponentConfig &cfg, const ArrayConfig &array,
                                        std::optional<double> steer_toward, std::uint64_t seed)
    {
        cfg.validate();
        array.validate();
        const int nt = array.num_tx;
        SensingFrame f;
        f.data = Cube(nt, cfg.num_subcarriers, cfg.num_symbols);
        Rng rng(seed);
        std::uniform_real_distribution<double> phase(0.0, kTwoPi);
        for (std::size_t i = 0; i < f.data.size(); ++i)
            f.data.data()[i] = std::polar(1.0, phase(rng));

        if (!steer_toward)
        {
            f.tx_beamformer = Eigen::MatrixXcd::Identity(nt, nt);
        }
        else
        {
            Eigen::VectorXcd a = steering(*steer_toward, nt, array.spacing_over_lambda(cfg));
            f.tx_beamformer.resize(nt, nt);
            const double s = 1.0 / std::sqrt(static_cast<double>(nt));
            for (int k = 0; k < nt; ++k)
                for (int p = 0; p < nt; ++p)
                    f.tx_beamformer(p, k) = std::conj(a(p)) * std::polar(s, -kTwoPi * p * k / nt);
        }
        return f;
    }

    SensingFrame constant_sensing_frame(const CarrierComponentConfig &cfg, const ArrayConfig &array)
    {
        cfg.validate();
        array.validate();
        SensingFrame f;
        f.data = Cube(array.num_tx, cfg.num_subcarriers, cfg.num_symbols, cplx(1.0, 0.0));
        f.tx_beamformer = Eigen::MatrixXcd::Identity(array.num_tx, array.num_tx);
        return f;
    }

    Eigen::VectorXcd to_time_domain(const Eigen::MatrixXcd &freq, const CarrierComponentConfig &cfg)
    {
        cfg.validate();
        const int n = cfg.num_subcarriers;
        if (freq.rows() != n)
            throw Error(Errc::dimension_mismatch, "frame rows must equal the number of subcarriers");
        const int ncp = static_cast<int>(std::lround(cfg.cp_length_samples));
        const int len = n + ncp;
        Eigen::VectorXcd out(len * freq.cols());

        Eigen::FFT<double> fft;
        std::vector<cplx> in(n), td(n);
        for (Eigen::Index m = 0; m < freq.cols(); ++m)
        {
            for (int k = 0; k < n; ++k)
                in[k] = freq(k, m);
            fft.inv(td, in); // scaled by 1/N
            for (int k = 0; k < ncp; ++k)
                out(m * len + k) = td[((n - ncp + k) % n + n) % n];
            for (int k = 0; k < n; ++k)
                out(m * len + ncp + k) = td[k];
        }
        return out;
    }

    std::vector<Eigen::VectorXcd> to_time_domain(const std::vector<Eigen::MatrixXcd> &per_antenna,
                                                 const CarrierComponentConfig &cfg)
    {
        std::vector<Eigen::VectorXcd> out;
        out.reserve(per_antenna.size());
        for (const auto &f : per_antenna)
            out.push_back(to_time_domain(f, cfg));
        return out;
    }

    Eigen::MatrixXcd from_time_domain(const Eigen::VectorXcd &stream, const CarrierComponentConfig &cfg)
    {
        cfg.validate();
        const int n = cfg.num_subcarriers;
        const int ncp = static_cast<int>(std::lround(cfg.cp_length_samples));
        const int len = n + ncp;
        if (stream.size() % len != 0)
            throw Error(Errc::dimension_mismatch, "stream length is not a whole number of symbols");
        const Eigen::Index nsym = stream.size() / len;
        Eigen::MatrixXcd out(n, nsym);
        Eigen::FFT<double> fft;
        std::vector<cplx> in(n), fd(n);
        for (Eigen::Index m = 0; m < nsym; ++m)
        {
            for (int k = 0; k < n; ++k)
                in[k] = stream(m * len + ncp + k);
            fft.fwd(fd, in);
            for (int k = 0; k < n; ++k)
                out(k, m) = fd[k];
        }
        return out;
    }
}
