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

#include "caisac/comm_mi.hpp"

#include <cmath>
#include <random>

#include "caisac/rng.hpp"

namespace caisac
{
    namespace
    {
        void check_psd(const Eigen::MatrixXcd &r)
        {
            if (r.rows() != r.cols())
                throw Error(Errc::invalid_input, "input covariance must be square");
            double scale = r.cwiseAbs().maxCoeff();
            if (scale == 0.0)
                return;
            if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
                throw Error(Errc::invalid_input, "input covariance is not Hermitian");
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() < -1e-10 * scale)
                throw Error(Errc::invalid_input, "input covariance is not positive semidefinite");
        }

        double log2det_hpd(const Eigen::MatrixXcd &a)
        {
            Eigen::LLT<Eigen::MatrixXcd> llt(a);
            if (llt.info() != Eigen::Success)
                throw Error(Errc::invalid_input, "determinant argument is not positive definite");
            double s = 0.0;
            const Eigen::MatrixXcd &l = llt.matrixLLT();
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                s += std::log2(l(i, i).real());
            return 2.0 * s;
        }

        void check_shapes(const std::vector<BandResponse> &h, const std::vector<BandCovariance> &r)
        {
            if (h.empty() || h.size() != r.size())
                throw Error(Errc::dimension_mismatch, "one covariance set per band is required");
            const std::size_t n = h[0].size();
            if (n == 0)
                throw Error(Errc::dimension_mismatch, "no subcarriers");
            const Eigen::Index nt = h[0][0].rows(), nu = h[0][0].cols();
            for (std::size_t b = 0; b < h.size(); ++b)
            {
                if (h[b].size() != n || r[b].size() != n)
                    throw Error(Errc::unsupported_shape, "bands must share the number of subcarriers");
                for (std::size_t k = 0; k < n; ++k)
                {
                    if (h[b][k].cols() != nu)
                        throw Error(Errc::unsupported_shape, "bands must share the number of UE antennas");
                    if (h[b][k].rows() != nt || r[b][k].rows() != nt || r[b][k].cols() != nt)
                        throw Error(Errc::dimension_mismatch, "channel and covariance sizes disagree");
                }
            }
        }

        Eigen::MatrixXcd gram(const std::vector<BandResponse> &h, const std::vector<BandCovariance> &r, std::size_t n)
        {
            const Eigen::Index nu = h[0][n].cols();
            Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(nu, nu);
            for (std::size_t b = 0; b < h.size(); ++b)
                g.noalias() += h[b][n].adjoint() * r[b][n] * h[b][n];
            return g;
        }
    }

    BandResponse band_response(const CommChannelRealization &ch, int num_subcarriers)
    {
        BandResponse out;
        out.reserve(num_subcarriers);
        for (int n = 0; n < num_subcarriers; ++n)
            out.push_back(freq_response(ch, n, num_subcarriers));
        return out;
    }

    Eigen::MatrixXcd simulate_comm_rx(const std::vector<CommFrame> &frames,
                                      const std::vector<CommChannelRealization> &channels,
                                      double noise_variance, std::uint64_t seed)
    {
        if (frames.empty() || frames.size() != channels.size())
            throw Error(Errc::dimension_mismatch, "one channel per band frame is required");
        const CommFrame &f0 = frames[0];
        const int nsc = f0.num_subcarriers, nsym = f0.num_symbols, nt = f0.num_tx;
        if (channels[0].taps.empty())
            throw Error(Errc::dimension_mismatch, "channel has no taps");
        const Eigen::Index nu = channels[0].taps[0].cols();
        for (std::size_t b = 0; b < frames.size(); ++b)
        {
            const auto &f = frames[b];
            if (f.num_subcarriers != nsc || f.num_symbols != nsym || f.num_tx != nt)
                throw Error(Errc::dimension_mismatch, "band frames must share N, M and N_T");
            if (channels[b].taps.empty())
                throw Error(Errc::dimension_mismatch, "channel has no taps");
            for (const auto &t : channels[b].taps)
                if (t.rows() != nt || t.cols() != nu)
                    throw Error(Errc::dimension_mismatch, "channel taps must be N_T x N_U and equal across bands");
        }

        Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nsc) * nsym, nu);
        for (std::size_t b = 0; b < frames.size(); ++b)
            for (int n = 0; n < nsc; ++n)
                y.middleRows(static_cast<Eigen::Index>(n) * nsym, nsym).noalias() +=
                    frames[b].transmit_block(n) * freq_response(channels[b], n, nsc);

        if (noise_variance > 0.0)
        {
            Rng rng(seed);
            std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * noise_variance));
            for (Eigen::Index j = 0; j < y.cols(); ++j)
                for (Eigen::Index i = 0; i < y.rows(); ++i)
                {
                    double re = nd(rng);
                    double im = nd(rng);
                    y(i, j) += cplx(re, im);
                }
        }
        return y;
    }

    Eigen::MatrixXcd input_covariance(const Eigen::MatrixXcd &precoder_block, double total_power)
    {
        if (precoder_block.cols() < 1)
            throw Error(Errc::invalid_input, "precoder has no columns");
        const double scale = total_power / static_cast<double>(precoder_block.cols());
        return scale * (precoder_block * precoder_block.adjoint()).conjugate();
    }

    BandCovariance input_covariance(const CommFrame &frame, double total_power)
    {
        BandCovariance out;
        out.reserve(frame.precoder.size());
        for (const auto &w : frame.precoder)
            out.push_back(input_covariance(w, total_power));
        return out;
    }

    double mi_single_band(const BandResponse &h, const BandCovariance &r, double noise_variance, int num_symbols)
    {
        if (!(noise_variance > 0.0))
            throw Error(Errc::invalid_input, "noise variance must be positive");
        std::vector<BandResponse> hh{h};
        std::vector<BandCovariance> rr{r};
        check_shapes(hh, rr);
        double total = 0.0;
        for (std::size_t n = 0; n < h.size(); ++n)
        {
            check_psd(r[n]);
            Eigen::MatrixXcd a = gram(hh, rr, n) / noise_variance;
            a.diagonal().array() += 1.0;
            total += log2det_hpd(a);
        }
        return num_symbols * total;
    }

    MiReport mi_ca(const std::vector<BandResponse> &h, const std::vector<BandCovariance> &r,
                   double noise_variance, int num_symbols)
    {
        if (!(noise_variance > 0.0))
            throw Error(Errc::invalid_input, "noise variance must be positive");
        check_shapes(h, r);
        MiReport rep;
        for (std::size_t b = 0; b < h.size(); ++b)
            rep.per_band_mi_bits.push_back(mi_single_band(h[b], r[b], noise_variance, num_symbols));

        double total = 0.0;
        for (std::size_t n = 0; n < h[0].size(); ++n)
        {
            Eigen::MatrixXcd a = gram(h, r, n) / noise_variance;
            a.diagonal().array() += 1.0;
            total += log2det_hpd(a);
        }
        const Eigen::Index nu = h[0][0].cols();
        rep.mi_bits = num_symbols * total;
        rep.num_ue_antennas = static_cast<int>(nu);
        rep.snr_db = -10.0 * std::log10(noise_variance);
        rep.mi_bits_per_dim = rep.mi_bits / (static_cast<double>(num_symbols) * h[0].size() * nu);
        return rep;
    }

    std::vector<double> gram_eigenvalues(const std::vector<BandResponse> &h, const std::vector<BandCovariance> &r)
    {
        check_shapes(h, r);
        std::vector<double> ev;
        ev.reserve(h[0].size() * h[0][0].cols());
        for (std::size_t n = 0; n < h[0].size(); ++n)
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram(h, r, n), Eigen::EigenvaluesOnly);
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
                ev.push_back(std::max(0.0, es.eigenvalues()(i)));
        }
        return ev;
    }

    double mi_from_eigenvalues(const std::vector<double> &eigenvalues, double noise_variance, int num_symbols)
    {
        if (!(noise_variance > 0.0))
            throw Error(Errc::invalid_input, "noise variance must be positive");
        double s = 0.0;
        for (double l : eigenvalues)
            s += std::log2(1.0 + l / noise_variance);
        return num_symbols * s;
    }
}
