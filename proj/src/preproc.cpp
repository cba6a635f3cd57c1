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

#include "caisac/preproc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace caisac
{
    Eigen::MatrixXcd ChannelEstimateCube::matrix(int n, int m) const
    {
        Eigen::Map<const Eigen::VectorXcd> y(echo.fibre(n, m), num_rx());
        Eigen::Map<const Eigen::VectorXcd> d(data.fibre(n, m), num_tx());
        return scale(n, m) * y * d.adjoint();
    }

    ChannelEstimateCube remove_tx_data(const EchoCube &echo, const SensingFrame &frame, double regularization)
    {
        if (!(regularization >= 0.0))
            throw Error(Errc::invalid_input, "regularisation must be non-negative");
        const int nsc = echo.num_subcarriers(), nsym = echo.num_symbols();
        if (frame.num_subcarriers() != nsc || frame.num_symbols() != nsym)
            throw Error(Errc::dimension_mismatch, "frame and echo grids differ");

        ChannelEstimateCube est;
        est.echo = echo.samples;
        est.data = frame.data;
        est.tx_beamformer = frame.tx_beamformer;
        est.band = echo.band;
        est.scale.resize(nsc, nsym);
        for (int m = 0; m < nsym; ++m)
            for (int n = 0; n < nsc; ++n)
            {
                Eigen::Map<const Eigen::VectorXcd> d(frame.data.fibre(n, m), frame.num_tx());
                double den = d.squaredNorm() + regularization;
                if (den == 0.0)
                    throw Error(Errc::degenerate_frame, "zero sensing data with zero regularisation");
                est.scale(n, m) = 1.0 / den;
            }
        return est;
    }

    std::vector<double> AngleGrid::values() const
    {
        if (!(step_rad > 0.0) || !(max_rad > min_rad))
            throw Error(Errc::invalid_config, "angle grid needs max > min and a positive step");
        const auto count = static_cast<std::size_t>(std::ceil((max_rad - min_rad) / step_rad - 1e-9));
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i)
            v[i] = min_rad + static_cast<double>(i) * step_rad;
        return v;
    }

    int estimate_model_order(const Eigen::VectorXd &ev)
    {
        const Eigen::Index n = ev.size();
        if (n < 2 || !(ev(0) > 0.0))
            return 0;
        const double floor = ev(0) * 1e-14;
        int best = 0;
        double best_ratio = 0.0;
        for (Eigen::Index i = 0; i + 1 < n; ++i)
        {
            double r = std::max(ev(i), floor) / std::max(ev(i + 1), floor);
            if (r > best_ratio)
            {
                best_ratio = r;
                best = static_cast<int>(i) + 1;
            }
        }
        return best;
    }

    AoAEstimate estimate_aoa(const ChannelEstimateCube &est, double d_over_lambda, const AngleGrid &grid,
                             std::optional<int> model_order, int snapshot_stride)
    {
        const int nr = est.num_rx();
        const int nsc = est.num_subcarriers(), nsym = est.num_symbols();
        if (snapshot_stride < 1)
            throw Error(Errc::invalid_config, "snapshot stride must be positive");
        if (model_order && (*model_order < 0 || *model_order >= nr))
            throw Error(Errc::invalid_input, "model order must be below the number of receive antennas");

        // R = mean over REs of H H^H = |d|^2 scale^2 y y^H
        std::vector<int> res;
        for (int i = 0; i < nsc * nsym; i += snapshot_stride)
            res.push_back(i);
        Eigen::MatrixXcd snaps(nr, static_cast<Eigen::Index>(res.size()));
        for (std::size_t c = 0; c < res.size(); ++c)
        {
            const int n = res[c] % nsc, m = res[c] / nsc;
            Eigen::Map<const Eigen::VectorXcd> y(est.echo.fibre(n, m), nr);
            Eigen::Map<const Eigen::VectorXcd> d(est.data.fibre(n, m), est.num_tx());
            snaps.col(static_cast<Eigen::Index>(c)) = (est.scale(n, m) * d.norm()) * y;
        }
        Eigen::MatrixXcd r = snaps * snaps.adjoint() / static_cast<double>(res.size());

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
        // Eigen sorts ascending; flip to descending.
        Eigen::VectorXd ev = es.eigenvalues().reverse();
        Eigen::MatrixXcd vecs = es.eigenvectors().rowwise().reverse();

        AoAEstimate out;
        out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
        out.model_order = model_order ? *model_order : std::min(estimate_model_order(ev), nr - 1);
        out.grid_rad = grid.values();
        if (out.model_order == 0)
            return out;

        const Eigen::MatrixXcd un = vecs.rightCols(nr - out.model_order);
        out.spectrum.resize(out.grid_rad.size());
        for (std::size_t g = 0; g < out.grid_rad.size(); ++g)
        {
            Eigen::VectorXcd a = steering(out.grid_rad[g], nr, d_over_lambda);
            double den = (un.adjoint() * a).squaredNorm();
            out.spectrum[g] = 1.0 / std::max(den, 1e-300);
        }

        std::vector<std::size_t> peaks;
        const auto &s = out.spectrum;
        for (std::size_t g = 1; g + 1 < s.size(); ++g)
            if (s[g] > s[g - 1] && s[g] >= s[g + 1])
                peaks.push_back(g);
        std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
        const std::size_t k = std::min<std::size_t>(peaks.size(), static_cast<std::size_t>(out.model_order));
        for (std::size_t i = 0; i < k; ++i)
            out.angles_rad.push_back(out.grid_rad[peaks[i]]);
        std::sort(out.angles_rad.begin(), out.angles_rad.end());

        if (static_cast<int>(k) < out.model_order)
        {
            out.partial = true;
            throw InsufficientPeaksError(out, "found " + std::to_string(k) + " spectrum peaks for model order " +
                                                  std::to_string(out.model_order));
        }
        return out;
    }

    TargetDelayDopplerGrid spatial_filter(const ChannelEstimateCube &est, double angle_rad, double d_over_lambda,
                                          int target)
    {
        const int nr = est.num_rx(), nt = est.num_tx();
        const int nsc = est.num_subcarriers(), nsym = est.num_symbols();
        const Eigen::VectorXcd a_rx = steering(angle_rad, nr, d_over_lambda);
        // d^H W^H conj(a_Tx) = conj(b^T d) with b = W^T a_Tx
        const Eigen::VectorXcd b = est.tx_beamformer.transpose() * steering(angle_rad, nt, d_over_lambda);
        const double norm = 1.0 / (static_cast<double>(nr) * nt);

        TargetDelayDopplerGrid out;
        out.target = target;
        out.samples.resize(nsc, nsym);
        for (int m = 0; m < nsym; ++m)
            for (int n = 0; n < nsc; ++n)
            {
                const cplx *y = est.echo.fibre(n, m);
                const cplx *d = est.data.fibre(n, m);
                cplx ay = 0.0, bd = 0.0;
                for (int p = 0; p < nr; ++p)
                    ay += std::conj(a_rx(p)) * y[p];
                for (int k = 0; k < nt; ++k)
                    bd += b(k) * d[k];
                out.samples(n, m) = est.scale(n, m) * norm * ay * std::conj(bd);
            }
        return out;
    }

    Eigen::VectorXd triangular_weights(int length)
    {
        if (length < 1)
            throw Error(Errc::invalid_input, "weight length must be positive");
        const double total = 0.5 * static_cast<double>(length) * (length + 1);
        Eigen::VectorXd w(length);
        for (int k = 0; k < length; ++k)
            w(k) = static_cast<double>(length - k) / total;
        return w;
    }

    Eigen::VectorXcd ccc_delay_feature(const TargetDelayDopplerGrid &grid)
    {
        const Eigen::MatrixXcd &d = grid.samples;
        const Eigen::Index nsc = d.rows(), nsym = d.cols();
        if (nsc < 2)
            throw Error(Errc::invalid_input, "delay feature needs at least two subcarriers");
        const Eigen::MatrixXcd g = d * d.adjoint(); // g(i, j) = row_i row_j^H
        const Eigen::VectorXd w = triangular_weights(static_cast<int>(nsc));
        Eigen::VectorXcd out(nsc);
        for (Eigen::Index n = 0; n < nsc; ++n)
        {
            cplx acc = 0.0;
            for (Eigen::Index a = 0; a + n < nsc; ++a)
                acc += g(a + n, a);
            out(n) = acc / (static_cast<double>(nsym) * static_cast<double>(nsc - n)) * w(n);
        }
        return out;
    }

    Eigen::VectorXcd ccc_doppler_feature(const TargetDelayDopplerGrid &grid)
    {
        const Eigen::MatrixXcd &d = grid.samples;
        const Eigen::Index nsc = d.rows(), nsym = d.cols();
        if (nsym < 2)
            throw Error(Errc::invalid_input, "Doppler feature needs at least two symbols");
        const Eigen::MatrixXcd c = d.adjoint() * d; // c(i, j) = col_i^H col_j
        const Eigen::VectorXd w = triangular_weights(static_cast<int>(nsym));
        Eigen::VectorXcd out(nsym);
        for (Eigen::Index m = 0; m < nsym; ++m)
        {
            cplx acc = 0.0;
            for (Eigen::Index a = 0; a + m < nsym; ++a)
                acc += c(a, a + m);
            out(m) = acc / (static_cast<double>(nsc) * static_cast<double>(nsym - m)) * w(m);
        }
        return out;
    }

    FeatureVectorPair extract_features(const TargetDelayDopplerGrid &grid, int band)
    {
        FeatureVectorPair f;
        f.delay_vec = ccc_delay_feature(grid);
        f.doppler_vec = ccc_doppler_feature(grid);
        f.band = band;
        f.target = grid.target;
        return f;
    }
}
