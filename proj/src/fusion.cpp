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

#include "caisac/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace caisac
{
    FusionWeights mrc_weights(double sigma2_low, double sigma2_high)
    {
        if (!(sigma2_low > 0.0) || !(sigma2_high > 0.0) || !std::isfinite(sigma2_low) || !std::isfinite(sigma2_high))
            throw Error(Errc::invalid_input, "noise variances must be positive and finite");
        const double total = sigma2_low + sigma2_high;
        FusionWeights w;
        // The larger weight lies in [0.5, 1], so 1 - larger is exact and the sum is exactly one.
        if (sigma2_high >= sigma2_low)
        {
            w.w_low = sigma2_high / total;
            w.w_high = 1.0 - w.w_low;
        }
        else
        {
            w.w_high = sigma2_low / total;
            w.w_low = 1.0 - w.w_high;
        }
        return w;
    }

    bool FusedDelayVector::has_gaps() const
    {
        return std::find(support_mask.begin(), support_mask.end(), false) != support_mask.end();
    }

    FusedDelayVector fuse_delay(const Eigen::VectorXcd &g_low, const Eigen::VectorXcd &g_high, int q,
                                const FusionWeights &w)
    {
        if (q < 1)
            throw Error(Errc::invalid_input, "Q must be a positive integer");
        const Eigen::Index n1 = g_low.size(), n2 = g_high.size();
        if (n1 < 1 || n2 < 1)
            throw Error(Errc::invalid_input, "delay vectors must be non-empty");

        FusedDelayVector out;
        if (n1 - 1 >= q * (n2 - 1))
        {
            out.fusion_case = 2;
            out.samples = w.w_low * g_low;
            out.support_mask.assign(n1, true);
            for (Eigen::Index k = 0; k < n2; ++k)
            {
                out.samples(q * k) += w.w_high * g_high(k);
                out.samples(q * k) /= 2.0;
            }
        }
        else
        {
            out.fusion_case = 1;
            const Eigen::Index len = q * n2;
            out.samples = Eigen::VectorXcd::Zero(len);
            out.support_mask.assign(len, false);
            for (Eigen::Index k = 0; k < n1; ++k)
            {
                out.samples(k) = w.w_low * g_low(k);
                out.support_mask[k] = true;
            }
            for (Eigen::Index k = 0; k < n2; ++k)
            {
                out.samples(q * k) += w.w_high * g_high(k);
                if (q * k <= n1 - 1)
                    out.samples(q * k) /= 2.0;
                out.support_mask[q * k] = true;
            }
        }
        return out;
    }

    void SearchGrid::validate() const
    {
        if (count < 2)
            throw Error(Errc::invalid_config, "search grid needs at least two points");
        if (!(max > min))
            throw Error(Errc::invalid_config, "search grid needs max > min");
    }

    std::vector<double> SearchGrid::values() const
    {
        validate();
        std::vector<double> v(count);
        for (int i = 0; i < count; ++i)
            v[i] = value(i);
        return v;
    }

    namespace
    {
        // sum_k x[k] z^k by Horner's rule
        cplx horner(const Eigen::VectorXcd &x, cplx z)
        {
            cplx acc = 0.0;
            for (Eigen::Index k = x.size() - 1; k >= 0; --k)
                acc = acc * z + x(k);
            return acc;
        }

        SearchResult ramp_search(const Eigen::VectorXcd &x, const SearchGrid &grid, double phase_per_unit)
        {
            grid.validate();
            SearchResult res;
            res.profile.resize(grid.count);
            double best = -1.0;
            for (int i = 0; i < grid.count; ++i)
            {
                double mag = std::abs(horner(x, std::polar(1.0, phase_per_unit * grid.value(i))));
                res.profile[i] = mag;
                if (mag > best)
                {
                    best = mag;
                    res.index = i;
                }
            }
            res.estimate = grid.value(res.index);
            return res;
        }

        Eigen::VectorXcd delay_atom(Eigen::Index len, double delta_f, double range)
        {
            Eigen::VectorXcd a(len);
            const double ph = -kTwoPi * delta_f * 2.0 * range / kSpeedOfLight;
            for (Eigen::Index k = 0; k < len; ++k)
                a(k) = std::polar(1.0, ph * static_cast<double>(k));
            return a;
        }
    }

    RecoveryResult recover_missing(const FusedDelayVector &p, int max_sparsity, const SearchGrid &range_grid,
                                   double delta_f_low, double tolerance)
    {
        const Eigen::Index len = p.samples.size();
        if (static_cast<Eigen::Index>(p.support_mask.size()) != len)
            throw Error(Errc::dimension_mismatch, "support mask and samples differ in length");
        RecoveryResult out;
        out.samples = p.samples;
        if (!p.has_gaps())
            return out;
        if (max_sparsity < 0)
            throw Error(Errc::invalid_input, "sparsity must be non-negative");

        std::vector<Eigen::Index> filled;
        for (Eigen::Index k = 0; k < len; ++k)
            if (p.support_mask[k])
                filled.push_back(k);
        const auto ns = static_cast<Eigen::Index>(filled.size());
        if (ns < 2 * static_cast<Eigen::Index>(max_sparsity))
            throw Error(Errc::invalid_input, "too few filled entries for the requested sparsity");

        Eigen::VectorXcd target(ns);
        for (Eigen::Index i = 0; i < ns; ++i)
            target(i) = p.samples(filled[i]);
        const double pnorm = target.norm();

        Eigen::VectorXcd resid_full = Eigen::VectorXcd::Zero(len);
        for (Eigen::Index i = 0; i < ns; ++i)
            resid_full(filled[i]) = target(i);

        std::vector<int> chosen;
        Eigen::MatrixXcd atoms(len, 0);
        Eigen::VectorXcd coef;
        double rnorm = pnorm;
        const double phase_unit = kTwoPi * delta_f_low * 2.0 / kSpeedOfLight;
        while (static_cast<int>(chosen.size()) < max_sparsity && rnorm > tolerance * pnorm)
        {
            // Correlation with every atom equals the range profile of the residual.
            SearchResult sr = ramp_search(resid_full, range_grid, phase_unit);
            if (std::find(chosen.begin(), chosen.end(), sr.index) != chosen.end())
                break;
            chosen.push_back(sr.index);
            atoms.conservativeResize(len, atoms.cols() + 1);
            atoms.col(atoms.cols() - 1) = delay_atom(len, delta_f_low, range_grid.value(sr.index));

            Eigen::MatrixXcd as(ns, atoms.cols());
            for (Eigen::Index i = 0; i < ns; ++i)
                as.row(i) = atoms.row(filled[i]);
            coef = as.colPivHouseholderQr().solve(target);
            Eigen::VectorXcd r = target - as * coef;
            rnorm = r.norm();
            resid_full.setZero();
            for (Eigen::Index i = 0; i < ns; ++i)
                resid_full(filled[i]) = r(i);
        }

        out.atoms_used = static_cast<int>(chosen.size());
        out.residual_ratio = pnorm > 0.0 ? rnorm / pnorm : 0.0;
        out.warning = rnorm > tolerance * pnorm;
        if (out.atoms_used > 0)
        {
            Eigen::VectorXcd fit = atoms * coef;
            for (Eigen::Index k = 0; k < len; ++k)
                if (!p.support_mask[k])
                    out.samples(k) = fit(k);
        }
        return out;
    }

    SearchResult range_search(const Eigen::VectorXcd &p, const SearchGrid &grid, double delta_f)
    {
        return ramp_search(p, grid, kTwoPi * delta_f * 2.0 / kSpeedOfLight);
    }

    SearchResult velocity_search(const Eigen::VectorXcd &f, const SearchGrid &grid, double fc_t_product)
    {
        return ramp_search(f, grid, -kTwoPi * fc_t_product * 2.0 / kSpeedOfLight);
    }

    Eigen::VectorXcd fuse_doppler(const Eigen::VectorXcd &e_low, const Eigen::VectorXcd &e_high,
                                  const CarrierComponentConfig &low, const CarrierComponentConfig &high,
                                  const FusionWeights &w)
    {
        const double a = low.fc_t_product(), b = high.fc_t_product();
        if (std::abs(a - b) > 1e-9 * a)
            throw Error(Errc::bands_not_aligned, "carrier-duration products differ: " + std::to_string(a) + " vs " +
                                                     std::to_string(b));
        const Eigen::Index m1 = e_low.size(), m2 = e_high.size();
        const Eigen::Index common = std::min(m1, m2);
        Eigen::VectorXcd f = m1 >= m2 ? Eigen::VectorXcd(w.w_low * e_low) : Eigen::VectorXcd(w.w_high * e_high);
        for (Eigen::Index k = 0; k < common; ++k)
            f(k) = (w.w_low * e_low(k) + w.w_high * e_high(k)) / 2.0;
        return f;
    }

    std::string_view method_name(MethodTag tag)
    {
        switch (tag)
        {
        case MethodTag::symbol_level: return "symbol-level";
        case MethodTag::data_level: return "data-level";
        case MethodTag::low_band: return "low-band";
        case MethodTag::high_band: return "high-band";
        }
        return "unknown";
    }

    namespace
    {
        EstimateSet sorted_by_range(const EstimateSet &e)
        {
            std::vector<std::size_t> idx(e.size());
            std::iota(idx.begin(), idx.end(), 0);
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return e.ranges_m[a] < e.ranges_m[b]; });
            EstimateSet out;
            out.method = e.method;
            for (std::size_t i : idx)
            {
                out.ranges_m.push_back(e.ranges_m[i]);
                out.velocities_mps.push_back(e.velocities_mps[i]);
                if (i < e.angles_rad.size())
                    out.angles_rad.push_back(e.angles_rad[i]);
            }
            return out;
        }
    }

    EstimateSet data_level_fuse(const EstimateSet &low, const EstimateSet &high, double sigma2_low,
                                double sigma2_high, const CarrierComponentConfig &cfg_low,
                                const CarrierComponentConfig &cfg_high, ShapeBand shape, PairingRule pairing)
    {
        if (low.size() != high.size() || low.velocities_mps.size() != low.size() ||
            high.velocities_mps.size() != high.size())
            throw Error(Errc::pairing_error, "per-band estimate lists differ in length");
        if (!(sigma2_low >= 0.0) || !(sigma2_high >= 0.0) || sigma2_low + sigma2_high == 0.0)
            throw Error(Errc::invalid_input, "noise variances must be non-negative and not both zero");

        const EstimateSet a = pairing == PairingRule::by_range ? sorted_by_range(low) : low;
        const EstimateSet b = pairing == PairingRule::by_range ? sorted_by_range(high) : high;
        const CarrierComponentConfig &sb = shape == ShapeBand::high ? cfg_high : cfg_low;
        const double ratio = cfg_high.subcarrier_spacing_hz / cfg_low.subcarrier_spacing_hz;
        const double kr = sigma2_low * ratio * sb.num_symbols;
        const double kv = sigma2_low * ratio * sb.num_subcarriers;
        const double wr = kr / (kr + sigma2_high);
        const double wv = kv / (kv + sigma2_high);

        EstimateSet out;
        out.method = MethodTag::data_level;
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            out.ranges_m.push_back(a.ranges_m[i] + wr * (b.ranges_m[i] - a.ranges_m[i]));
            out.velocities_mps.push_back(a.velocities_mps[i] + wv * (b.velocities_mps[i] - a.velocities_mps[i]));
        }
        out.angles_rad = a.angles_rad;
        return out;
    }

    SearchGrid default_range_grid(const CarrierComponentConfig &low, const CarrierComponentConfig &high)
    {
        const BandPairRatio br = band_ratio(low, high);
        const double ts = std::min(derive_timing(low).cp_s, derive_timing(high).cp_s);
        if (!(ts > 0.0))
            throw Error(Errc::invalid_config, "default range grid needs a positive CP duration");
        SearchGrid g;
        g.min = 0.0;
        g.max = kSpeedOfLight * ts / 2.0;
        g.count = 4 * br.q * high.num_subcarriers;
        return g;
    }

    SearchGrid default_velocity_grid(const CarrierComponentConfig &low, const CarrierComponentConfig &high)
    {
        const double v1 = kSpeedOfLight * low.subcarrier_spacing_hz / (20.0 * low.carrier_freq_hz);
        const double v2 = kSpeedOfLight * high.subcarrier_spacing_hz / (20.0 * high.carrier_freq_hz);
        SearchGrid g;
        g.max = std::min(v1, v2);
        g.min = -g.max;
        g.count = 8 * std::max(low.num_symbols, high.num_symbols);
        return g;
    }

    namespace
    {
        template <class F>
        auto staged(const char *stage, F &&f) -> decltype(f())
        {
            try
            {
                return f();
            }
            catch (const InsufficientPeaksError &)
            {
                throw;
            }
            catch (const Error &e)
            {
                throw Error(e.code(), std::string("[") + stage + "] " + e.detail());
            }
        }
    }

    PipelineResult symbol_level_pipeline(const EchoCube &echo_low, const EchoCube &echo_high,
                                         const SensingFrame &frame_low, const SensingFrame &frame_high,
                                         const CarrierComponentConfig &cfg_low,
                                         const CarrierComponentConfig &cfg_high, const ArrayConfig &array,
                                         const PipelineConfig &pc)
    {
        PipelineResult res;
        res.symbol_level.method = MethodTag::symbol_level;
        res.data_level.method = MethodTag::data_level;
        res.low_band.method = MethodTag::low_band;
        res.high_band.method = MethodTag::high_band;

        const BandPairRatio br = staged("config", [&] { return band_ratio(cfg_low, cfg_high); });
        const double reg = pc.regularization.value_or(default_regularization(array.num_tx));
        const double dl_low = array.spacing_over_lambda(cfg_low);
        const double dl_high = array.spacing_over_lambda(cfg_high);

        const ChannelEstimateCube est_low = staged("remove_tx_data", [&] { return remove_tx_data(echo_low, frame_low, reg); });
        const ChannelEstimateCube est_high = staged("remove_tx_data", [&] { return remove_tx_data(echo_high, frame_high, reg); });

        try
        {
            res.aoa = staged("estimate_aoa", [&] { return estimate_aoa(est_low, dl_low, pc.angle_grid, pc.model_order, pc.snapshot_stride); });
        }
        catch (const InsufficientPeaksError &e)
        {
            res.aoa = e.partial();
            res.aoa_partial = true;
        }

        const FusionWeights w = staged("mrc_weights", [&] { return mrc_weights(pc.sigma2_low, pc.sigma2_high); });
        const double fct_low = cfg_low.fc_t_product();
        const double fct_high = cfg_high.fc_t_product();
        const int sparsity = pc.omp_sparsity;

        for (std::size_t i = 0; i < res.aoa.angles_rad.size(); ++i)
        {
            const double theta = res.aoa.angles_rad[i];
            const int tid = static_cast<int>(i);
            const auto grid_low = spatial_filter(est_low, theta, dl_low, tid);
            const auto grid_high = spatial_filter(est_high, theta, dl_high, tid);
            const FeatureVectorPair f_low = staged("ccc", [&] { return extract_features(grid_low, cfg_low.band_index); });
            const FeatureVectorPair f_high = staged("ccc", [&] { return extract_features(grid_high, cfg_high.band_index); });

            if (pc.fuse_symbols)
            {
                // symbol-level range
                const FusedDelayVector fused = fuse_delay(f_low.delay_vec, f_high.delay_vec, br.q, w);
                const RecoveryResult rec = staged("recover_missing", [&] {
                    return recover_missing(fused, sparsity, pc.range_grid, cfg_low.subcarrier_spacing_hz, pc.omp_tolerance);
                });
                if (rec.warning)
                    ++res.recovery_warnings;
                const SearchResult r_sym = staged("range_search", [&] { return range_search(rec.samples, pc.range_grid, cfg_low.subcarrier_spacing_hz); });

                // symbol-level velocity
                const Eigen::VectorXcd fd = staged("fuse_doppler", [&] { return fuse_doppler(f_low.doppler_vec, f_high.doppler_vec, cfg_low, cfg_high, w); });
                const SearchResult v_sym = staged("velocity_search", [&] { return velocity_search(fd, pc.velocity_grid, fct_low); });

                res.symbol_level.ranges_m.push_back(r_sym.estimate);
                res.symbol_level.velocities_mps.push_back(v_sym.estimate);
                res.symbol_level.angles_rad.push_back(theta);
            }

            // per-band
            res.low_band.ranges_m.push_back(range_search(f_low.delay_vec, pc.range_grid, cfg_low.subcarrier_spacing_hz).estimate);
            res.low_band.velocities_mps.push_back(velocity_search(f_low.doppler_vec, pc.velocity_grid, fct_low).estimate);
            res.low_band.angles_rad.push_back(theta);
            res.high_band.ranges_m.push_back(range_search(f_high.delay_vec, pc.range_grid, cfg_high.subcarrier_spacing_hz).estimate);
            res.high_band.velocities_mps.push_back(velocity_search(f_high.doppler_vec, pc.velocity_grid, fct_high).estimate);
            res.high_band.angles_rad.push_back(theta);
        }

        // Both per-band lists come from the same MUSIC angles, so they are paired by index.
        res.data_level = staged("data_level_fuse", [&] {
            return data_level_fuse(res.low_band, res.high_band, pc.sigma2_low, pc.sigma2_high, cfg_low, cfg_high,
                                   pc.data_level_shape, PairingRule::by_index);
        });
        return res;
    }
}
