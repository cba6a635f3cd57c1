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

#include "caisac/metrics.hpp"

#include <cmath>
#include <limits>

namespace caisac
{
    namespace
    {
        double sum_k(double n) { return n * (n - 1.0) / 2.0; }
        double sum_k2(double n) { return (n - 1.0) * n * (2.0 * n - 1.0) / 6.0; }

        void check_snr(double snr)
        {
            if (!(snr >= 0.0) || !std::isfinite(snr))
                throw Error(Errc::invalid_input, "SNR must be non-negative and finite");
        }

        const char *param_name(int i)
        {
            static const char *names[] = {"sin(angle)", "delay", "Doppler scale"};
            return names[i];
        }

        Eigen::Matrix3d checked_inverse(const Eigen::Matrix3d &f)
        {
            for (int i = 0; i < 3; ++i)
                if (!(f(i, i) > 0.0))
                    throw Error(Errc::degenerate_geometry, std::string("no information on ") + param_name(i));
            // Entries span many decades, so invert the unit-diagonal correlation form.
            const Eigen::Vector3d s = f.diagonal().cwiseSqrt().cwiseInverse();
            const Eigen::Matrix3d g = s.asDiagonal() * f * s.asDiagonal();
            Eigen::FullPivLU<Eigen::Matrix3d> lu(g);
            lu.setThreshold(1e-12);
            if (!lu.isInvertible())
                throw Error(Errc::degenerate_geometry, "Fisher information matrix is singular");
            return s.asDiagonal() * lu.inverse() * s.asDiagonal();
        }
    }

    ThetaSums theta_sums(const CarrierComponentConfig &cfg, const ArrayConfig &array)
    {
        cfg.validate();
        array.validate();
        const double u = array.spacing_over_lambda(cfg);
        const double df = cfg.subcarrier_spacing_hz;
        const double ft = cfg.fc_t_product();
        const double nr = array.num_rx, n = cfg.num_subcarriers, m = cfg.num_symbols;
        ThetaSums t;
        t.p = u * u * sum_k2(nr);
        t.n = df * df * sum_k2(n);
        t.m = ft * ft * sum_k2(m);
        t.pn = sum_k(nr) * sum_k(n) * u * df;
        t.pm = sum_k(nr) * sum_k(m) * u * ft;
        t.mn = sum_k(m) * sum_k(n) * df * ft;
        return t;
    }

    FisherInfo3 fim_band(const CarrierComponentConfig &cfg, const ArrayConfig &array, double snr_linear)
    {
        check_snr(snr_linear);
        const ThetaSums t = theta_sums(cfg, array);
        const double nr = array.num_rx, n = cfg.num_subcarriers, m = cfg.num_symbols;
        const double k = snr_linear * 4.0 * kPi * kPi;
        FisherInfo3 f;
        f.snr_linear = snr_linear;
        auto &a = f.matrix;
        a(0, 0) = k * m * n * t.p;
        a(1, 1) = k * m * nr * t.n;
        a(2, 2) = k * n * nr * t.m;
        a(0, 1) = a(1, 0) = -k * m * t.pn;
        a(0, 2) = a(2, 0) = k * n * t.pm;
        a(1, 2) = a(2, 1) = -k * nr * t.mn;
        return f;
    }

    FisherInfo3 fim_numeric_oracle(const CarrierComponentConfig &cfg, const ArrayConfig &array, double snr_linear)
    {
        check_snr(snr_linear);
        cfg.validate();
        array.validate();
        const double u = array.spacing_over_lambda(cfg);
        const double df = cfg.subcarrier_spacing_hz;
        const double ft = cfg.fc_t_product();
        // Nominal parameter point; the information does not depend on it.
        const double s0 = 0.3, tau0 = 1e-7, g0 = 1e-7;
        FisherInfo3 f;
        f.snr_linear = snr_linear;
        for (int p = 0; p < array.num_rx; ++p)
            for (int m = 0; m < cfg.num_symbols; ++m)
                for (int n = 0; n < cfg.num_subcarriers; ++n)
                {
                    const double phase = kTwoPi * (p * u * s0 - n * df * tau0 + m * ft * g0);
                    const cplx s = std::polar(1.0, phase);
                    const cplx j(0.0, 1.0);
                    const cplx ds[3] = {j * kTwoPi * (p * u) * s, j * (-kTwoPi * n * df) * s, j * kTwoPi * (m * ft) * s};
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b)
                            f.matrix(a, b) += snr_linear * std::real(std::conj(ds[a]) * ds[b]);
                }
        return f;
    }

    BandCrlb crlb_band(const FisherInfo3 &f, const CarrierComponentConfig &cfg, const ArrayConfig &array)
    {
        const ThetaSums t = theta_sums(cfg, array);
        const double nr = array.num_rx, n = cfg.num_subcarriers, m = cfg.num_symbols;
        const double zero_checks[3] = {t.p, t.n, t.m};
        for (int i = 0; i < 3; ++i)
            if (!(zero_checks[i] > 0.0))
                throw Error(Errc::degenerate_geometry, std::string("no information on ") + param_name(i));
        if (!(f.snr_linear > 0.0))
            throw Error(Errc::degenerate_geometry, "zero SNR carries no information");

        const double den = m * n * nr * t.p * t.n * t.m + 2.0 * t.pn * t.pm * t.mn - n * t.pm * t.pm * t.n -
                           m * t.pn * t.pn * t.m - nr * t.mn * t.mn * t.p;
        if (!(den > 0.0))
            throw Error(Errc::degenerate_geometry, "Fisher information matrix is singular");
        const double gamma = 1.0 / (f.snr_linear * 4.0 * kPi * kPi) / den;

        BandCrlb out;
        out.sin_theta = gamma * nr * (m * n * t.n * t.m - t.mn * t.mn) / (m * n);
        out.delay_s2 = gamma * n * (m * nr * t.p * t.m - t.pm * t.pm) / (m * nr);
        out.gamma = gamma * m * (n * nr * t.p * t.n - t.pn * t.pn) / (n * nr);

        out.inverse_diagonal = checked_inverse(f.matrix).diagonal();
        const double closed[3] = {out.sin_theta, out.delay_s2, out.gamma};
        for (int i = 0; i < 3; ++i)
            out.max_rel_discrepancy = std::max(out.max_rel_discrepancy,
                                               std::abs(closed[i] - out.inverse_diagonal(i)) / std::abs(out.inverse_diagonal(i)));
        return out;
    }

    std::string_view band_tag_name(BandTag tag)
    {
        switch (tag)
        {
        case BandTag::low: return "low";
        case BandTag::high: return "high";
        case BandTag::ca: return "CA";
        }
        return "unknown";
    }

    CrlbReport crlb_from_fim(const Eigen::Matrix3d &f, double theta_rad, BandTag tag)
    {
        const Eigen::Matrix3d inv = checked_inverse(f);
        const double half_c2 = 0.25 * kSpeedOfLight * kSpeedOfLight;
        const double c = std::cos(theta_rad);
        CrlbReport r;
        r.band_tag = tag;
        r.crlb_angle_rad2 = c > 0.0 ? inv(0, 0) / c : std::numeric_limits<double>::infinity();
        r.crlb_range_m2 = half_c2 * inv(1, 1);
        r.crlb_velocity_mps2 = half_c2 * inv(2, 2);
        return r;
    }

    CrlbReport crlb_ca(const FisherInfo3 &f_low, const FisherInfo3 &f_high, double theta_rad)
    {
        return crlb_from_fim(f_low.matrix + f_high.matrix, theta_rad, BandTag::ca);
    }

    ArmseReport armse(const std::vector<EstimateSet> &trials, const std::vector<TargetTruth> &truth, double snr_db)
    {
        if (trials.empty())
            throw Error(Errc::empty_trials, "ARMSE needs at least one trial");
        ArmseReport rep;
        rep.num_trials = static_cast<int>(trials.size());
        rep.snr_db = snr_db;
        if (truth.empty())
            return rep;
        for (const auto &t : trials)
            if (t.ranges_m.size() != truth.size() || t.velocities_mps.size() != truth.size())
                throw Error(Errc::pairing_error, "estimate set is not aligned with the truth targets");

        const double nt = static_cast<double>(trials.size());
        for (std::size_t i = 0; i < truth.size(); ++i)
        {
            double er = 0.0, ev = 0.0, ea = 0.0;
            for (const auto &t : trials)
            {
                er += std::pow(t.ranges_m[i] - truth[i].range_m, 2);
                ev += std::pow(t.velocities_mps[i] - truth[i].velocity_mps, 2);
                if (t.angles_rad.size() == truth.size())
                    ea += std::pow(t.angles_rad[i] - truth[i].angle_rad, 2);
            }
            rep.armse_range_m += std::sqrt(er / nt);
            rep.armse_velocity_mps += std::sqrt(ev / nt);
            rep.armse_angle_rad += std::sqrt(ea / nt);
        }
        const double ni = static_cast<double>(truth.size());
        rep.armse_range_m /= ni;
        rep.armse_velocity_mps /= ni;
        rep.armse_angle_rad /= ni;
        return rep;
    }

    TheoreticalRmse theoretical_rmse(double bandwidth_hz, double snr_linear, int num_symbols, double fc_hz,
                                     double symbol_duration_s)
    {
        if (!(bandwidth_hz > 0.0) || !(snr_linear > 0.0) || num_symbols < 1 || !(fc_hz > 0.0) ||
            !(symbol_duration_s > 0.0))
            throw Error(Errc::invalid_input, "theoretical RMSE inputs must be positive");
        const double root = std::sqrt(2.0 * snr_linear);
        TheoreticalRmse t;
        t.range_m = kSpeedOfLight / (2.0 * bandwidth_hz * root);
        t.velocity_mps = kSpeedOfLight / (2.0 * num_symbols * fc_hz * symbol_duration_s * root);
        return t;
    }
}
