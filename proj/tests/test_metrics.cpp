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

#include <catch_amalgamated.hpp>

#include "caisac/metrics.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace caisac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using caisac_test::throws_code;

namespace
{
    CarrierComponentConfig small(int n, int m) { return {3.5e9, 30e3, n, m, 0.25 * n, 1}; }

    ArrayConfig ula(int nr, const CarrierComponentConfig &c, double d_over_lambda = 0.5)
    {
        return {1, nr, d_over_lambda * c.wavelength()};
    }

    double rel(double a, double b)
    {
        const double s = std::max(std::abs(a), std::abs(b));
        return s == 0.0 ? 0.0 : std::abs(a - b) / s;
    }

    // Literal index sums, written out independently of the library.
    ThetaSums literal_sums(const CarrierComponentConfig &c, const ArrayConfig &a)
    {
        const double u = a.element_spacing_m / c.wavelength();
        const double df = c.subcarrier_spacing_hz;
        const double ft = c.carrier_freq_hz * (1.0 + c.cp_length_samples / c.num_subcarriers) / df;
        ThetaSums t;
        for (int p = 0; p < a.num_rx; ++p)
            t.p += (p * u) * (p * u);
        for (int n = 0; n < c.num_subcarriers; ++n)
            t.n += (n * df) * (n * df);
        for (int m = 0; m < c.num_symbols; ++m)
            t.m += (m * ft) * (m * ft);
        for (int p = 0; p < a.num_rx; ++p)
            for (int n = 0; n < c.num_subcarriers; ++n)
                t.pn += p * n * u * df;
        for (int p = 0; p < a.num_rx; ++p)
            for (int m = 0; m < c.num_symbols; ++m)
                t.pm += p * m * u * ft;
        for (int m = 0; m < c.num_symbols; ++m)
            for (int n = 0; n < c.num_subcarriers; ++n)
                t.mn += m * n * df * ft;
        return t;
    }
}

// ================================================================================================
// Fisher information
// ================================================================================================

TEST_CASE("Metrics - angle information 84 pi^2 at N_R = 4, N = 3, M = 2")
{
    CarrierComponentConfig c = small(3, 2);
    FisherInfo3 f = fim_band(c, ula(4, c), 1.0);
    // 4 pi^2 M N sum (p/2)^2 = 4 pi^2 * 6 * (0 + 1 + 4 + 9)/4
    CHECK_THAT(f.matrix(0, 0), WithinRel(84.0 * kPi * kPi, 1e-12));
    CHECK_THAT(f.matrix(0, 0), WithinAbs(829.05, 0.01));
}

TEST_CASE("Metrics - single antenna carries no angle information")
{
    CarrierComponentConfig c = small(5, 4);
    FisherInfo3 f = fim_band(c, ula(1, c), 3.0);
    CHECK(f.matrix(0, 0) == 0.0);
    CHECK(f.matrix(0, 1) == 0.0);
    CHECK(f.matrix(0, 2) == 0.0);
    CHECK(throws_code(Errc::degenerate_geometry, [&] { crlb_band(f, c, ula(1, c)); }));
}

TEST_CASE("Metrics - single symbol carries no Doppler information")
{
    CarrierComponentConfig c = small(5, 1);
    FisherInfo3 f = fim_band(c, ula(4, c), 3.0);
    CHECK(f.matrix(2, 2) == 0.0);
    CHECK(f.matrix(0, 2) == 0.0);
    CHECK(f.matrix(1, 2) == 0.0);
}

TEST_CASE("Metrics - closed form matches the brute-force FIM over {1..6}^3")
{
    for (double snr : {0.1, 1.0, 10.0})
        for (int nr = 1; nr <= 6; ++nr)
            for (int n = 1; n <= 6; ++n)
                for (int m = 1; m <= 6; ++m)
                {
                    CarrierComponentConfig c = small(n, m);
                    ArrayConfig a = ula(nr, c, 0.75);
                    Eigen::Matrix3d x = fim_band(c, a, snr).matrix, y = fim_numeric_oracle(c, a, snr).matrix;
                    const double scale = x.cwiseAbs().maxCoeff();
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j)
                        {
                            // Entries that vanish by construction come out as round-off in the oracle.
                            if (x(i, j) == 0.0)
                                CHECK(std::abs(y(i, j)) <= 1e-12 * scale);
                            else
                                CHECK(rel(x(i, j), y(i, j)) <= 1e-9);
                        }
                }
}

TEST_CASE("Metrics - oracle vanishes at zero SNR and is linear in SNR")
{
    CarrierComponentConfig c = small(4, 3);
    ArrayConfig a = ula(3, c);
    CHECK(fim_numeric_oracle(c, a, 0.0).matrix.isZero(0.0));
    Eigen::Matrix3d f1 = fim_numeric_oracle(c, a, 1.0).matrix, f7 = fim_numeric_oracle(c, a, 7.0).matrix;
    CHECK((f7 - 7.0 * f1).cwiseAbs().maxCoeff() <= 1e-12 * f7.cwiseAbs().maxCoeff());
}

TEST_CASE("Metrics - FIM is symmetric PSD with negative delay couplings")
{
    CarrierComponentConfig c = small(6, 5);
    Eigen::Matrix3d f = fim_band(c, ula(4, c), 2.0).matrix;
    CHECK(f.isApprox(f.transpose()));
    CHECK(f(0, 1) < 0.0);
    CHECK(f(1, 2) < 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(f);
    CHECK(es.eigenvalues().minCoeff() >= -1e-9 * es.eigenvalues().maxCoeff());
}

TEST_CASE("Metrics - closed-form index sums equal the literal sums up to 8")
{
    for (int nr = 1; nr <= 8; ++nr)
        for (int n = 1; n <= 8; ++n)
            for (int m = 1; m <= 8; ++m)
            {
                CarrierComponentConfig c = small(n, m);
                ArrayConfig a = ula(nr, c, 0.75);
                ThetaSums x = theta_sums(c, a), y = literal_sums(c, a);
                CHECK(rel(x.p, y.p) <= 1e-12);
                CHECK(rel(x.n, y.n) <= 1e-12);
                CHECK(rel(x.m, y.m) <= 1e-12);
                CHECK(rel(x.pn, y.pn) <= 1e-12);
                CHECK(rel(x.pm, y.pm) <= 1e-12);
                CHECK(rel(x.mn, y.mn) <= 1e-12);
            }
}

// ================================================================================================
// CRLB
// ================================================================================================

TEST_CASE("Metrics - closed-form bounds match the inverse diagonal")
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> dim(2, 40);
    std::uniform_real_distribution<double> snr(0.01, 100.0);
    for (int i = 0; i < 100; ++i)
    {
        CarrierComponentConfig c = small(dim(rng), dim(rng));
        ArrayConfig a = ula(dim(rng), c, 0.5);
        BandCrlb b = crlb_band(fim_band(c, a, snr(rng)), c, a);
        CHECK(rel(b.sin_theta, b.inverse_diagonal(0)) <= 1e-9);
        CHECK(rel(b.delay_s2, b.inverse_diagonal(1)) <= 1e-9);
        CHECK(rel(b.gamma, b.inverse_diagonal(2)) <= 1e-9);
        CHECK(b.max_rel_discrepancy <= 1e-9);
    }
}

TEST_CASE("Metrics - doubling SNR halves every bound")
{
    CarrierComponentConfig c = caisac_test::desk_low();
    ArrayConfig a{8, 8, 0.0643};
    BandCrlb b1 = crlb_band(fim_band(c, a, 0.3), c, a), b2 = crlb_band(fim_band(c, a, 0.6), c, a);
    CHECK_THAT(b2.sin_theta, WithinRel(b1.sin_theta / 2.0, 1e-12));
    CHECK_THAT(b2.delay_s2, WithinRel(b1.delay_s2 / 2.0, 1e-12));
    CHECK_THAT(b2.gamma, WithinRel(b1.gamma / 2.0, 1e-12));
}

TEST_CASE("Metrics - high band range bound is below the low band at equal SNR")
{
    CarrierComponentConfig lo = caisac_test::full_low(), hi = caisac_test::full_high();
    ArrayConfig a{128, 128, 0.5 * hi.wavelength()};
    for (double snr_db = -20.0; snr_db <= -5.0; snr_db += 1.0)
    {
        const double s = std::pow(10.0, snr_db / 10.0);
        CrlbReport rl = crlb_from_fim(fim_band(lo, a, s).matrix, 0.5, BandTag::low);
        CrlbReport rh = crlb_from_fim(fim_band(hi, a, s).matrix, 0.5, BandTag::high);
        CHECK(rh.crlb_range_m2 < rl.crlb_range_m2);
    }
}

TEST_CASE("Metrics - silent high band leaves the low-band bounds")
{
    CarrierComponentConfig c = caisac_test::desk_low();
    ArrayConfig a{8, 8, 0.0643};
    FisherInfo3 f = fim_band(c, a, 0.5), z;
    CrlbReport ca = crlb_ca(f, z, 0.4), lo = crlb_from_fim(f.matrix, 0.4, BandTag::low);
    CHECK_THAT(ca.crlb_range_m2, WithinRel(lo.crlb_range_m2, 1e-12));
    CHECK_THAT(ca.crlb_velocity_mps2, WithinRel(lo.crlb_velocity_mps2, 1e-12));
    CHECK_THAT(ca.crlb_angle_rad2, WithinRel(lo.crlb_angle_rad2, 1e-12));
}

TEST_CASE("Metrics - aggregated bounds are below both bands over 20 SNR points")
{
    CarrierComponentConfig lo = caisac_test::full_low(), hi = caisac_test::full_high();
    lo.cp_length_samples = align_cp(lo, hi);
    ArrayConfig a{128, 128, 0.5 * hi.wavelength()};
    for (int i = 0; i < 20; ++i)
    {
        const double s = std::pow(10.0, (-20.0 + i) / 10.0);
        FisherInfo3 fl = fim_band(lo, a, s), fh = fim_band(hi, a, s);
        CrlbReport ca = crlb_ca(fl, fh, 0.5);
        CrlbReport rl = crlb_from_fim(fl.matrix, 0.5, BandTag::low), rh = crlb_from_fim(fh.matrix, 0.5, BandTag::high);
        CHECK(ca.crlb_range_m2 <= std::min(rl.crlb_range_m2, rh.crlb_range_m2));
        CHECK(ca.crlb_velocity_mps2 <= std::min(rl.crlb_velocity_mps2, rh.crlb_velocity_mps2));
        CHECK(ca.crlb_angle_rad2 <= std::min(rl.crlb_angle_rad2, rh.crlb_angle_rad2));
    }
}

TEST_CASE("Metrics - angle bound diverges toward endfire")
{
    CarrierComponentConfig c = caisac_test::desk_low();
    ArrayConfig a{8, 8, 0.0643};
    FisherInfo3 f = fim_band(c, a, 1.0);
    double b0 = crlb_ca(f, f, 0.0).crlb_angle_rad2;
    CHECK(crlb_ca(f, f, kPi / 2 - 1e-9).crlb_angle_rad2 > 1e8 * b0);
    CHECK(crlb_ca(f, f, kPi / 2 - 1e-3).crlb_angle_rad2 > crlb_ca(f, f, kPi / 2 - 1e-2).crlb_angle_rad2);
}

// ================================================================================================
// ARMSE and theory
// ================================================================================================

TEST_CASE("Metrics - perfect estimates have zero ARMSE")
{
    std::vector<TargetTruth> t{{117.0, 13.0, 0.5, 1.0}, {150.0, 20.0, 0.7, 1.0}};
    EstimateSet e{{117.0, 150.0}, {13.0, 20.0}, {0.5, 0.7}, MethodTag::symbol_level};
    ArmseReport r = armse({e, e, e}, t);
    CHECK(r.armse_range_m == 0.0);
    CHECK(r.armse_velocity_mps == 0.0);
    CHECK(r.num_trials == 3);
}

TEST_CASE("Metrics - one metre off in a single trial gives one metre")
{
    std::vector<TargetTruth> t{{117.0, 13.0, 0.5, 1.0}};
    EstimateSet e{{118.0}, {13.0}, {0.5}, MethodTag::symbol_level};
    CHECK_THAT(armse({e}, t).armse_range_m, WithinAbs(1.0, 1e-12));
}

TEST_CASE("Metrics - constant offset gives its magnitude")
{
    std::vector<TargetTruth> t{{117.0, 13.0, 0.5, 1.0}, {150.0, 20.0, 0.7, 1.0}, {170.0, 25.0, 0.9, 1.0}};
    std::vector<EstimateSet> trials;
    for (int k = 0; k < 7; ++k)
        trials.push_back({{117.0 - 0.4, 150.0 - 0.4, 170.0 - 0.4}, {13.0 + 2.5, 20.0 + 2.5, 25.0 + 2.5}, {}, MethodTag::data_level});
    ArmseReport r = armse(trials, t, -10.0);
    CHECK_THAT(r.armse_range_m, WithinAbs(0.4, 1e-12));
    CHECK_THAT(r.armse_velocity_mps, WithinAbs(2.5, 1e-12));
    CHECK(r.snr_db == -10.0);
}

TEST_CASE("Metrics - ARMSE is a per-target RMSE averaged over targets")
{
    std::vector<TargetTruth> t{{100.0, 0.0, 0.5, 1.0}, {200.0, 0.0, 0.7, 1.0}};
    // Target 0 errors {3, 4}: RMSE sqrt(12.5); target 1 errors {0, 0}.
    std::vector<EstimateSet> trials{{{103.0, 200.0}, {0.0, 0.0}, {}, MethodTag::low_band},
                                    {{96.0, 200.0}, {0.0, 0.0}, {}, MethodTag::low_band}};
    CHECK_THAT(armse(trials, t).armse_range_m, WithinRel(std::sqrt(12.5) / 2.0, 1e-14));
}

TEST_CASE("Metrics - ARMSE errors")
{
    std::vector<TargetTruth> t{{100.0, 0.0, 0.5, 1.0}};
    CHECK(throws_code(Errc::empty_trials, [&] { armse({}, t); }));
    EstimateSet two{{1.0, 2.0}, {0.0, 0.0}, {}, MethodTag::low_band};
    CHECK(throws_code(Errc::pairing_error, [&] { armse({two}, t); }));
}

TEST_CASE("Metrics - theoretical range RMSE at 15.36 MHz and unit SNR")
{
    TheoreticalRmse r = theoretical_rmse(512 * 30e3, 1.0, 14, 3.5e9, 43.9e-6);
    CHECK_THAT(r.range_m, WithinRel(kSpeedOfLight / (2.0 * 15.36e6 * std::sqrt(2.0)), 1e-14));
    CHECK_THAT(r.range_m, WithinAbs(6.90, 0.005));
}

TEST_CASE("Metrics - theoretical RMSE scaling")
{
    TheoreticalRmse a = theoretical_rmse(10e6, 2.0, 14, 3.5e9, 43.9e-6);
    TheoreticalRmse b = theoretical_rmse(10e6, 8.0, 14, 3.5e9, 43.9e-6);
    TheoreticalRmse c = theoretical_rmse(20e6, 2.0, 14, 3.5e9, 43.9e-6);
    CHECK_THAT(b.range_m, WithinRel(a.range_m / 2.0, 1e-14));
    CHECK_THAT(b.velocity_mps, WithinRel(a.velocity_mps / 2.0, 1e-14));
    CHECK_THAT(c.range_m, WithinRel(a.range_m / 2.0, 1e-14));
    CHECK(c.velocity_mps == a.velocity_mps);
    CHECK(throws_code(Errc::invalid_input, [] { theoretical_rmse(0.0, 1.0, 1, 1.0, 1.0); }));
}
