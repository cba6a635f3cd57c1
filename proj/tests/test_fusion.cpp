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

#include "caisac/channel.hpp"
#include "caisac/fusion.hpp"
#include "caisac/rng.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace caisac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using caisac_test::phase_diff;
using caisac_test::throws_code;

namespace
{
    // exp(-j 2 pi k df 2R/c), k = 0..len-1
    Eigen::VectorXcd delay_ramp(int len, double df, double range_m, cplx gain = 1.0)
    {
        Eigen::VectorXcd v(len);
        for (int k = 0; k < len; ++k)
            v(k) = gain * std::polar(1.0, -kTwoPi * k * df * 2.0 * range_m / kSpeedOfLight);
        return v;
    }

    // exp(+j 2 pi m fcT 2v/c), m = 0..len-1
    Eigen::VectorXcd doppler_ramp(int len, double fct, double v_mps, cplx gain = 1.0)
    {
        Eigen::VectorXcd v(len);
        for (int m = 0; m < len; ++m)
            v(m) = gain * std::polar(1.0, kTwoPi * m * fct * 2.0 * v_mps / kSpeedOfLight);
        return v;
    }

    // Contiguous grid cells around the peak with |profile|^2 at or above half the peak power.
    int half_power_width(const std::vector<double> &prof, int peak)
    {
        const double thr = prof[peak] / std::sqrt(2.0);
        int lo = peak, hi = peak;
        while (lo > 0 && prof[lo - 1] >= thr)
            --lo;
        while (hi + 1 < static_cast<int>(prof.size()) && prof[hi + 1] >= thr)
            ++hi;
        return hi - lo + 1;
    }

    struct AlignedPair
    {
        CarrierComponentConfig low, high;
    };

    AlignedPair aligned_desk()
    {
        AlignedPair p{caisac_test::desk_low(), caisac_test::desk_high()};
        p.low.cp_length_samples = align_cp(p.low, p.high);
        return p;
    }
}

// ================================================================================================
// MRC weights
// ================================================================================================

TEST_CASE("Fusion - equal variances give equal weights")
{
    FusionWeights w = mrc_weights(2.0, 2.0);
    CHECK(w.w_low == 0.5);
    CHECK(w.w_high == 0.5);
}

TEST_CASE("Fusion - variances 1 and 3 give 0.75 and 0.25")
{
    FusionWeights w = mrc_weights(1.0, 3.0);
    CHECK_THAT(w.w_low, WithinAbs(0.75, 1e-15));
    CHECK_THAT(w.w_high, WithinAbs(0.25, 1e-15));
}

TEST_CASE("Fusion - MRC weights sum to exactly one")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> e(-12.0, 12.0);
    for (int i = 0; i < 10000; ++i)
    {
        FusionWeights w = mrc_weights(std::pow(10.0, e(rng)), std::pow(10.0, e(rng)));
        CHECK(w.w_low + w.w_high == 1.0);
    }
    CHECK(throws_code(Errc::invalid_input, [] { mrc_weights(0.0, 1.0); }));
    CHECK(throws_code(Errc::invalid_input, [] { mrc_weights(1.0, -1.0); }));
}

// ================================================================================================
// Delay fusion
// ================================================================================================

TEST_CASE("Fusion - Q = 1 with equal lengths is the mean of the weighted vectors")
{
    Rng rng(1);
    Eigen::VectorXcd a(6), b(6);
    for (int k = 0; k < 6; ++k)
    {
        a(k) = complex_normal(rng);
        b(k) = complex_normal(rng);
    }
    FusionWeights w{0.3, 0.7};
    FusedDelayVector f = fuse_delay(a, b, 1, w);
    CHECK(f.fusion_case == 2);
    CHECK_FALSE(f.has_gaps());
    CHECK((f.samples - (0.3 * a + 0.7 * b) / 2.0).norm() < 1e-15);
}

TEST_CASE("Fusion - Q = 2 with four entries per band follows the stretched layout")
{
    Eigen::VectorXcd lo(4), hi(4);
    lo << 1.0, 2.0, 3.0, 4.0;
    hi << 10.0, 20.0, 30.0, 40.0;
    FusedDelayVector f = fuse_delay(lo, hi, 2, FusionWeights{0.5, 0.5});
    REQUIRE(f.fusion_case == 1);
    REQUIRE(f.samples.size() == 8);
    std::vector<bool> mask{true, true, true, true, true, false, true, false};
    CHECK(f.support_mask == mask);
    // Collisions at 0 and 2 are halved; 4 and 6 carry the high band alone.
    CHECK(f.samples(0) == cplx(0.5 * (0.5 + 5.0)));
    CHECK(f.samples(1) == cplx(1.0));
    CHECK(f.samples(2) == cplx(0.5 * (1.5 + 10.0)));
    CHECK(f.samples(3) == cplx(2.0));
    CHECK(f.samples(4) == cplx(15.0));
    CHECK(f.samples(5) == cplx(0.0));
    CHECK(f.samples(6) == cplx(20.0));
}

TEST_CASE("Fusion - case 1 support is the low range plus the stretched high lattice")
{
    for (auto [n1, n2, q] : {std::tuple{16, 16, 8}, std::tuple{40, 12, 4}, std::tuple{5, 9, 3}})
    {
        FusedDelayVector f = fuse_delay(Eigen::VectorXcd::Ones(n1), Eigen::VectorXcd::Ones(n2), q, FusionWeights{});
        REQUIRE(f.fusion_case == 1);
        REQUIRE(static_cast<int>(f.support_mask.size()) == q * n2);
        for (int k = 0; k < q * n2; ++k)
            CHECK(f.support_mask[k] == (k < n1 || k % q == 0));
    }
}

TEST_CASE("Fusion - case 2 keeps the low-band length without gaps")
{
    FusedDelayVector f = fuse_delay(Eigen::VectorXcd::Ones(50), Eigen::VectorXcd::Ones(6), 8, FusionWeights{});
    CHECK(f.fusion_case == 2);
    CHECK(f.samples.size() == 50);
    CHECK_FALSE(f.has_gaps());
}

TEST_CASE("Fusion - filled entries follow one low-band delay ramp")
{
    const double df1 = 30e3, r = 117.0;
    const int q = 8;
    // CCC features carry real positive gains |kappa|^2 w on each band.
    Eigen::VectorXcd g1 = delay_ramp(64, df1, r, 0.3), g2 = delay_ramp(64, q * df1, r, 2.0);
    FusedDelayVector f = fuse_delay(g1, g2, q, mrc_weights(1.0, 2.0));
    for (int k = 0; k < f.samples.size(); ++k)
        if (f.support_mask[k])
            CHECK(std::abs(phase_diff(std::arg(f.samples(k)), -kTwoPi * k * df1 * 2.0 * r / kSpeedOfLight)) < 1e-9);
}

// ================================================================================================
// Recovery
// ================================================================================================

TEST_CASE("Fusion - recovery is the identity without gaps")
{
    FusedDelayVector f;
    f.samples = delay_ramp(32, 30e3, 80.0);
    f.support_mask.assign(32, true);
    RecoveryResult r = recover_missing(f, 1, SearchGrid{0.0, 200.0, 400}, 30e3);
    CHECK(r.samples == f.samples);
    CHECK_FALSE(r.warning);
}

TEST_CASE("Fusion - OMP restores a one-target ramp with half the entries missing")
{
    const double df = 30e3;
    SearchGrid g{0.0, 200.0, 400};
    FusedDelayVector f;
    f.samples = delay_ramp(64, df, 150.0, cplx(0.7, -0.2));
    Eigen::VectorXcd truth = f.samples;
    f.support_mask.assign(64, true);
    for (int k = 1; k < 64; k += 2)
    {
        f.support_mask[k] = false;
        f.samples(k) = 0.0;
    }
    RecoveryResult r = recover_missing(f, 1, g, df);
    CHECK_FALSE(r.warning);
    CHECK(r.atoms_used == 1);
    CHECK((r.samples - truth).cwiseAbs().maxCoeff() < 1e-6);
    for (int k = 0; k < 64; k += 2)
        CHECK(r.samples(k) == truth(k));
}

TEST_CASE("Fusion - pure noise raises the recovery warning")
{
    Rng rng(9);
    FusedDelayVector f;
    f.samples.resize(64);
    f.support_mask.assign(64, true);
    for (int k = 0; k < 64; ++k)
    {
        f.samples(k) = complex_normal(rng);
        if (k % 3 == 1)
        {
            f.support_mask[k] = false;
            f.samples(k) = 0.0;
        }
    }
    CHECK(recover_missing(f, 1, SearchGrid{0.0, 200.0, 400}, 30e3).warning);
}

// ================================================================================================
// Grid search
// ================================================================================================

TEST_CASE("Fusion - range search of 150 m on a 1000-point grid")
{
    SearchResult r = range_search(delay_ramp(512, 30e3, 150.0), SearchGrid{100.0, 200.0, 1000}, 30e3);
    CHECK(r.estimate >= 149.95);
    CHECK(r.estimate <= 150.05);
}

TEST_CASE("Fusion - constant vector has its range peak at zero")
{
    SearchResult r = range_search(Eigen::VectorXcd::Ones(64), SearchGrid{0.0, 300.0, 600}, 30e3);
    CHECK(r.estimate == 0.0);
}

TEST_CASE("Fusion - three ranges each within one cell")
{
    SearchGrid g{0.0, 197.99, 4096};
    for (double rt : {117.0, 150.0, 170.0})
    {
        SearchResult r = range_search(delay_ramp(1024, 30e3, rt), g, 30e3);
        CHECK(std::abs(r.estimate - rt) <= g.step());
    }
}

TEST_CASE("Fusion - search estimates ignore a positive rescale of the feature")
{
    Rng rng(4);
    Eigen::VectorXcd p(48), f(20);
    for (int k = 0; k < 48; ++k)
        p(k) = complex_normal(rng);
    for (int k = 0; k < 20; ++k)
        f(k) = complex_normal(rng);
    SearchGrid rg{0.0, 200.0, 800}, vg{-50.0, 50.0, 300};
    for (double s : {1e-6, 0.37, 42.0})
    {
        CHECK(range_search(s * p, rg, 30e3).index == range_search(p, rg, 30e3).index);
        CHECK(velocity_search(s * f, vg, 153650.0).index == velocity_search(f, vg, 153650.0).index);
    }
}

TEST_CASE("Fusion - velocity search of 20 m/s on an 800-point grid")
{
    SearchResult r = velocity_search(doppler_ramp(28, 153650.0, 20.0), SearchGrid{0.0, 40.0, 800}, 153650.0);
    CHECK(std::abs(r.estimate - 20.0) <= 0.05);
}

TEST_CASE("Fusion - constant Doppler vector has its peak at zero velocity")
{
    SearchResult r = velocity_search(Eigen::VectorXcd::Ones(14), SearchGrid{-40.0, 40.0, 800}, 153650.0);
    CHECK_THAT(r.estimate, WithinAbs(0.0, 1e-12));
}

TEST_CASE("Fusion - three velocities each within one cell")
{
    SearchGrid g{-128.5, 128.5, 224};
    for (double vt : {13.0, 20.0, 25.0})
    {
        SearchResult r = velocity_search(doppler_ramp(28, 153650.0, vt), g, 153650.0);
        CHECK(std::abs(r.estimate - vt) <= g.step());
    }
}

TEST_CASE("Fusion - CA delay profile is at least as sharp as the low band alone")
{
    // Q = 8, N_1 = N_2 = 512: case 1 with recovery.
    const double df1 = 30e3, rt = 150.0;
    const int q = 8, n = 512;
    SearchGrid g{140.0, 160.0, 4000};
    Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(n, n, 1) / (0.5 * n * (n + 1.0));
    Eigen::VectorXcd g1 = w.cast<cplx>().cwiseProduct(delay_ramp(n, df1, rt));
    Eigen::VectorXcd g2 = w.cast<cplx>().cwiseProduct(delay_ramp(n, q * df1, rt));
    FusedDelayVector f = fuse_delay(g1, g2, q, mrc_weights(1.0, 1.0));
    SearchGrid dict{0.0, 197.99, 4 * q * n};
    RecoveryResult rec = recover_missing(f, 1, dict, df1);
    SearchResult low = range_search(g1, g, df1), ca = range_search(rec.samples, g, df1);
    const int w_low = half_power_width(low.profile, low.index), w_ca = half_power_width(ca.profile, ca.index);
    CHECK(w_ca <= w_low);
    CHECK(std::abs(ca.estimate - rt) <= 2.0 * g.step() + dict.step());
}

// ================================================================================================
// Doppler fusion
// ================================================================================================

TEST_CASE("Fusion - equal symbol counts average elementwise")
{
    AlignedPair b = aligned_desk();
    b.high.num_symbols = 14;
    Eigen::VectorXcd e1 = doppler_ramp(14, 1.0, 3.0), e2 = doppler_ramp(14, 1.0, 5.0);
    FusionWeights w{0.4, 0.6};
    Eigen::VectorXcd f = fuse_doppler(e1, e2, b.low, b.high, w);
    CHECK((f - (0.4 * e1 + 0.6 * e2) / 2.0).norm() < 1e-15);
}

TEST_CASE("Fusion - 14 and 28 symbols average the overlap and keep the high tail")
{
    AlignedPair b = aligned_desk();
    Rng rng(3);
    Eigen::VectorXcd e1(14), e2(28);
    for (int k = 0; k < 14; ++k)
        e1(k) = complex_normal(rng);
    for (int k = 0; k < 28; ++k)
        e2(k) = complex_normal(rng);
    FusionWeights w = mrc_weights(1.0, 3.0);
    Eigen::VectorXcd f = fuse_doppler(e1, e2, b.low, b.high, w);
    REQUIRE(f.size() == 28);
    for (int k = 0; k < 14; ++k)
        CHECK(std::abs(f(k) - (w.w_low * e1(k) + w.w_high * e2(k)) / 2.0) < 1e-15);
    for (int k = 14; k < 28; ++k)
        CHECK(f(k) == w.w_high * e2(k));
}

TEST_CASE("Fusion - identical weighted inputs are a fixed point of the overlap average")
{
    AlignedPair b = aligned_desk();
    FusionWeights w = mrc_weights(1.0, 3.0);
    Eigen::VectorXcd e1 = doppler_ramp(14, b.low.fc_t_product(), 20.0);
    Eigen::VectorXcd e2 = doppler_ramp(28, b.low.fc_t_product(), 20.0) * (w.w_low / w.w_high);
    Eigen::VectorXcd f = fuse_doppler(e1, e2, b.low, b.high, w);
    CHECK((f.head(14) - w.w_low * e1).norm() < 1e-14);
}

TEST_CASE("Fusion - common target Doppler ramps add coherently after CP alignment")
{
    AlignedPair b = aligned_desk();
    const double fct = b.low.fc_t_product(), v = 20.0;
    // Per-band ramps built from each band's own f_C T.
    Eigen::VectorXcd e1 = doppler_ramp(14, fct, v, 0.2), e2 = doppler_ramp(28, b.high.fc_t_product(), v, 3.0);
    Eigen::VectorXcd f = fuse_doppler(e1, e2, b.low, b.high, mrc_weights(2.0, 1.0));
    for (int m = 0; m < 14; ++m)
        CHECK(std::abs(phase_diff(std::arg(f(m)), kTwoPi * m * 2.0 * v / kSpeedOfLight * fct)) < 1e-9);
}

TEST_CASE("Fusion - misaligned bands are rejected")
{
    CarrierComponentConfig lo = caisac_test::desk_low(), hi = caisac_test::desk_high();
    lo.cp_length_samples = 0.0;
    CHECK(throws_code(Errc::bands_not_aligned,
                      [&] { fuse_doppler(Eigen::VectorXcd::Ones(14), Eigen::VectorXcd::Ones(28), lo, hi, FusionWeights{}); }));
}

// ================================================================================================
// Data-level fusion
// ================================================================================================

TEST_CASE("Fusion - equal per-band estimates pass through")
{
    AlignedPair b = aligned_desk();
    EstimateSet a{{120.0}, {10.0}, {0.5}, MethodTag::low_band};
    EstimateSet out = data_level_fuse(a, a, 0.3, 7.0, b.low, b.high);
    CHECK_THAT(out.ranges_m[0], WithinAbs(120.0, 1e-12));
    CHECK_THAT(out.velocities_mps[0], WithinAbs(10.0, 1e-12));
}

TEST_CASE("Fusion - noiseless low band is trusted fully")
{
    AlignedPair b = aligned_desk();
    EstimateSet lo{{120.0}, {10.0}, {0.5}, MethodTag::low_band}, hi{{121.0}, {11.0}, {0.5}, MethodTag::high_band};
    EstimateSet out = data_level_fuse(lo, hi, 0.0, 1.0, b.low, b.high);
    CHECK(out.ranges_m[0] == 120.0);
    CHECK(out.velocities_mps[0] == 10.0);
}

TEST_CASE("Fusion - range weight 224/225 at equal variances, Q = 8, M = 28")
{
    AlignedPair b = aligned_desk();
    EstimateSet lo{{100.0}, {0.0}, {0.5}, MethodTag::low_band}, hi{{325.0}, {0.0}, {0.5}, MethodTag::high_band};
    EstimateSet out = data_level_fuse(lo, hi, 1.0, 1.0, b.low, b.high);
    CHECK_THAT(out.ranges_m[0], WithinAbs(100.0 + 224.0, 1e-10));
}

TEST_CASE("Fusion - data-level output lies between the per-band estimates")
{
    AlignedPair b = aligned_desk();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> r(0.0, 200.0), v(-30.0, 30.0), s(1e-3, 1e3);
    for (int i = 0; i < 500; ++i)
    {
        EstimateSet lo{{r(rng)}, {v(rng)}, {0.5}, MethodTag::low_band}, hi{{r(rng)}, {v(rng)}, {0.5}, MethodTag::high_band};
        for (ShapeBand sh : {ShapeBand::high, ShapeBand::low})
        {
            EstimateSet out = data_level_fuse(lo, hi, s(rng), s(rng), b.low, b.high, sh);
            CHECK(out.ranges_m[0] >= std::min(lo.ranges_m[0], hi.ranges_m[0]) - 1e-9);
            CHECK(out.ranges_m[0] <= std::max(lo.ranges_m[0], hi.ranges_m[0]) + 1e-9);
            CHECK(out.velocities_mps[0] >= std::min(lo.velocities_mps[0], hi.velocities_mps[0]) - 1e-9);
            CHECK(out.velocities_mps[0] <= std::max(lo.velocities_mps[0], hi.velocities_mps[0]) + 1e-9);
        }
    }
}

TEST_CASE("Fusion - unequal estimate lists are a pairing error")
{
    AlignedPair b = aligned_desk();
    EstimateSet lo{{1.0, 2.0}, {0.0, 0.0}, {}, MethodTag::low_band}, hi{{1.0}, {0.0}, {}, MethodTag::high_band};
    CHECK(throws_code(Errc::pairing_error, [&] { data_level_fuse(lo, hi, 1.0, 1.0, b.low, b.high); }));
}

// ================================================================================================
// Pipeline
// ================================================================================================

namespace
{
    struct Scene
    {
        AlignedPair bands = aligned_desk();
        ArrayConfig array{8, 8, 0.75 * kSpeedOfLight / 3.5e9};
        PipelineConfig pc;

        Scene()
        {
            pc.range_grid = default_range_grid(bands.low, bands.high);
            pc.velocity_grid = default_velocity_grid(bands.low, bands.high);
        }

        PipelineResult run(const std::vector<TargetTruth> &t, double sigma2, std::uint64_t seed)
        {
            SensingFrame f1 = generate_sensing_frame(bands.low, array, std::nullopt, seed);
            SensingFrame f2 = generate_sensing_frame(bands.high, array, std::nullopt, seed + 1);
            EchoCube e1 = simulate_echo(bands.low, array, t, f1, sigma2, seed + 2, seed + 3);
            EchoCube e2 = simulate_echo(bands.high, array, t, f2, sigma2, seed + 4, seed + 5);
            return symbol_level_pipeline(e1, e2, f1, f2, bands.low, bands.high, array, pc);
        }
    };
}

TEST_CASE("Fusion - noiseless single target is found within one grid cell")
{
    Scene s;
    TargetTruth t{150.0, 20.0, deg2rad(40.0), 1.0};
    s.pc.model_order = 1;
    PipelineResult r = s.run({t}, 0.0, 21);
    REQUIRE(r.symbol_level.size() == 1);
    CHECK(std::abs(r.symbol_level.ranges_m[0] - 150.0) <= s.pc.range_grid.step());
    CHECK(std::abs(r.symbol_level.velocities_mps[0] - 20.0) <= s.pc.velocity_grid.step());
    CHECK(std::abs(rad2deg(r.symbol_level.angles_rad[0]) - 40.0) <= 0.5);
    CHECK(r.data_level.size() == 1);
    CHECK(r.low_band.size() == 1);
    CHECK(r.high_band.size() == 1);
}

TEST_CASE("Fusion - pipeline without targets returns empty sets")
{
    Scene s;
    PipelineResult r = s.run({}, 0.0, 3);
    CHECK(r.symbol_level.size() == 0);
    CHECK(r.data_level.size() == 0);
}

TEST_CASE("Fusion - pipeline is deterministic in its seeds")
{
    Scene s;
    s.pc.model_order = 2;
    s.pc.sigma2_low = s.pc.sigma2_high = 1e-12;
    std::vector<TargetTruth> t{{117.0, 13.0, deg2rad(20.0), 1.0}, {170.0, 25.0, deg2rad(60.0), 1.0}};
    PipelineResult a = s.run(t, 1e-12, 40), b = s.run(t, 1e-12, 40);
    CHECK(a.symbol_level.ranges_m == b.symbol_level.ranges_m);
    CHECK(a.symbol_level.velocities_mps == b.symbol_level.velocities_mps);
    CHECK(a.data_level.ranges_m == b.data_level.ranges_m);
    CHECK(a.aoa.angles_rad == b.aoa.angles_rad);
}

TEST_CASE("Fusion - stage errors carry the stage tag")
{
    Scene s;
    s.pc.sigma2_low = 0.0;
    s.pc.model_order = 1;
    try
    {
        s.run({{150.0, 20.0, deg2rad(40.0), 1.0}}, 0.0, 21);
        FAIL("expected an error");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == Errc::invalid_input);
        CHECK(std::string(e.what()).find("[mrc_weights]") != std::string::npos);
    }
}
