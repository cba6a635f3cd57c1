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
#include "caisac/rng.hpp"
#include "caisac/waveform.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace caisac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using caisac_test::throws_code;

// ================================================================================================
// Timing
// ================================================================================================

TEST_CASE("Waveform - timing of the low band at N = 512")
{
    SymbolTiming t = derive_timing(caisac_test::full_low());
    CHECK_THAT(t.elementary_s, WithinRel(33.3333333e-6, 1e-6));
    CHECK_THAT(t.total_s, WithinAbs(43.9e-6, 0.01e-6));
}

TEST_CASE("Waveform - timing of the high band at N = 512")
{
    SymbolTiming t = derive_timing(caisac_test::full_high());
    CHECK_THAT(t.elementary_s, WithinRel(4.1666667e-6, 1e-6));
    CHECK_THAT(t.total_s, WithinAbs(5.49e-6, 0.01e-6));
}

TEST_CASE("Waveform - zero CP gives T = 1/df exactly")
{
    CarrierComponentConfig c = caisac_test::full_low();
    c.cp_length_samples = 0.0;
    SymbolTiming t = derive_timing(c);
    CHECK(t.total_s == t.elementary_s);
    CHECK(t.cp_s == 0.0);
}

TEST_CASE("Waveform - invalid numerology is rejected")
{
    CarrierComponentConfig c = caisac_test::full_low();
    c.subcarrier_spacing_hz = 0.0;
    CHECK(throws_code(Errc::invalid_config, [&] { derive_timing(c); }));
    c = caisac_test::full_low();
    c.num_subcarriers = 0;
    CHECK(throws_code(Errc::invalid_config, [&] { derive_timing(c); }));
}

// ================================================================================================
// Band ratio and CP alignment
// ================================================================================================

TEST_CASE("Waveform - band ratio of the 3.5/28 GHz pair")
{
    BandPairRatio r = band_ratio(caisac_test::full_low(), caisac_test::full_high());
    CHECK(r.q == 8);
    CHECK(r.rho == 0.0);
}

TEST_CASE("Waveform - band ratio with half-integer carrier offset")
{
    CarrierComponentConfig lo = caisac_test::full_low(), hi = caisac_test::full_high();
    hi.carrier_freq_hz = 8.5 * lo.carrier_freq_hz;
    BandPairRatio r = band_ratio(lo, hi);
    CHECK(r.q == 8);
    CHECK_THAT(r.rho, WithinAbs(0.5, 1e-12));
}

TEST_CASE("Waveform - non-integer spacing ratio is unsupported")
{
    CarrierComponentConfig lo = caisac_test::full_low(), hi = caisac_test::full_high();
    hi.subcarrier_spacing_hz = 8.25 * lo.subcarrier_spacing_hz;
    CHECK(throws_code(Errc::unsupported_numerology, [&] { band_ratio(lo, hi); }));
}

TEST_CASE("Waveform - carrier offset of one or more is inconsistent")
{
    CarrierComponentConfig lo = caisac_test::full_low(), hi = caisac_test::full_high();
    hi.carrier_freq_hz = 9.0 * lo.carrier_freq_hz;
    CHECK(throws_code(Errc::inconsistent_config, [&] { band_ratio(lo, hi); }));
}

TEST_CASE("Waveform - band ratio is invariant to common carrier scaling")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> off(0.0, 0.95), scale(0.2, 5.0);
    for (int i = 0; i < 50; ++i)
    {
        CarrierComponentConfig lo = caisac_test::full_low(), hi = caisac_test::full_high();
        hi.carrier_freq_hz = (8.0 + off(rng)) * lo.carrier_freq_hz;
        BandPairRatio a = band_ratio(lo, hi);
        double s = scale(rng);
        lo.carrier_freq_hz *= s;
        hi.carrier_freq_hz *= s;
        BandPairRatio b = band_ratio(lo, hi);
        CHECK(a.q == b.q);
        CHECK_THAT(a.rho, WithinAbs(b.rho, 1e-12));
    }
}

TEST_CASE("Waveform - align_cp with rho = 0 and equal N copies the high CP")
{
    double ns1 = align_cp(caisac_test::full_low(), caisac_test::full_high());
    CHECK_THAT(ns1, WithinRel(162.304, 1e-14));
}

TEST_CASE("Waveform - aligned reference bands share f_C T = 153,650")
{
    CarrierComponentConfig lo = caisac_test::full_low(), hi = caisac_test::full_high();
    lo.cp_length_samples = align_cp(lo, hi);
    // Independent evaluation of f_C (1/df)(1 + N_s/N).
    double p1 = 3.5e9 / 30e3 * (1.0 + lo.cp_length_samples / 512.0);
    double p2 = 28e9 / 240e3 * (1.0 + 162.304 / 512.0);
    CHECK_THAT(p1, WithinRel(p2, 1e-12));
    CHECK_THAT(lo.fc_t_product(), WithinRel(hi.fc_t_product(), 1e-12));
    CHECK_THAT(p2, WithinAbs(153650.0, 1.0));
}

TEST_CASE("Waveform - align_cp example with rho = 0.5, Q = 8, N = 64")
{
    CarrierComponentConfig lo{1e9, 15e3, 64, 14, 0.0, 1};
    CarrierComponentConfig hi{8.5e9, 120e3, 64, 14, 8.0, 2};
    double ns1 = align_cp(lo, hi);
    CHECK_THAT(ns1, WithinAbs(12.5, 1e-12));
    lo.cp_length_samples = ns1;
    // f_C^b (1 + N_s^b/N^b)/df^b evaluated by hand on both bands.
    double p1 = 1e9 * (1.0 + 12.5 / 64.0) / 15e3;
    double p2 = 8.5e9 * (1.0 + 8.0 / 64.0) / 120e3;
    CHECK_THAT(p1, WithinRel(p2, 1e-12));
    CHECK_THAT(lo.fc_t_product(), WithinRel(hi.fc_t_product(), 1e-12));
}

TEST_CASE("Waveform - align_cp holds f_C T equality for random numerologies")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> qd(2, 16), nd(16, 1024);
    std::uniform_real_distribution<double> rho(0.0, 0.999), fc(0.4e9, 7e9), ns(0.0, 400.0);
    for (int i = 0; i < 200; ++i)
    {
        int q = qd(rng);
        CarrierComponentConfig lo{fc(rng), 15e3, nd(rng), 14, 0.0, 1};
        CarrierComponentConfig hi{(q + rho(rng)) * lo.carrier_freq_hz, q * 15e3, nd(rng), 14, ns(rng), 2};
        lo.cp_length_samples = align_cp(lo, hi);
        double a = lo.fc_t_product(), b = hi.fc_t_product();
        CHECK(std::abs(a - b) <= 1e-12 * a);
    }
}

TEST_CASE("Waveform - align_cp rejects a CP shorter than the scene delay")
{
    CarrierComponentConfig lo = caisac_test::full_low(), hi = caisac_test::full_high();
    // High-band CP is 162.304/512 * 4.1667 us = 1.32 us.
    CHECK_NOTHROW(align_cp(lo, hi, 1.0e-6));
    CHECK(throws_code(Errc::cp_too_short, [&] { align_cp(lo, hi, 1.5e-6); }));
}

// ================================================================================================
// Frames
// ================================================================================================

TEST_CASE("Waveform - single-user single-antenna frame is the symbols up to phase")
{
    CarrierComponentConfig c{3.5e9, 30e3, 16, 4, 0.0, 1};
    CommFrame f = generate_comm_frame(c, 1, 1, 3);
    for (int n = 0; n < 16; ++n)
    {
        REQUIRE(f.precoder[n].rows() == 1);
        CHECK_THAT(std::abs(f.precoder[n](0, 0)), WithinAbs(1.0, 1e-12));
        for (int m = 0; m < 4; ++m)
            CHECK(std::abs(f.precoded(n, m) - f.precoder[n](0, 0) * f.symbols(n, m)) < 1e-15);
    }
}

TEST_CASE("Waveform - comm frame is deterministic in the seed")
{
    CarrierComponentConfig c{3.5e9, 30e3, 32, 7, 0.0, 1};
    CommFrame a = generate_comm_frame(c, 4, 3, 99), b = generate_comm_frame(c, 4, 3, 99);
    CHECK(a.symbols == b.symbols);
    CHECK(a.precoded == b.precoded);
    CommFrame d = generate_comm_frame(c, 4, 3, 100);
    CHECK_FALSE(a.symbols == d.symbols);
}

TEST_CASE("Waveform - more users than antennas is an overload")
{
    CarrierComponentConfig c{3.5e9, 30e3, 8, 2, 0.0, 1};
    CHECK(throws_code(Errc::overloaded_spatial_layers, [&] { generate_comm_frame(c, 2, 3, 1); }));
}

TEST_CASE("Waveform - precoder blocks have orthonormal columns")
{
    CarrierComponentConfig c{3.5e9, 30e3, 64, 2, 0.0, 1};
    CommFrame f = generate_comm_frame(c, 6, 4, 5);
    for (const auto &w : f.precoder)
        CHECK((w.adjoint() * w - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("Waveform - comm frame power per user and RE is one")
{
    CarrierComponentConfig c{3.5e9, 30e3, 16, 4, 0.0, 1};
    double acc = 0.0;
    const int frames = 1000, users = 2;
    for (int i = 0; i < frames; ++i)
        acc += generate_comm_frame(c, 4, users, 1000 + i).precoded.squaredNorm();
    double p = acc / frames / (16.0 * 4.0 * users);
    CHECK_THAT(p, WithinAbs(1.0, 0.05));
}

TEST_CASE("Waveform - sensing frame is constant modulus")
{
    CarrierComponentConfig c{3.5e9, 30e3, 32, 6, 0.0, 1};
    ArrayConfig a{4, 4, 0.02};
    SensingFrame f = generate_sensing_frame(c, a, std::nullopt, 17);
    double dev = 0.0;
    for (std::size_t i = 0; i < f.data.size(); ++i)
        dev = std::max(dev, std::abs(std::abs(f.data.data()[i]) - 1.0));
    CHECK(dev < 1e-15);
    CHECK(f.tx_beamformer.isApprox(Eigen::MatrixXcd::Identity(4, 4)));
}

TEST_CASE("Waveform - steered beamformer first column is conj(a_Tx)/2 at N_T = 4")
{
    CarrierComponentConfig c{3.5e9, 30e3, 8, 2, 0.0, 1};
    ArrayConfig a{4, 4, 0.5 * c.wavelength()};
    SensingFrame f = generate_sensing_frame(c, a, deg2rad(30.0), 17);
    // a_Tx(30 deg) at d/lambda = 1/2: phases pi p sin30 = p pi/2.
    for (int p = 0; p < 4; ++p)
    {
        cplx want = std::polar(0.5, -kPi / 2 * p);
        CHECK(std::abs(f.tx_beamformer(p, 0) - want) < 1e-12);
    }
    CHECK((f.tx_beamformer.adjoint() * f.tx_beamformer - Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-12);
}

// ================================================================================================
// Time domain
// ================================================================================================

TEST_CASE("Waveform - IDFT of an all-ones symbol is an impulse")
{
    CarrierComponentConfig c{3.5e9, 30e3, 4, 1, 0.0, 1};
    Eigen::VectorXcd t = to_time_domain(Eigen::MatrixXcd::Ones(4, 1), c);
    REQUIRE(t.size() == 4);
    CHECK(std::abs(t(0) - 1.0) < 1e-15);
    for (int k = 1; k < 4; ++k)
        CHECK(std::abs(t(k)) < 1e-15);
}

TEST_CASE("Waveform - IDFT of subcarrier 1 is a quarter-rate tone")
{
    CarrierComponentConfig c{3.5e9, 30e3, 4, 1, 0.0, 1};
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(4, 1);
    f(1, 0) = 1.0;
    Eigen::VectorXcd t = to_time_domain(f, c);
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(t(k) - 0.25 * std::polar(1.0, kTwoPi * k / 4.0)) < 1e-15);
}

TEST_CASE("Waveform - CP samples repeat the symbol tail")
{
    CarrierComponentConfig c{3.5e9, 30e3, 16, 3, 5.4, 1};
    Rng rng(4);
    Eigen::MatrixXcd f(16, 3);
    for (int i = 0; i < f.size(); ++i)
        f.data()[i] = complex_normal(rng);
    Eigen::VectorXcd t = to_time_domain(f, c);
    const int ncp = 5, len = 21;
    REQUIRE(t.size() == 3 * len);
    for (int m = 0; m < 3; ++m)
        for (int k = 0; k < ncp; ++k)
            CHECK(t(m * len + k) == t(m * len + 16 + k));
}

TEST_CASE("Waveform - time-domain roundtrip recovers the frame")
{
    CarrierComponentConfig c{3.5e9, 30e3, 64, 5, 12.5, 1};
    Rng rng(8);
    Eigen::MatrixXcd f(64, 5);
    for (int i = 0; i < f.size(); ++i)
        f.data()[i] = complex_normal(rng);
    Eigen::MatrixXcd back = from_time_domain(to_time_domain(f, c), c);
    CHECK((back - f).norm() <= 1e-10 * f.norm());
}
