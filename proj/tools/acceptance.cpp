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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "caisac/csv.hpp"
#include "caisac/metrics.hpp"
#include "caisac/plot.hpp"
#include "caisac/preproc.hpp"
#include "caisac/scenario.hpp"
#include "caisac/sweep.hpp"

using namespace caisac;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point t0)
    {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    }

    std::string fmt(const char *f, auto... args)
    {
        char buf[512];
        std::snprintf(buf, sizeof buf, f, args...);
        return buf;
    }

    // Full-scale reference numerology, N = 512.
    CarrierComponentConfig full_low() { return {3.5e9, 30e3, 512, 14, 162.304, 1}; }
    CarrierComponentConfig full_high() { return {28e9, 240e3, 512, 28, 162.304, 2}; }

    std::vector<double> snr_grid() { return expand_range(-20.0, 1.0, -5.0); }

    // 1. f_C T alignment
    Outcome alignment()
    {
        const auto t0 = Clock::now();
        double worst = 0.0;
        auto check = [&](CarrierComponentConfig lo, const CarrierComponentConfig &hi) {
            lo.cp_length_samples = align_cp(lo, hi);
            const double a = lo.fc_t_product(), b = hi.fc_t_product();
            worst = std::max(worst, std::abs(a - b) / a);
        };
        check(full_low(), full_high());

        std::mt19937_64 rng(2024);
        std::uniform_int_distribution<int> qd(2, 16), nd(16, 2048), md(1, 28);
        std::uniform_real_distribution<double> rho(0.0, 0.999), fc(0.4e9, 7e9), ns(0.0, 400.0);
        int valid = 0;
        while (valid < 50)
        {
            const int q = qd(rng);
            CarrierComponentConfig lo{fc(rng), 15e3 * (1 << (rng() % 3)), nd(rng), md(rng), 0.0, 1};
            CarrierComponentConfig hi{(q + rho(rng)) * lo.carrier_freq_hz, q * lo.subcarrier_spacing_hz, nd(rng), md(rng),
                                      ns(rng), 2};
            try
            {
                check(lo, hi);
                ++valid;
            }
            catch (const Error &)
            {
                // invalid draw, not counted
            }
        }
        const double t = seconds_since(t0);
        return {worst <= 1e-12 && t < 1.0, fmt("worst relative mismatch %.3g over 51 pairs, %.3f s", worst, t)};
    }

    // 2. closed-form FIM against the brute-force sum
    Outcome fim_oracle()
    {
        const auto t0 = Clock::now();
        double worst = 0.0;
        CarrierComponentConfig c = full_low();
        for (int nr = 1; nr <= 6; ++nr)
            for (int n = 1; n <= 6; ++n)
                for (int m = 1; m <= 6; ++m)
                    for (double w : {0.1, 1.0, 10.0})
                    {
                        c.num_subcarriers = n;
                        c.num_symbols = m;
                        const ArrayConfig a{1, nr, 0.5 * c.wavelength()};
                        const Eigen::Matrix3d f = fim_band(c, a, w).matrix, o = fim_numeric_oracle(c, a, w).matrix;
                        for (int i = 0; i < 3; ++i)
                            for (int j = 0; j < 3; ++j)
                            {
                                const double scale = std::abs(o(i, j));
                                const double err = std::abs(f(i, j) - o(i, j));
                                if (scale > 0.0)
                                    worst = std::max(worst, err / scale);
                                else if (err > 0.0)
                                    worst = std::max(worst, 1.0);
                            }
                    }
        const double t = seconds_since(t0);
        return {worst <= 1e-9 && t < 10.0, fmt("worst entrywise relative error %.3g, %.3f s", worst, t)};
    }

    // 3. CRLB ordering at full scale, equal varpi on both bands
    Outcome crlb_ordering()
    {
        CarrierComponentConfig lo = full_low();
        const CarrierComponentConfig hi = full_high();
        lo.cp_length_samples = align_cp(lo, hi);
        const ArrayConfig a{128, 128, 0.5 * hi.wavelength()};
        const double theta = deg2rad(30.0);
        int bad = 0, points = 0;
        for (double snr : snr_grid())
        {
            const double w = std::pow(10.0, snr / 10.0);
            const FisherInfo3 fl = fim_band(lo, a, w), fh = fim_band(hi, a, w);
            const CrlbReport rl = crlb_from_fim(fl.matrix, theta, BandTag::low);
            const CrlbReport rh = crlb_from_fim(fh.matrix, theta, BandTag::high);
            const CrlbReport ca = crlb_ca(fl, fh, theta);
            ++points;
            if (!(ca.crlb_range_m2 <= std::min(rl.crlb_range_m2, rh.crlb_range_m2)) ||
                !(ca.crlb_velocity_mps2 <= std::min(rl.crlb_velocity_mps2, rh.crlb_velocity_mps2)) ||
                !(rh.crlb_range_m2 < rl.crlb_range_m2))
                ++bad;
        }
        return {bad == 0, fmt("%d of %d SNR points violate an ordering", bad, points)};
    }

    // 4. MI ordering
    Outcome mi_ordering(int threads)
    {
        const auto t0 = Clock::now();
        Scenario s = desk_scenario();
        s.mi.draws = 200;
        s.mi.ue_antennas = {4, 5, 6};
        s.mi.snr_grid_db = snr_grid();
        const MiSweepResult r = run_mi_sweep(s, threads);
        auto at = [&](int nu, double snr, BandTag b) {
            for (const auto &p : r.points)
                if (p.num_ue_antennas == nu && p.snr_db == snr && p.band == b)
                    return p.mi_bits;
            return std::nan("");
        };
        int bad = 0;
        for (double snr : s.mi.snr_grid_db)
        {
            for (int nu : s.mi.ue_antennas)
            {
                const double ca = at(nu, snr, BandTag::ca);
                if (!(ca >= at(nu, snr, BandTag::low)) || !(ca >= at(nu, snr, BandTag::high)))
                    ++bad;
            }
            for (BandTag b : {BandTag::low, BandTag::high, BandTag::ca})
                if (!(at(5, snr, b) >= at(4, snr, b)) || !(at(6, snr, b) >= at(5, snr, b)))
                    ++bad;
        }
        const double t = seconds_since(t0);
        return {bad == 0 && t < 120.0, fmt("%d ordering violations over %zu points, %.1f s", bad, r.points.size(), t)};
    }

    // 5. noiseless desk scene
    Outcome noiseless_scene()
    {
        const auto t0 = Clock::now();
        Scenario s = desk_scenario();
        s.noiseless = true;
        s.snr_grid_db = {0.0}; // fusion weights only
        s.trials = 1;
        const TrialRecord rec = run_trial(s, 0, 0);
        const double dr = s.effective_range_grid().step(), dv = s.effective_velocity_grid().step();
        const EstimateSet &e = rec.matched[static_cast<std::size_t>(MethodTag::symbol_level)];
        double wr = 0.0, wv = 0.0, wa = 0.0;
        bool ok = e.size() == s.targets.size();
        std::string per_target;
        for (std::size_t i = 0; ok && i < s.targets.size(); ++i)
        {
            const double er = (e.ranges_m[i] - s.targets[i].range_m) / dr;
            per_target += fmt("%s%+.2f", i ? "/" : "", er);
            wr = std::max(wr, std::abs(er));
            wv = std::max(wv, std::abs(e.velocities_mps[i] - s.targets[i].velocity_mps) / dv);
            wa = std::max(wa, rad2deg(std::abs(e.angles_rad[i] - s.targets[i].angle_rad)));
        }
        const double t = seconds_since(t0);
        ok = ok && wr <= 1.0 && wv <= 1.0 && wa <= 0.5 && t < 30.0;
        return {ok, fmt("worst errors: range %.2f cells (per target %s), velocity %.2f cells, angle %.3f deg, %.2f s", wr,
                        per_target.c_str(), wv, wa, t)};
    }

    TargetDelayDopplerGrid phase_grid(int n_sc, int n_sym, double df_tau, double fs_t, cplx gain)
    {
        TargetDelayDopplerGrid g;
        g.samples.resize(n_sc, n_sym);
        for (int n = 0; n < n_sc; ++n)
            for (int m = 0; m < n_sym; ++m)
                g.samples(n, m) = gain * std::polar(1.0, -kTwoPi * n * df_tau + kTwoPi * m * fs_t);
        return g;
    }

    // 6. CCC phase alignment across bands
    Outcome ccc_alignment()
    {
        CarrierComponentConfig lo{3.5e9, 30e3, 128, 14, 0.0, 1};
        const CarrierComponentConfig hi{28e9, 240e3, 128, 28, 40.576, 2};
        lo.cp_length_samples = align_cp(lo, hi);
        const int q = static_cast<int>(std::lround(hi.subcarrier_spacing_hz / lo.subcarrier_spacing_hz));
        const double fct = lo.fc_t_product();

        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> mag(0.01, 100.0), ph(-kPi, kPi), rd(10.0, 300.0), vd(-30.0, 30.0);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial)
        {
            const double tau = 2.0 * rd(rng) / kSpeedOfLight, gamma = 2.0 * vd(rng) / kSpeedOfLight;
            const auto g1 = phase_grid(lo.num_subcarriers, lo.num_symbols, lo.subcarrier_spacing_hz * tau, fct * gamma,
                                       std::polar(mag(rng), ph(rng)));
            const auto g2 = phase_grid(hi.num_subcarriers, hi.num_symbols, hi.subcarrier_spacing_hz * tau, fct * gamma,
                                       std::polar(mag(rng), ph(rng)));
            const Eigen::VectorXcd d1 = ccc_delay_feature(g1), d2 = ccc_delay_feature(g2);
            // g2 index k sits at low-band lag q k
            for (int k = 0; q * k < d1.size() && k < d2.size(); ++k)
                worst = std::max(worst, std::abs(std::remainder(std::arg(d1(q * k)) - std::arg(d2(k)), kTwoPi)));
            const Eigen::VectorXcd e1 = ccc_doppler_feature(g1), e2 = ccc_doppler_feature(g2);
            for (int m = 0; m < std::min(e1.size(), e2.size()); ++m)
                worst = std::max(worst, std::abs(std::remainder(std::arg(e1(m)) - std::arg(e2(m)), kTwoPi)));
        }
        return {worst <= 1e-9, fmt("worst phase disagreement %.3g rad over 100 random gain pairs", worst)};
    }

    // 7. symbol-level against data-level at -10 dB
    Outcome fusion_gain(int trials, int threads, const std::string &out_dir, std::string &armse_csv)
    {
        const auto t0 = Clock::now();
        Scenario s = desk_scenario();
        s.snr_grid_db = {-10.0};
        s.trials = trials;
        s.run_low_band = s.run_high_band = false;
        const SweepResult r = run_sweep(s, threads);
        armse_csv = r.armse_csv;
        if (!out_dir.empty())
            write_text_file((std::filesystem::path(out_dir) / "acceptance_armse.csv").string(), r.armse_csv);
        const SnrSummary &p = r.points.front();
        const ArmseReport *sym = p.find(MethodTag::symbol_level), *dat = p.find(MethodTag::data_level);
        const bool ok = sym && dat && sym->armse_range_m <= dat->armse_range_m &&
                        sym->armse_velocity_mps <= dat->armse_velocity_mps;
        return {ok, fmt("%d trials: range %.4g vs %.4g m (improvement %.1f%%), velocity %.4g vs %.4g m/s "
                        "(improvement %.1f%%), %.1f s",
                        trials, sym->armse_range_m, dat->armse_range_m, 100.0 * p.range_improvement,
                        sym->armse_velocity_mps, dat->armse_velocity_mps, 100.0 * p.velocity_improvement,
                        seconds_since(t0))};
    }

    // 8. bandwidth split structure
    Outcome bandwidth_structure()
    {
        const Scenario s = desk_scenario();
        const BandwidthSweepResult r = run_bandwidth_sweep(s);
        std::vector<double> range, vel;
        bool constraint = true;
        for (const auto &row : r.rows)
        {
            constraint = constraint && row.n1 + s.bandwidth.n2_coefficient * row.n2 == s.bandwidth.total_subcarriers;
            range.push_back(row.crlb_range_m2);
            vel.push_back(row.crlb_velocity_mps2);
        }
        const int range_changes = slope_sign_changes(range);
        // within a case segment the velocity slope keeps one sign
        bool segments_monotone = true;
        const auto seg = monotone_segments(vel);
        for (std::size_t i = 2; i < vel.size(); ++i)
            if (seg[i] == seg[i - 2] && (vel[i] - vel[i - 1]) * (vel[i - 1] - vel[i - 2]) < 0.0)
                segments_monotone = false;
        const bool ok = constraint && range_changes >= 1 && segments_monotone;
        return {ok, fmt("%zu splits, range-CRLB slope sign changes %d, velocity cases %d", r.rows.size(), range_changes,
                        seg.empty() ? 0 : seg.back())};
    }

    // 9. byte-identical reruns of every subcommand
    Outcome determinism(int trials, int threads, const std::string &first_armse)
    {
        Scenario s = desk_scenario();
        s.snr_grid_db = {-10.0};
        s.trials = trials;
        s.run_low_band = s.run_high_band = false;
        // different thread count, same bytes
        const int other = threads == 1 ? 2 : 1;
        const std::string ref = first_armse.empty() ? run_sweep(s, threads).armse_csv : first_armse;
        const bool sim = run_sweep(s, other).armse_csv == ref;

        Scenario m = desk_scenario();
        m.mi.draws = 20;
        const bool mi = run_mi_sweep(m, threads).csv == run_mi_sweep(m, other).csv;
        const Scenario d = desk_scenario();
        const bool crlb = run_crlb_sweep(d).csv == run_crlb_sweep(d).csv;
        const std::string bw1 = run_bandwidth_sweep(d).csv;
        const bool bw = bw1 == run_bandwidth_sweep(d).csv;

        PlotSpec spec;
        spec.x_column = "n2";
        spec.y_columns = {"crlb_range_m2"};
        spec.log_y = true;
        const CsvTable t = parse_csv(bw1);
        const bool plot = emit_plot(t, spec) == emit_plot(t, spec);
        return {sim && mi && crlb && bw && plot,
                fmt("simulate %s, mi %s, crlb %s, bandwidth-sweep %s, plot %s", sim ? "same" : "DIFFERS",
                    mi ? "same" : "DIFFERS", crlb ? "same" : "DIFFERS", bw ? "same" : "DIFFERS",
                    plot ? "same" : "DIFFERS")};
    }

    // 10. weight identities
    Outcome weights()
    {
        double worst = 0.0;
        for (int n = 1; n <= 4096; ++n)
            worst = std::max(worst, std::abs(triangular_weights(n).sum() - 1.0));
        std::mt19937_64 rng(10);
        std::uniform_real_distribution<double> e(-12.0, 12.0);
        int inexact = 0;
        for (int i = 0; i < 100000; ++i)
        {
            const FusionWeights w = mrc_weights(std::pow(10.0, e(rng)), std::pow(10.0, e(rng)));
            if (w.w_low + w.w_high != 1.0)
                ++inexact;
        }
        return {worst <= 1e-12 && inexact == 0,
                fmt("triangular sums worst |sum-1| %.3g for lengths 1..4096, MRC inexact sums %d of 100000", worst,
                    inexact)};
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"caisac acceptance criteria"};
    int trials = 100;
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string out_dir;
    std::vector<int> only;
    app.add_option("--trials", trials, "Monte Carlo trials for the fusion comparison")->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "directory for acceptance_armse.csv");
    app.add_option("--criterion", only, "run only these criteria (1-10)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    std::string armse_csv;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"f_C T alignment", [] { return alignment(); }},
        {"FIM closed form vs oracle", [] { return fim_oracle(); }},
        {"CRLB ordering", [] { return crlb_ordering(); }},
        {"MI ordering", [&] { return mi_ordering(threads); }},
        {"noiseless end-to-end", [] { return noiseless_scene(); }},
        {"CCC phase alignment", [] { return ccc_alignment(); }},
        {"symbol-level vs data-level", [&] { return fusion_gain(trials, threads, out_dir, armse_csv); }},
        {"bandwidth sweep structure", [] { return bandwidth_structure(); }},
        {"determinism", [&] { return determinism(trials, threads, armse_csv); }},
        {"weight identities", [] { return weights(); }},
    };

    int failed = 0, ran = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(i + 1)) == only.end())
            continue;
        ++ran;
        Outcome o;
        try
        {
            o = criteria[i].second();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("error: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%-4s %2zu  %-28s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}
