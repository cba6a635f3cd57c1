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

#include "caisac/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "caisac/comm_mi.hpp"
#include "caisac/csv.hpp"
#include "caisac/rng.hpp"

namespace caisac
{
    namespace
    {
        constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
        constexpr MethodTag kMethods[] = {MethodTag::symbol_level, MethodTag::data_level, MethodTag::low_band,
                                          MethodTag::high_band};

        std::string num(double v) { return format_number(v); }
        std::string num(int v) { return format_number(static_cast<long long>(v)); }
        std::string seed_text(std::uint64_t s) { return std::to_string(s); }

        bool requested(const Scenario &sc, MethodTag m)
        {
            switch (m)
            {
            case MethodTag::symbol_level: return sc.run_symbol_level;
            case MethodTag::data_level: return sc.run_data_level;
            case MethodTag::low_band: return sc.run_low_band;
            case MethodTag::high_band: return sc.run_high_band;
            }
            return false;
        }

        double db2lin(double db) { return std::pow(10.0, db / 10.0); }

        double sqrt_or_nan(double v) { return v >= 0.0 ? std::sqrt(v) : kNan; }
    }

    void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)> &job)
    {
        const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                job(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::atomic<bool> stop{false};
        std::exception_ptr first;
        std::mutex m;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;)
                {
                    if (stop.load())
                        return;
                    const std::size_t i = next.fetch_add(1);
                    if (i >= count)
                        return;
                    try
                    {
                        job(i);
                    }
                    catch (...)
                    {
                        std::lock_guard<std::mutex> lk(m);
                        if (!first)
                            first = std::current_exception();
                        stop = true;
                    }
                }
            });
        for (auto &t : pool)
            t.join();
        if (first)
            std::rethrow_exception(first);
    }

    EstimateSet match_by_angle(const EstimateSet &est, const std::vector<TargetTruth> &truth)
    {
        const std::size_t ni = truth.size(), nk = est.size();
        EstimateSet out;
        out.method = est.method;
        out.ranges_m.assign(ni, 0.0);
        out.velocities_mps.assign(ni, 0.0);
        out.angles_rad.assign(ni, 0.0);
        if (ni == 0 || nk == 0)
            return out;
        if (est.velocities_mps.size() != nk || est.angles_rad.size() != nk)
            throw Error(Errc::pairing_error, "estimate set lists have different lengths");

        auto cost = [&](std::size_t i, std::size_t k) {
            const double d = est.angles_rad[k] - truth[i].angle_rad;
            return d * d;
        };

        // Rows of the smaller side are assigned to distinct columns of the larger.
        const bool rows_are_truth = ni <= nk;
        const std::size_t nr = rows_are_truth ? ni : nk, nc = rows_are_truth ? nk : ni;
        auto c = [&](std::size_t r, std::size_t col) { return rows_are_truth ? cost(r, col) : cost(col, r); };

        std::vector<int> best(nr, -1);
        if (nc <= 8)
        {
            std::vector<int> cur(nr, -1);
            std::vector<bool> used(nc, false);
            double best_cost = std::numeric_limits<double>::infinity();
            std::function<void(std::size_t, double)> dfs = [&](std::size_t r, double acc) {
                if (acc >= best_cost)
                    return;
                if (r == nr)
                {
                    best_cost = acc;
                    best = cur;
                    return;
                }
                for (std::size_t col = 0; col < nc; ++col)
                    if (!used[col])
                    {
                        used[col] = true;
                        cur[r] = static_cast<int>(col);
                        dfs(r + 1, acc + c(r, col));
                        used[col] = false;
                    }
            };
            dfs(0, 0.0);
        }
        else
        {
            std::vector<bool> row_done(nr, false), col_used(nc, false);
            for (std::size_t step = 0; step < nr; ++step)
            {
                double bc = std::numeric_limits<double>::infinity();
                std::size_t br = 0, bcol = 0;
                for (std::size_t r = 0; r < nr; ++r)
                    if (!row_done[r])
                        for (std::size_t col = 0; col < nc; ++col)
                            if (!col_used[col] && c(r, col) < bc)
                            {
                                bc = c(r, col);
                                br = r;
                                bcol = col;
                            }
                row_done[br] = col_used[bcol] = true;
                best[br] = static_cast<int>(bcol);
            }
        }

        std::vector<int> truth_to_est(ni, -1);
        for (std::size_t r = 0; r < nr; ++r)
        {
            if (rows_are_truth)
                truth_to_est[r] = best[r];
            else
                truth_to_est[static_cast<std::size_t>(best[r])] = static_cast<int>(r);
        }
        for (std::size_t i = 0; i < ni; ++i)
        {
            if (truth_to_est[i] < 0)
            {
                std::size_t kb = 0;
                for (std::size_t k = 1; k < nk; ++k)
                    if (cost(i, k) < cost(i, kb))
                        kb = k;
                truth_to_est[i] = static_cast<int>(kb);
            }
            const auto k = static_cast<std::size_t>(truth_to_est[i]);
            out.ranges_m[i] = est.ranges_m[k];
            out.velocities_mps[i] = est.velocities_mps[k];
            out.angles_rad[i] = est.angles_rad[k];
        }
        return out;
    }

    double received_power(const CarrierComponentConfig &cfg, const ArrayConfig &array,
                          const std::vector<TargetTruth> &targets)
    {
        if (targets.empty())
            return 1.0;
        double p = 0.0;
        for (const auto &t : targets)
        {
            const double k = attenuation_magnitude(cfg.wavelength(), t.range_m);
            p += t.rcs_variance * k * k * array.num_tx;
        }
        return p / static_cast<double>(targets.size());
    }

    NoisePlan noise_plan(const Scenario &sc, double snr_db)
    {
        NoisePlan np;
        np.snr_db = snr_db;
        const double s = db2lin(snr_db);
        np.sigma2_low = received_power(sc.low, sc.array, sc.targets) / s;
        np.sigma2_high = received_power(sc.high, sc.array, sc.targets) / (s * db2lin(sc.hf_snr_offset_db));
        np.tx_snr_db = -10.0 * std::log10(np.sigma2_low);
        return np;
    }

    TrialRecord run_trial(const Scenario &sc, std::size_t snr_index, int trial)
    {
        const std::uint64_t key = (static_cast<std::uint64_t>(snr_index) << 32) | static_cast<std::uint32_t>(trial);
        const std::uint64_t ms = sc.master_seed;
        const NoisePlan np = noise_plan(sc, sc.snr_grid_db.at(snr_index));

        const SensingFrame fl = generate_sensing_frame(sc.low, sc.array, sc.tx_steer_rad, derive_seed(ms, key, 1, Stage::sensing_frame));
        const SensingFrame fh = generate_sensing_frame(sc.high, sc.array, sc.tx_steer_rad, derive_seed(ms, key, 2, Stage::sensing_frame));
        const auto rcs_low = draw_rcs(sc.targets, derive_seed(ms, key, 1, Stage::rcs));
        const auto rcs_high = draw_rcs(sc.targets, derive_seed(ms, key, 2, Stage::rcs));
        const double n_low = sc.noiseless ? 0.0 : np.sigma2_low;
        const double n_high = sc.noiseless ? 0.0 : np.sigma2_high;
        const EchoCube el = simulate_echo(sc.low, sc.array, sc.targets, fl, rcs_low, n_low, derive_seed(ms, key, 1, Stage::sensing_noise));
        const EchoCube eh = simulate_echo(sc.high, sc.array, sc.targets, fh, rcs_high, n_high, derive_seed(ms, key, 2, Stage::sensing_noise));

        PipelineConfig pc = sc.proc;
        pc.range_grid = sc.effective_range_grid();
        pc.velocity_grid = sc.effective_velocity_grid();
        pc.sigma2_low = np.sigma2_low;
        pc.sigma2_high = np.sigma2_high;
        pc.fuse_symbols = sc.run_symbol_level;

        const PipelineResult r = symbol_level_pipeline(el, eh, fl, fh, sc.low, sc.high, sc.array, pc);

        TrialRecord rec;
        rec.snr_index = snr_index;
        rec.trial = trial;
        rec.recovery_warnings = r.recovery_warnings;
        rec.aoa_partial = r.aoa_partial;
        rec.matched = {match_by_angle(r.symbol_level, sc.targets), match_by_angle(r.data_level, sc.targets),
                       match_by_angle(r.low_band, sc.targets), match_by_angle(r.high_band, sc.targets)};
        return rec;
    }

    const ArmseReport *SnrSummary::find(MethodTag m) const
    {
        for (const auto &x : methods)
            if (x.method == m)
                return &x.report;
        return nullptr;
    }

    void attach_bounds(const Scenario &sc, SnrSummary &s)
    {
        const double w_low = db2lin(s.noise.snr_db);
        const double w_high = db2lin(s.noise.snr_db + sc.hf_snr_offset_db);
        const FisherInfo3 fl = fim_band(sc.low, sc.array, w_low);
        const FisherInfo3 fh = fim_band(sc.high, sc.array, w_high);
        const double theta = sc.crlb.angle_rad;
        s.crlb_low = crlb_from_fim(fl.matrix, theta, BandTag::low);
        s.crlb_high = crlb_from_fim(fh.matrix, theta, BandTag::high);
        s.crlb_ca = crlb_ca(fl, fh, theta);

        // Integrated SNR over both bands, total bandwidth, longest symbol count.
        const double chi = sc.array.num_rx * (w_low * sc.low.num_subcarriers * sc.low.num_symbols +
                                              w_high * sc.high.num_subcarriers * sc.high.num_symbols);
        s.theory = theoretical_rmse(sc.low.bandwidth_hz() + sc.high.bandwidth_hz(), chi,
                                    std::max(sc.low.num_symbols, sc.high.num_symbols), sc.low.carrier_freq_hz,
                                    derive_timing(sc.low).total_s);
    }

    SweepResult run_sweep(const Scenario &sc, int threads)
    {
        const std::size_t ns = sc.snr_grid_db.size();
        const auto nt = static_cast<std::size_t>(sc.trials);
        std::vector<TrialRecord> records(ns * nt);
        parallel_for(records.size(), threads, [&](std::size_t j) {
            records[j] = run_trial(sc, j / nt, static_cast<int>(j % nt));
        });

        SweepResult out;
        CsvWriter est({"schema_version", "scenario", "seed", "snr_db", "trial", "method_tag", "target_id", "r_true",
                       "r_hat", "v_true", "v_hat", "theta_true", "theta_hat"});
        CsvWriter arm({"schema_version", "scenario", "seed", "snr_db", "tx_snr_db", "trials", "method_tag",
                       "armse_range_m", "armse_velocity_mps", "armse_angle_rad", "crlb_range_ca_m",
                       "crlb_velocity_ca_mps", "crlb_range_low_m", "crlb_velocity_low_mps", "crlb_range_high_m",
                       "crlb_velocity_high_mps", "theory_range_m", "theory_velocity_mps", "range_improvement",
                       "velocity_improvement", "recovery_warnings", "aoa_partial_trials"});
        const std::string seed = seed_text(sc.master_seed);

        for (std::size_t si = 0; si < ns; ++si)
        {
            SnrSummary s;
            s.noise = noise_plan(sc, sc.snr_grid_db[si]);
            for (std::size_t t = 0; t < nt; ++t)
            {
                const TrialRecord &rec = records[si * nt + t];
                s.recovery_warnings += rec.recovery_warnings;
                s.aoa_partial_trials += rec.aoa_partial ? 1 : 0;
                for (std::size_t mi = 0; mi < 4; ++mi)
                {
                    const MethodTag m = kMethods[mi];
                    if (!requested(sc, m))
                        continue;
                    const EstimateSet &e = rec.matched[mi];
                    for (std::size_t i = 0; i < sc.targets.size(); ++i)
                        est.row({num(kCsvSchemaVersion), sc.name, seed, num(s.noise.snr_db), num(rec.trial),
                                 std::string(method_name(m)), num(static_cast<int>(i)), num(sc.targets[i].range_m),
                                 num(e.ranges_m[i]), num(sc.targets[i].velocity_mps), num(e.velocities_mps[i]),
                                 num(sc.targets[i].angle_rad), num(e.angles_rad[i])});
                }
            }
            for (std::size_t mi = 0; mi < 4; ++mi)
            {
                const MethodTag m = kMethods[mi];
                if (!requested(sc, m))
                    continue;
                std::vector<EstimateSet> sets;
                sets.reserve(nt);
                for (std::size_t t = 0; t < nt; ++t)
                    sets.push_back(records[si * nt + t].matched[mi]);
                s.methods.push_back({m, armse(sets, sc.targets, s.noise.snr_db)});
            }
            attach_bounds(sc, s);
            const ArmseReport *sym = s.find(MethodTag::symbol_level);
            const ArmseReport *dat = s.find(MethodTag::data_level);
            s.range_improvement = (sym && dat && dat->armse_range_m > 0.0) ? 1.0 - sym->armse_range_m / dat->armse_range_m : kNan;
            s.velocity_improvement = (sym && dat && dat->armse_velocity_mps > 0.0)
                                         ? 1.0 - sym->armse_velocity_mps / dat->armse_velocity_mps
                                         : kNan;
            for (const auto &m : s.methods)
                arm.row({num(kCsvSchemaVersion), sc.name, seed, num(s.noise.snr_db), num(s.noise.tx_snr_db), num(sc.trials),
                         std::string(method_name(m.method)), num(m.report.armse_range_m), num(m.report.armse_velocity_mps),
                         num(m.report.armse_angle_rad), num(sqrt_or_nan(s.crlb_ca.crlb_range_m2)),
                         num(sqrt_or_nan(s.crlb_ca.crlb_velocity_mps2)), num(sqrt_or_nan(s.crlb_low.crlb_range_m2)),
                         num(sqrt_or_nan(s.crlb_low.crlb_velocity_mps2)), num(sqrt_or_nan(s.crlb_high.crlb_range_m2)),
                         num(sqrt_or_nan(s.crlb_high.crlb_velocity_mps2)), num(s.theory.range_m),
                         num(s.theory.velocity_mps), num(s.range_improvement), num(s.velocity_improvement),
                         num(s.recovery_warnings), num(s.aoa_partial_trials)});
            out.points.push_back(std::move(s));
        }
        out.estimates_csv = est.str();
        out.armse_csv = arm.str();
        return out;
    }

    MiSweepResult run_mi_sweep(const Scenario &sc, int threads)
    {
        const MiSettings &ms = sc.mi;
        // Both bands share the low-band grid so the Gram terms add per subcarrier.
        const CarrierComponentConfig shape = sc.low;
        const int n = shape.num_subcarriers, m = shape.num_symbols, nt = sc.array.num_tx;
        const int nu_max = *std::max_element(ms.ue_antennas.begin(), ms.ue_antennas.end());
        const std::size_t n_snr = ms.snr_grid_db.size(), n_nu = ms.ue_antennas.size();
        if (n_snr == 0)
            throw Error(Errc::invalid_config, "mi.snr_db is empty");

        // per draw: [nu][snr][band tag]
        std::vector<std::vector<double>> per_draw(static_cast<std::size_t>(ms.draws));
        parallel_for(per_draw.size(), threads, [&](std::size_t d) {
            std::vector<double> acc(n_nu * n_snr * 3, 0.0);
            std::vector<CommChannelRealization> ch;
            std::vector<BandCovariance> cov;
            for (int b = 1; b <= 2; ++b)
            {
                ch.push_back(comm_channel(ms.num_paths, nt, nu_max, derive_seed(sc.master_seed, d, b, Stage::comm_channel)));
                const CommFrame f = generate_comm_frame(shape, nt, ms.num_users, derive_seed(sc.master_seed, d, b, Stage::comm_frame));
                cov.push_back(input_covariance(f, 1.0));
            }
            for (std::size_t k = 0; k < n_nu; ++k)
            {
                const int nu = ms.ue_antennas[k];
                std::vector<BandResponse> h;
                for (const auto &c : ch)
                {
                    CommChannelRealization sub;
                    for (const auto &tap : c.taps)
                        sub.taps.push_back(tap.leftCols(nu));
                    h.push_back(band_response(sub, n));
                }
                const std::vector<double> ev[3] = {gram_eigenvalues({h[0]}, {cov[0]}), gram_eigenvalues({h[1]}, {cov[1]}),
                                                   gram_eigenvalues(h, cov)};
                for (std::size_t s = 0; s < n_snr; ++s)
                {
                    const double s2 = db2lin(-ms.snr_grid_db[s]);
                    for (int t = 0; t < 3; ++t)
                        acc[(k * n_snr + s) * 3 + static_cast<std::size_t>(t)] = mi_from_eigenvalues(ev[t], s2, m);
                }
            }
            per_draw[d] = std::move(acc);
        });

        MiSweepResult out;
        CsvWriter csv({"schema_version", "scenario", "seed", "snr_db", "num_ue_antennas", "band_tag", "mi_bits",
                       "mi_bits_per_dim", "draws"});
        const BandTag tags[3] = {BandTag::low, BandTag::high, BandTag::ca};
        for (std::size_t k = 0; k < n_nu; ++k)
            for (std::size_t s = 0; s < n_snr; ++s)
                for (int t = 0; t < 3; ++t)
                {
                    const std::size_t idx = (k * n_snr + s) * 3 + static_cast<std::size_t>(t);
                    double sum = 0.0;
                    for (const auto &d : per_draw)
                        sum += d[idx];
                    MiPoint p;
                    p.snr_db = ms.snr_grid_db[s];
                    p.num_ue_antennas = ms.ue_antennas[k];
                    p.band = tags[t];
                    p.mi_bits = sum / static_cast<double>(ms.draws);
                    p.mi_bits_per_dim = p.mi_bits / (static_cast<double>(n) * m * p.num_ue_antennas);
                    csv.row({num(kCsvSchemaVersion), sc.name, seed_text(sc.master_seed), num(p.snr_db),
                             num(p.num_ue_antennas), std::string(band_tag_name(p.band)), num(p.mi_bits),
                             num(p.mi_bits_per_dim), num(ms.draws)});
                    out.points.push_back(p);
                }
        out.csv = csv.str();
        return out;
    }

    CrlbSweepResult run_crlb_sweep(const Scenario &sc)
    {
        const CrlbSettings &cs = sc.crlb;
        if (cs.snr_grid_db.empty())
            throw Error(Errc::invalid_config, "crlb.snr_db is empty");
        CrlbSweepResult out;
        CsvWriter csv({"schema_version", "scenario", "snr_db", "band_tag", "crlb_range", "crlb_velocity", "crlb_angle",
                       "rmse_bound_range_m", "rmse_bound_velocity_mps", "rmse_bound_angle_rad", "closed_form_discrepancy"});
        for (double snr : cs.snr_grid_db)
        {
            const FisherInfo3 fl = fim_band(sc.low, sc.array, db2lin(snr));
            const FisherInfo3 fh = fim_band(sc.high, sc.array, db2lin(snr + cs.hf_snr_offset_db));
            CrlbRow rows[3];
            rows[0].report = crlb_from_fim(fl.matrix, cs.angle_rad, BandTag::low);
            rows[0].closed_form_discrepancy = crlb_band(fl, sc.low, sc.array).max_rel_discrepancy;
            rows[1].report = crlb_from_fim(fh.matrix, cs.angle_rad, BandTag::high);
            rows[1].closed_form_discrepancy = crlb_band(fh, sc.high, sc.array).max_rel_discrepancy;
            rows[2].report = crlb_ca(fl, fh, cs.angle_rad);
            rows[2].closed_form_discrepancy = kNan;
            for (auto &r : rows)
            {
                r.snr_db = snr;
                const CrlbReport &c = r.report;
                csv.row({num(kCsvSchemaVersion), sc.name, num(snr), std::string(band_tag_name(c.band_tag)),
                         num(c.crlb_range_m2), num(c.crlb_velocity_mps2), num(c.crlb_angle_rad2),
                         num(sqrt_or_nan(c.crlb_range_m2)), num(sqrt_or_nan(c.crlb_velocity_mps2)),
                         num(sqrt_or_nan(c.crlb_angle_rad2)), num(r.closed_form_discrepancy)});
                out.rows.push_back(r);
            }
        }
        out.csv = csv.str();
        return out;
    }

    std::vector<int> monotone_segments(const std::vector<double> &values)
    {
        std::vector<int> seg(values.size(), 1);
        int current = 1, sign = 0;
        for (std::size_t i = 1; i < values.size(); ++i)
        {
            const double d = values[i] - values[i - 1];
            const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
            if (s != 0)
            {
                if (sign != 0 && s != sign)
                    ++current;
                sign = s;
            }
            seg[i] = current;
        }
        return seg;
    }

    int slope_sign_changes(const std::vector<double> &values)
    {
        const auto seg = monotone_segments(values);
        return seg.empty() ? 0 : seg.back() - 1;
    }

    BandwidthSweepResult run_bandwidth_sweep(const Scenario &sc)
    {
        const BandwidthSettings &bw = sc.bandwidth;
        const int n2_hi = bw.n2_max.value_or((bw.total_subcarriers - 1) / bw.n2_coefficient);
        if (bw.n2_min > n2_hi)
            throw Error(Errc::infeasible_split, "no N_2 in [" + std::to_string(bw.n2_min) + ", " + std::to_string(n2_hi) +
                                                    "] leaves a positive N_1");

        auto band = [](double fc, double df, int n, int m, double t_total, int idx) {
            CarrierComponentConfig c{fc, df, n, m, 0.0, idx};
            c.cp_length_samples = (t_total - 1.0 / df) * df * n;
            if (c.cp_length_samples < -1e-9 * n)
                throw Error(Errc::infeasible_split, "symbol duration of band " + std::to_string(idx) +
                                                        " is shorter than 1/df");
            c.cp_length_samples = std::max(0.0, c.cp_length_samples);
            return c;
        };

        const ArrayConfig array{1, bw.num_rx, bw.element_spacing_wavelengths_high * sc.high.wavelength()};
        const double w_low = db2lin(bw.snr_db), w_high = db2lin(bw.snr_db + bw.hf_snr_offset_db);

        BandwidthSweepResult out;
        for (int n2 = bw.n2_min; n2 <= n2_hi; ++n2)
        {
            const int n1 = bw.total_subcarriers - bw.n2_coefficient * n2;
            if (n1 < 1)
                throw Error(Errc::infeasible_split, "N_2 = " + std::to_string(n2) + " leaves N_1 = " + std::to_string(n1));
            const auto lo = band(sc.low.carrier_freq_hz, sc.low.subcarrier_spacing_hz, n1, bw.num_symbols_low,
                                 bw.symbol_duration_low_s, 1);
            const auto hi = band(sc.high.carrier_freq_hz, sc.high.subcarrier_spacing_hz, n2, bw.num_symbols_high,
                                 bw.symbol_duration_high_s, 2);
            const CrlbReport r = crlb_ca(fim_band(lo, array, w_low), fim_band(hi, array, w_high), sc.crlb.angle_rad);
            out.rows.push_back({n1, n2, r.crlb_range_m2, r.crlb_velocity_mps2, 1});
        }

        std::vector<double> vel;
        for (const auto &r : out.rows)
            vel.push_back(r.crlb_velocity_mps2);
        const auto seg = monotone_segments(vel);
        CsvWriter csv({"schema_version", "scenario", "n1", "n2", "constraint_total", "bandwidth_low_hz",
                       "bandwidth_high_hz", "snr_db", "crlb_range_m2", "crlb_velocity_mps2", "rmse_bound_range_m",
                       "rmse_bound_velocity_mps", "case"});
        for (std::size_t i = 0; i < out.rows.size(); ++i)
        {
            auto &r = out.rows[i];
            r.case_index = seg[i];
            csv.row({num(kCsvSchemaVersion), sc.name, num(r.n1), num(r.n2), num(r.n1 + bw.n2_coefficient * r.n2),
                     num(r.n1 * sc.low.subcarrier_spacing_hz), num(r.n2 * sc.high.subcarrier_spacing_hz), num(bw.snr_db),
                     num(r.crlb_range_m2), num(r.crlb_velocity_mps2), num(std::sqrt(r.crlb_range_m2)),
                     num(std::sqrt(r.crlb_velocity_mps2)), num(r.case_index)});
        }
        out.csv = csv.str();
        return out;
    }
}
