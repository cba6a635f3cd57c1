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

#ifndef CAISAC_SWEEP_HPP
#define CAISAC_SWEEP_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "caisac/metrics.hpp"
#include "caisac/scenario.hpp"

namespace caisac
{
    inline constexpr int kCsvSchemaVersion = 1;

    /// Runs job(0..count-1) on up to `threads` workers. The first exception
    /// thrown by any job is rethrown after all workers stop.
    void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)> &job);

    /// Reorders an estimate set so entry i belongs to truth[i].
    ///
    /// Estimates are associated by angle with the least total squared angle
    /// error (exhaustive up to 8 estimates, greedy above). A truth left
    /// without a distinct estimate takes the nearest one by angle; with no
    /// estimates at all every value is zero.
    EstimateSet match_by_angle(const EstimateSet &est, const std::vector<TargetTruth> &truth);

    /// Mean over targets of rcs_var |kappa_b|^2 N_T: per-element received power of band b.
    double received_power(const CarrierComponentConfig &cfg, const ArrayConfig &array,
                          const std::vector<TargetTruth> &targets);

    struct NoisePlan
    {
        double snr_db = 0.0;    // received per-element SNR of the low band
        double tx_snr_db = 0.0; // -10 log10 sigma_1^2 at unit transmit power per RE
        double sigma2_low = 0.0;
        double sigma2_high = 0.0;
    };

    NoisePlan noise_plan(const Scenario &sc, double snr_db);

    struct TrialRecord
    {
        std::size_t snr_index = 0;
        int trial = 0;
        std::vector<EstimateSet> matched; // one per MethodTag, in enum order
        int recovery_warnings = 0;
        bool aoa_partial = false;
    };

    /// One Monte Carlo trial; seeds follow derive_seed(master, snr_index * 2^32 + trial, band, stage).
    TrialRecord run_trial(const Scenario &sc, std::size_t snr_index, int trial);

    struct MethodArmse
    {
        MethodTag method = MethodTag::symbol_level;
        ArmseReport report;
    };

    struct SnrSummary
    {
        NoisePlan noise;
        std::vector<MethodArmse> methods; // requested methods only
        CrlbReport crlb_low, crlb_high, crlb_ca;
        TheoreticalRmse theory;
        double range_improvement = 0.0;    // 1 - sym/data ARMSE, nan when either is missing
        double velocity_improvement = 0.0;
        int recovery_warnings = 0;
        int aoa_partial_trials = 0;

        const ArmseReport *find(MethodTag m) const;
    };

    struct SweepResult
    {
        std::vector<SnrSummary> points;
        std::string estimates_csv;
        std::string armse_csv;
    };

    SweepResult run_sweep(const Scenario &sc, int threads = 1);

    /// Reference lines at one SNR point: FIM-based bounds per band and CA, theory RMSE.
    void attach_bounds(const Scenario &sc, SnrSummary &s);

    struct MiPoint
    {
        double snr_db = 0.0;
        int num_ue_antennas = 0;
        BandTag band = BandTag::ca;
        double mi_bits = 0.0; // mean over draws
        double mi_bits_per_dim = 0.0;
    };

    struct MiSweepResult
    {
        std::vector<MiPoint> points;
        std::string csv;
    };

    MiSweepResult run_mi_sweep(const Scenario &sc, int threads = 1);

    struct CrlbRow
    {
        double snr_db = 0.0;
        CrlbReport report;
        double closed_form_discrepancy = 0.0; // single bands only
    };

    struct CrlbSweepResult
    {
        std::vector<CrlbRow> rows;
        std::string csv;
    };

    CrlbSweepResult run_crlb_sweep(const Scenario &sc);

    struct BandwidthRow
    {
        int n1 = 0;
        int n2 = 0;
        double crlb_range_m2 = 0.0;
        double crlb_velocity_mps2 = 0.0;
        int case_index = 1; // maximal runs of one velocity-CRLB slope sign
    };

    struct BandwidthSweepResult
    {
        std::vector<BandwidthRow> rows;
        std::string csv;
    };

    /// Throws infeasible-split when a point of the requested N_2 range leaves
    /// N_1 < 1 or a negative CP under the fixed symbol durations.
    BandwidthSweepResult run_bandwidth_sweep(const Scenario &sc);

    /// Case segmentation used by the bandwidth sweep: 1-based run index of the
    /// finite-difference sign of values; zero steps continue the current run.
    std::vector<int> monotone_segments(const std::vector<double> &values);

    /// Number of sign changes of the finite difference (zero steps skipped).
    int slope_sign_changes(const std::vector<double> &values);
}

#endif
