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

// caisac command line: simulate, mi, crlb, bandwidth-sweep, plot.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "caisac/csv.hpp"
#include "caisac/plot.hpp"
#include "caisac/scenario.hpp"
#include "caisac/sweep.hpp"

namespace fs = std::filesystem;
using namespace caisac;

namespace
{
    struct Common
    {
        std::string scenario;
        std::optional<std::uint64_t> seed;
        std::string out = ".";
        std::optional<int> trials;
        int threads = 1;
    };

    void add_common(CLI::App *cmd, Common &c, bool with_trials)
    {
        cmd->add_option("--scenario", c.scenario, "scenario file (default: built-in desk scenario)");
        cmd->add_option("--seed", c.seed, "master seed, overrides sim.seed");
        cmd->add_option("--out", c.out, "output directory")->capture_default_str();
        if (with_trials)
            cmd->add_option("--trials", c.trials, "Monte Carlo trials (channel draws for mi)")->check(CLI::PositiveNumber);
        cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    }

    Scenario load(const Common &c)
    {
        Scenario sc = c.scenario.empty() ? desk_scenario() : load_scenario(c.scenario);
        if (c.seed)
            sc.master_seed = *c.seed;
        return sc;
    }

    std::string out_path(const Common &c, const std::string &file)
    {
        fs::create_directories(c.out);
        return (fs::path(c.out) / file).string();
    }

    void save(const Common &c, const std::string &file, const std::string &text)
    {
        const std::string p = out_path(c, file);
        write_text_file(p, text);
        std::cerr << "wrote " << p << "\n";
    }

    void plot_to(const Common &c, const std::string &file, const std::string &csv, const PlotSpec &spec)
    {
        save(c, file, emit_plot(parse_csv(csv), spec));
    }

    double seconds_since(std::chrono::steady_clock::time_point t0)
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"caisac: carrier-aggregated MIMO-OFDM ISAC link-level simulator"};
    app.require_subcommand(1);

    Common sim_c, mi_c, crlb_c, bw_c;
    auto *sim = app.add_subcommand("simulate", "ARMSE sweep over SNR (estimates.csv, armse.csv)");
    add_common(sim, sim_c, true);
    auto *mi = app.add_subcommand("mi", "communication mutual information sweep (mi.csv)");
    add_common(mi, mi_c, true);
    auto *crlb = app.add_subcommand("crlb", "per-band and CA bounds over SNR (crlb.csv)");
    add_common(crlb, crlb_c, false);
    auto *bw = app.add_subcommand("bandwidth-sweep", "CA bounds over the bandwidth split (bandwidth.csv)");
    add_common(bw, bw_c, false);

    std::string plot_csv, plot_out, plot_title, plot_x;
    std::vector<std::string> plot_y, plot_group;
    bool plot_log = false;
    auto *plot = app.add_subcommand("plot", "SVG plot from a CSV file");
    plot->add_option("--csv", plot_csv, "input CSV")->required();
    plot->add_option("--x", plot_x, "x column")->required();
    plot->add_option("--y", plot_y, "y column(s)")->required()->delimiter(',');
    plot->add_option("--group", plot_group, "columns splitting the series")->delimiter(',');
    plot->add_flag("--log-y", plot_log, "logarithmic y axis");
    plot->add_option("--title", plot_title, "plot title");
    plot->add_option("--out", plot_out, "output SVG file")->required();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*sim)
        {
            Scenario sc = load(sim_c);
            if (sim_c.trials)
                sc.trials = *sim_c.trials;
            const auto t0 = std::chrono::steady_clock::now();
            const SweepResult r = run_sweep(sc, sim_c.threads);
            save(sim_c, "estimates.csv", r.estimates_csv);
            save(sim_c, "armse.csv", r.armse_csv);
            plot_to(sim_c, "armse_range.svg", r.armse_csv,
                    {"snr_db", {"armse_range_m"}, {"method_tag"}, true, "Range ARMSE", "SNR (dB)", "ARMSE (m)"});
            plot_to(sim_c, "armse_velocity.svg", r.armse_csv,
                    {"snr_db", {"armse_velocity_mps"}, {"method_tag"}, true, "Velocity ARMSE", "SNR (dB)", "ARMSE (m/s)"});
            for (const auto &p : r.points)
                std::cerr << "snr " << p.noise.snr_db << " dB: range improvement " << p.range_improvement
                          << ", velocity improvement " << p.velocity_improvement << "\n";
            std::cerr << "elapsed " << seconds_since(t0) << " s\n";
        }
        else if (*mi)
        {
            Scenario sc = load(mi_c);
            if (mi_c.trials)
                sc.mi.draws = *mi_c.trials;
            const auto t0 = std::chrono::steady_clock::now();
            const MiSweepResult r = run_mi_sweep(sc, mi_c.threads);
            save(mi_c, "mi.csv", r.csv);
            plot_to(mi_c, "mi.svg", r.csv,
                    {"snr_db", {"mi_bits"}, {"band_tag", "num_ue_antennas"}, false, "Mutual information", "SNR (dB)", "MI (bit)"});
            std::cerr << "elapsed " << seconds_since(t0) << " s\n";
        }
        else if (*crlb)
        {
            const Scenario sc = load(crlb_c);
            const CrlbSweepResult r = run_crlb_sweep(sc);
            save(crlb_c, "crlb.csv", r.csv);
            plot_to(crlb_c, "crlb_range.svg", r.csv,
                    {"snr_db", {"rmse_bound_range_m"}, {"band_tag"}, true, "Range CRLB", "SNR (dB)", "sqrt CRLB (m)"});
            plot_to(crlb_c, "crlb_velocity.svg", r.csv,
                    {"snr_db", {"rmse_bound_velocity_mps"}, {"band_tag"}, true, "Velocity CRLB", "SNR (dB)", "sqrt CRLB (m/s)"});
        }
        else if (*bw)
        {
            const Scenario sc = load(bw_c);
            const BandwidthSweepResult r = run_bandwidth_sweep(sc);
            save(bw_c, "bandwidth.csv", r.csv);
            plot_to(bw_c, "bandwidth.svg", r.csv,
                    {"n2", {"crlb_range_m2", "crlb_velocity_mps2"}, {}, true, "CA bounds over the bandwidth split", "N_2", "CRLB"});
        }
        else if (*plot)
        {
            PlotSpec spec;
            spec.x_column = plot_x;
            spec.y_columns = plot_y;
            spec.group_columns = plot_group;
            spec.log_y = plot_log;
            spec.title = plot_title;
            write_text_file(plot_out, emit_plot(load_csv(plot_csv), spec));
            std::cerr << "wrote " << plot_out << "\n";
        }
    }
    catch (const Error &e)
    {
        std::cerr << "caisac: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "caisac: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
