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

#include "caisac/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace caisac
{
    std::vector<double> expand_range(double start, double step, double stop)
    {
        if (step == 0.0 || !std::isfinite(step) || !std::isfinite(start) || !std::isfinite(stop))
            throw Error(Errc::invalid_config, "range needs a finite non-zero step");
        if ((stop - start) / step < -1e-9)
            throw Error(Errc::invalid_config, "range step points away from its end");
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 1000000)
            throw Error(Errc::invalid_config, "range expands to too many points");
        std::vector<double> v(static_cast<std::size_t>(count));
        for (long i = 0; i < count; ++i)
            v[static_cast<std::size_t>(i)] = start + static_cast<double>(i) * step;
        return v;
    }

    namespace
    {
        // Defaults before derived fields (spacing, low-band CP) are filled in.
        Scenario desk_base()
        {
            Scenario s;
            s.low = {3.5e9, 30e3, 128, 14, 0.0, 1};
            // 162.304 samples at N = 512 reproduces T = 43.9 us / 5.49 us; scaled to N = 128.
            s.high = {28e9, 240e3, 128, 28, 40.576, 2};
            s.array = {8, 8, 0.0};
            s.targets = {{117.0, 13.0, deg2rad(30.0), 1.0}, {150.0, 20.0, deg2rad(40.0), 1.0}, {170.0, 25.0, deg2rad(50.0), 1.0}};
            s.snr_grid_db = expand_range(-20.0, 1.0, -5.0);
            s.mi.snr_grid_db = s.snr_grid_db;
            s.crlb.snr_grid_db = s.snr_grid_db;
            s.crlb.angle_rad = deg2rad(30.0);
            return s;
        }
    }

    Scenario desk_scenario()
    {
        Scenario s = desk_base();
        s.finalize();
        return s;
    }

    double Scenario::max_delay_s() const
    {
        double d = 0.0;
        for (const auto &t : targets)
            d = std::max(d, t.delay_s());
        return d;
    }

    SearchGrid Scenario::effective_range_grid() const
    {
        return range_grid ? *range_grid : default_range_grid(low, high);
    }

    SearchGrid Scenario::effective_velocity_grid() const
    {
        return velocity_grid ? *velocity_grid : default_velocity_grid(low, high);
    }

    void Scenario::finalize()
    {
        try
        {
            low.band_index = 1;
            high.band_index = 2;
            low.validate();
            high.validate();
            const BandPairRatio br = band_ratio(low, high);
            (void)br;

            if (array.element_spacing_m == 0.0)
            {
                if (!(spacing_wavelengths > 0.0))
                    throw Error(Errc::invalid_config, "element spacing in wavelengths must be positive");
                const double lambda = spacing_reference == ShapeBand::low ? low.wavelength() : high.wavelength();
                array.element_spacing_m = spacing_wavelengths * lambda;
            }
            array.validate();

            double vmax = 0.0;
            for (const auto &t : targets)
            {
                t.validate();
                vmax = std::max(vmax, std::abs(t.velocity_mps));
            }
            low.check_doppler_guard(vmax);
            high.check_doppler_guard(vmax);

            if (trials < 1)
                throw Error(Errc::invalid_config, "sim.trials must be at least 1");
            if (snr_grid_db.empty())
                throw Error(Errc::invalid_config, "sim.snr_db is empty");

            if (align_low_cp)
                low.cp_length_samples = align_cp(low, high, run_symbol_level ? max_delay_s() : 0.0);
            else if (run_symbol_level)
            {
                const double a = low.fc_t_product(), b = high.fc_t_product();
                if (std::abs(a - b) > 1e-12 * a)
                    throw Error(Errc::inconsistent_config,
                                "symbol-level fusion needs f_C T equal on both bands; set band.low.cp_length_samples = auto");
                const double ts = std::min(derive_timing(low).cp_s, derive_timing(high).cp_s);
                if (ts < max_delay_s())
                    throw Error(Errc::cp_too_short, "CP shorter than the largest round-trip delay");
            }

            if (proc.snapshot_stride < 1)
                throw Error(Errc::invalid_config, "proc.snapshot_stride must be positive");
            if (proc.omp_sparsity < 1)
                throw Error(Errc::invalid_config, "proc.omp_sparsity must be positive");
            if (model_order_from_targets)
                proc.model_order = static_cast<int>(targets.size());
            if (proc.model_order && (*proc.model_order < 0 || *proc.model_order >= array.num_rx))
                throw Error(Errc::invalid_config, "MUSIC model order (proc.model_order) must lie in [0, N_R)");
            if (range_grid)
                range_grid->validate();
            if (velocity_grid)
                velocity_grid->validate();
            (void)proc.angle_grid.values();

            if (mi.ue_antennas.empty() || mi.num_users < 1 || mi.num_paths < 1 || mi.draws < 1)
                throw Error(Errc::invalid_config, "mi settings must be positive and non-empty");
            for (int nu : mi.ue_antennas)
                if (nu < 1)
                    throw Error(Errc::invalid_config, "mi.ue_antennas entries must be positive");
            if (mi.num_users > array.num_tx)
                throw Error(Errc::overloaded_spatial_layers, "mi.num_users exceeds array.num_tx");

            const auto &bw = bandwidth;
            if (bw.total_subcarriers < 2 || bw.n2_coefficient < 1 || bw.n2_min < 1 || bw.num_rx < 1 ||
                bw.num_symbols_low < 1 || bw.num_symbols_high < 1 || !(bw.symbol_duration_low_s > 0.0) ||
                !(bw.symbol_duration_high_s > 0.0) || !(bw.element_spacing_wavelengths_high > 0.0))
                throw Error(Errc::invalid_config, "bandwidth settings must be positive");
        }
        catch (const Error &e)
        {
            throw Error(e.code(), origin + ": " + e.detail());
        }
    }

    namespace
    {
        struct Entry
        {
            std::string value;
            int line = 0;
        };

        std::string trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string_view::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return std::string(s.substr(b, e - b + 1));
        }

        std::vector<std::string> split(const std::string &s, char sep)
        {
            std::vector<std::string> out;
            std::string cur;
            std::istringstream in(s);
            while (std::getline(in, cur, sep))
                out.push_back(trim(cur));
            return out;
        }

        class Reader
        {
        public:
            Reader(std::string origin, const Entry &e) : origin_(std::move(origin)), e_(e) {}

            [[noreturn]] void fail(const std::string &msg) const
            {
                throw Error(Errc::config_parse, origin_ + ":" + std::to_string(e_.line) + ": " + msg);
            }

            const std::string &text() const { return e_.value; }
            bool is(std::string_view word) const { return e_.value == word; }

            double real(const std::string &s) const
            {
                double v = 0.0;
                const char *b = s.data(), *end = s.data() + s.size();
                if (b != end && *b == '+')
                    ++b;
                auto [p, ec] = std::from_chars(b, end, v);
                if (ec != std::errc() || p != end || !std::isfinite(v))
                    fail("expected a number, got '" + s + "'");
                return v;
            }
            double real() const { return real(e_.value); }

            long long integer(const std::string &s) const
            {
                long long v = 0;
                auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
                if (ec != std::errc() || p != s.data() + s.size())
                    fail("expected an integer, got '" + s + "'");
                return v;
            }
            int integer() const
            {
                long long v = integer(e_.value);
                if (v < INT32_MIN || v > INT32_MAX)
                    fail("integer out of range");
                return static_cast<int>(v);
            }
            std::uint64_t seed() const
            {
                std::uint64_t v = 0;
                auto [p, ec] = std::from_chars(e_.value.data(), e_.value.data() + e_.value.size(), v);
                if (ec != std::errc() || p != e_.value.data() + e_.value.size())
                    fail("expected a non-negative integer seed, got '" + e_.value + "'");
                return v;
            }
            bool boolean() const
            {
                if (is("true"))
                    return true;
                if (is("false"))
                    return false;
                fail("expected true or false, got '" + e_.value + "'");
            }

            std::vector<double> reals() const
            {
                if (e_.value.find(':') != std::string::npos)
                {
                    auto parts = split(e_.value, ':');
                    if (parts.size() != 3)
                        fail("range must be start:step:stop");
                    try
                    {
                        return expand_range(real(parts[0]), real(parts[1]), real(parts[2]));
                    }
                    catch (const Error &err)
                    {
                        fail(err.detail());
                    }
                }
                std::vector<double> v;
                if (e_.value.empty())
                    return v;
                for (const auto &p : split(e_.value, ','))
                    v.push_back(real(p));
                return v;
            }

            std::vector<int> integers() const
            {
                std::vector<int> v;
                for (const auto &p : split(e_.value, ','))
                    v.push_back(static_cast<int>(integer(p)));
                return v;
            }

            SearchGrid grid() const
            {
                auto parts = split(e_.value, ',');
                if (parts.size() != 3)
                    fail("grid must be 'min, max, count' or auto");
                SearchGrid g{real(parts[0]), real(parts[1]), static_cast<int>(integer(parts[2]))};
                if (!(g.max > g.min) || g.count < 2)
                    fail("grid needs max > min and at least 2 points");
                return g;
            }

            double positive() const
            {
                double v = real();
                if (!(v > 0.0))
                    fail("value must be positive");
                return v;
            }
            int positive_int() const
            {
                int v = integer();
                if (v < 1)
                    fail("value must be a positive integer");
                return v;
            }

        private:
            std::string origin_;
            const Entry &e_;
        };

        using Handler = std::function<void(Scenario &, const Reader &)>;

        void add_band(std::map<std::string, Handler> &h, const std::string &name, CarrierComponentConfig Scenario::*band)
        {
            const std::string p = "band." + name + ".";
            h[p + "carrier_freq_hz"] = [band](Scenario &s, const Reader &r) { (s.*band).carrier_freq_hz = r.positive(); };
            h[p + "subcarrier_spacing_hz"] = [band](Scenario &s, const Reader &r) { (s.*band).subcarrier_spacing_hz = r.positive(); };
            h[p + "num_subcarriers"] = [band](Scenario &s, const Reader &r) { (s.*band).num_subcarriers = r.positive_int(); };
            h[p + "num_symbols"] = [band](Scenario &s, const Reader &r) { (s.*band).num_symbols = r.positive_int(); };
            const bool is_low = name == "low";
            h[p + "cp_length_samples"] = [band, is_low](Scenario &s, const Reader &r) {
                if (r.is("auto"))
                {
                    if (!is_low)
                        r.fail("only the low band CP can be derived automatically");
                    s.align_low_cp = true;
                    return;
                }
                double v = r.real();
                if (v < 0.0)
                    r.fail("CP length must be non-negative");
                (s.*band).cp_length_samples = v;
                if (is_low)
                    s.align_low_cp = false;
            };
        }

        const std::map<std::string, Handler> &handlers()
        {
            static const std::map<std::string, Handler> table = [] {
                std::map<std::string, Handler> h;
                h["scenario.name"] = [](Scenario &s, const Reader &r) { s.name = r.text(); };
                add_band(h, "low", &Scenario::low);
                add_band(h, "high", &Scenario::high);

                h["array.num_tx"] = [](Scenario &s, const Reader &r) { s.array.num_tx = r.positive_int(); };
                h["array.num_rx"] = [](Scenario &s, const Reader &r) { s.array.num_rx = r.positive_int(); };
                h["array.element_spacing_m"] = [](Scenario &s, const Reader &r) {
                    if (r.is("auto"))
                    {
                        s.array.element_spacing_m = 0.0;
                        s.spacing_wavelengths = 0.5;
                        s.spacing_reference = ShapeBand::high;
                        return;
                    }
                    s.array.element_spacing_m = r.positive();
                };
                h["array.element_spacing_wavelengths"] = [](Scenario &s, const Reader &r) {
                    s.spacing_wavelengths = r.positive();
                    s.array.element_spacing_m = 0.0;
                };
                h["array.spacing_reference"] = [](Scenario &s, const Reader &r) {
                    if (r.is("low"))
                        s.spacing_reference = ShapeBand::low;
                    else if (r.is("high"))
                        s.spacing_reference = ShapeBand::high;
                    else
                        r.fail("expected low or high");
                };

                h["sim.snr_db"] = [](Scenario &s, const Reader &r) { s.snr_grid_db = r.reals(); };
                h["sim.trials"] = [](Scenario &s, const Reader &r) { s.trials = r.positive_int(); };
                h["sim.seed"] = [](Scenario &s, const Reader &r) { s.master_seed = r.seed(); };
                h["sim.hf_snr_offset_db"] = [](Scenario &s, const Reader &r) { s.hf_snr_offset_db = r.real(); };
                h["sim.noiseless"] = [](Scenario &s, const Reader &r) { s.noiseless = r.boolean(); };
                h["sim.tx_steer_deg"] = [](Scenario &s, const Reader &r) {
                    if (r.is("none"))
                        s.tx_steer_rad.reset();
                    else
                        s.tx_steer_rad = deg2rad(r.real());
                };
                h["sim.methods"] = [](Scenario &s, const Reader &r) {
                    s.run_symbol_level = s.run_data_level = s.run_low_band = s.run_high_band = false;
                    for (const auto &m : split(r.text(), ','))
                    {
                        if (m == method_name(MethodTag::symbol_level))
                            s.run_symbol_level = true;
                        else if (m == method_name(MethodTag::data_level))
                            s.run_data_level = true;
                        else if (m == method_name(MethodTag::low_band))
                            s.run_low_band = true;
                        else if (m == method_name(MethodTag::high_band))
                            s.run_high_band = true;
                        else
                            r.fail("unknown method '" + m + "'");
                    }
                };

                h["grid.range_m"] = [](Scenario &s, const Reader &r) {
                    if (r.is("auto"))
                        s.range_grid.reset();
                    else
                        s.range_grid = r.grid();
                };
                h["grid.velocity_mps"] = [](Scenario &s, const Reader &r) {
                    if (r.is("auto"))
                        s.velocity_grid.reset();
                    else
                        s.velocity_grid = r.grid();
                };
                h["grid.angle_deg"] = [](Scenario &s, const Reader &r) {
                    auto v = r.reals();
                    if (v.size() != 3 || !(v[1] > v[0]) || !(v[2] > 0.0))
                        r.fail("angle grid must be 'min, max, step' with max > min and step > 0");
                    s.proc.angle_grid = {deg2rad(v[0]), deg2rad(v[1]), deg2rad(v[2])};
                };

                h["proc.regularization"] = [](Scenario &s, const Reader &r) {
                    if (r.is("auto"))
                        s.proc.regularization.reset();
                    else
                    {
                        double v = r.real();
                        if (v < 0.0)
                            r.fail("regularization must be non-negative");
                        s.proc.regularization = v;
                    }
                };
                h["proc.model_order"] = [](Scenario &s, const Reader &r) {
                    s.model_order_from_targets = r.is("targets");
                    if (r.is("auto") || r.is("targets"))
                        s.proc.model_order.reset();
                    else
                        s.proc.model_order = r.integer();
                };
                h["proc.snapshot_stride"] = [](Scenario &s, const Reader &r) { s.proc.snapshot_stride = r.positive_int(); };
                h["proc.omp_sparsity"] = [](Scenario &s, const Reader &r) { s.proc.omp_sparsity = r.positive_int(); };
                h["proc.omp_tolerance"] = [](Scenario &s, const Reader &r) { s.proc.omp_tolerance = r.positive(); };
                h["proc.data_level_shape"] = [](Scenario &s, const Reader &r) {
                    if (r.is("low"))
                        s.proc.data_level_shape = ShapeBand::low;
                    else if (r.is("high"))
                        s.proc.data_level_shape = ShapeBand::high;
                    else
                        r.fail("expected low or high");
                };

                h["mi.ue_antennas"] = [](Scenario &s, const Reader &r) { s.mi.ue_antennas = r.integers(); };
                h["mi.num_users"] = [](Scenario &s, const Reader &r) { s.mi.num_users = r.positive_int(); };
                h["mi.num_paths"] = [](Scenario &s, const Reader &r) { s.mi.num_paths = r.positive_int(); };
                h["mi.draws"] = [](Scenario &s, const Reader &r) { s.mi.draws = r.positive_int(); };
                h["mi.snr_db"] = [](Scenario &s, const Reader &r) { s.mi.snr_grid_db = r.reals(); };

                h["crlb.snr_db"] = [](Scenario &s, const Reader &r) { s.crlb.snr_grid_db = r.reals(); };
                h["crlb.angle_deg"] = [](Scenario &s, const Reader &r) { s.crlb.angle_rad = deg2rad(r.real()); };
                h["crlb.hf_snr_offset_db"] = [](Scenario &s, const Reader &r) { s.crlb.hf_snr_offset_db = r.real(); };

                h["bandwidth.total_subcarriers"] = [](Scenario &s, const Reader &r) { s.bandwidth.total_subcarriers = r.positive_int(); };
                h["bandwidth.n2_coefficient"] = [](Scenario &s, const Reader &r) { s.bandwidth.n2_coefficient = r.positive_int(); };
                h["bandwidth.n2_min"] = [](Scenario &s, const Reader &r) { s.bandwidth.n2_min = r.positive_int(); };
                h["bandwidth.n2_max"] = [](Scenario &s, const Reader &r) {
                    if (r.is("auto"))
                        s.bandwidth.n2_max.reset();
                    else
                        s.bandwidth.n2_max = r.positive_int();
                };
                h["bandwidth.snr_db"] = [](Scenario &s, const Reader &r) { s.bandwidth.snr_db = r.real(); };
                h["bandwidth.hf_snr_offset_db"] = [](Scenario &s, const Reader &r) { s.bandwidth.hf_snr_offset_db = r.real(); };
                h["bandwidth.num_rx"] = [](Scenario &s, const Reader &r) { s.bandwidth.num_rx = r.positive_int(); };
                h["bandwidth.num_symbols_low"] = [](Scenario &s, const Reader &r) { s.bandwidth.num_symbols_low = r.positive_int(); };
                h["bandwidth.num_symbols_high"] = [](Scenario &s, const Reader &r) { s.bandwidth.num_symbols_high = r.positive_int(); };
                h["bandwidth.symbol_duration_low_s"] = [](Scenario &s, const Reader &r) { s.bandwidth.symbol_duration_low_s = r.positive(); };
                h["bandwidth.symbol_duration_high_s"] = [](Scenario &s, const Reader &r) { s.bandwidth.symbol_duration_high_s = r.positive(); };
                h["bandwidth.element_spacing_wavelengths_high"] = [](Scenario &s, const Reader &r) {
                    s.bandwidth.element_spacing_wavelengths_high = r.positive();
                };
                return h;
            }();
            return table;
        }

        // target.<index>.<field>
        bool target_key(const std::string &key, int &index, std::string &field)
        {
            if (key.rfind("target.", 0) != 0)
                return false;
            const auto dot = key.find('.', 7);
            if (dot == std::string::npos)
                return false;
            const std::string idx = key.substr(7, dot - 7);
            auto [p, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), index);
            if (ec != std::errc() || p != idx.data() + idx.size() || index < 0)
                return false;
            field = key.substr(dot + 1);
            return true;
        }
    }

    Scenario parse_scenario(std::string_view text, std::string_view origin_view)
    {
        const std::string origin(origin_view);
        Scenario s = desk_base();
        s.origin = origin;

        std::map<std::string, Entry> entries;
        std::istringstream in{std::string(text)};
        std::string raw;
        int line_no = 0;
        while (std::getline(in, raw))
        {
            ++line_no;
            const auto hash = raw.find('#');
            const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw Error(Errc::config_parse, origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw Error(Errc::config_parse, origin + ":" + std::to_string(line_no) + ": empty key");
            auto [it, fresh] = entries.emplace(key, Entry{value, line_no});
            if (!fresh)
                throw Error(Errc::config_parse, origin + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                                                    "' (first set on line " + std::to_string(it->second.line) + ")");
        }

        // Apply in line order so messages follow the file.
        std::vector<std::pair<std::string, const Entry *>> ordered;
        for (const auto &[k, e] : entries)
            ordered.emplace_back(k, &e);
        std::sort(ordered.begin(), ordered.end(), [](const auto &a, const auto &b) { return a.second->line < b.second->line; });

        std::map<int, std::map<std::string, const Entry *>> target_fields;
        for (const auto &[key, e] : ordered)
        {
            Reader r(origin, *e);
            int idx = 0;
            std::string field;
            if (target_key(key, idx, field))
            {
                static const std::set<std::string> known{"range_m", "velocity_mps", "angle_deg", "rcs_variance"};
                if (!known.count(field))
                    r.fail("unknown key '" + key + "'");
                target_fields[idx][field] = e;
                continue;
            }
            const auto &h = handlers();
            auto it = h.find(key);
            if (it == h.end())
                r.fail("unknown key '" + key + "'");
            it->second(s, r);
        }

        if (!target_fields.empty())
        {
            s.targets.clear();
            int expect = 0;
            for (const auto &[idx, fields] : target_fields)
            {
                const Entry &first = *fields.begin()->second;
                Reader r0(origin, first);
                if (idx != expect)
                    r0.fail("target indices must run 0, 1, 2, ... without gaps (missing target." +
                            std::to_string(expect) + ")");
                ++expect;
                for (const char *req : {"range_m", "angle_deg"})
                    if (!fields.count(req))
                        r0.fail("target." + std::to_string(idx) + "." + req + " is required");
                TargetTruth t;
                t.range_m = Reader(origin, *fields.at("range_m")).positive();
                t.angle_rad = deg2rad(Reader(origin, *fields.at("angle_deg")).real());
                if (fields.count("velocity_mps"))
                    t.velocity_mps = Reader(origin, *fields.at("velocity_mps")).real();
                if (fields.count("rcs_variance"))
                    t.rcs_variance = Reader(origin, *fields.at("rcs_variance")).positive();
                if (!(std::abs(t.angle_rad) < kPi / 2.0))
                    Reader(origin, *fields.at("angle_deg")).fail("angle must lie strictly inside (-90, 90) degrees");
                s.targets.push_back(t);
            }
        }

        s.finalize();
        return s;
    }

    Scenario load_scenario(const std::string &path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw Error(Errc::io_error, "cannot open scenario file '" + path + "'");
        std::ostringstream buf;
        buf << f.rdbuf();
        return parse_scenario(buf.str(), path);
    }
}
