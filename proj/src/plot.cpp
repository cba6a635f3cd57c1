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

#include "caisac/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "caisac/common.hpp"

namespace caisac
{
    namespace
    {
        struct Series
        {
            std::string name;
            std::vector<std::pair<double, double>> pts;
        };

        std::string esc(const std::string &s)
        {
            std::string o;
            for (char c : s)
                switch (c)
                {
                case '&': o += "&amp;"; break;
                case '<': o += "&lt;"; break;
                case '>': o += "&gt;"; break;
                case '"': o += "&quot;"; break;
                default: o += c;
                }
            return o;
        }

        std::string fmt(double v, const char *f = "%.2f")
        {
            char b[64];
            std::snprintf(b, sizeof b, f, v);
            return b;
        }

        std::string tick_label(double v)
        {
            char b[64];
            std::snprintf(b, sizeof b, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
            return b;
        }

        double nice_step(double span)
        {
            const double raw = span / 5.0;
            const double p = std::pow(10.0, std::floor(std::log10(raw)));
            const double m = raw / p;
            return (m < 1.5 ? 1.0 : m < 3.5 ? 2.0 : m < 7.5 ? 5.0 : 10.0) * p;
        }

        struct Axis
        {
            double lo = 0.0, hi = 1.0;
            std::vector<double> ticks; // in axis units (log10 for log axes)
        };

        Axis linear_axis(double lo, double hi)
        {
            if (hi == lo)
            {
                const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
                lo -= pad;
                hi += pad;
            }
            const double step = nice_step(hi - lo);
            Axis a;
            a.lo = std::floor(lo / step) * step;
            a.hi = std::ceil(hi / step) * step;
            for (double t = a.lo; t <= a.hi + step * 1e-9; t += step)
                a.ticks.push_back(t);
            return a;
        }

        Axis log_axis(double lo, double hi) // lo, hi already log10
        {
            Axis a;
            a.lo = std::floor(lo);
            a.hi = std::ceil(hi);
            if (a.hi == a.lo)
                a.hi += 1.0;
            const double stride = std::max(1.0, std::ceil((a.hi - a.lo) / 8.0));
            for (double t = a.lo; t <= a.hi + 1e-9; t += stride)
                a.ticks.push_back(t);
            return a;
        }

        const char *kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    }

    std::string emit_plot(const CsvTable &table, const PlotSpec &spec, PlotRange *range_out)
    {
        if (table.rows.empty())
            throw Error(Errc::empty_plot, "CSV has no data rows");
        if (spec.y_columns.empty())
            throw Error(Errc::invalid_input, "plot needs at least one y column");
        const auto xs = table.numeric(spec.x_column);
        std::vector<std::vector<double>> ys;
        for (const auto &c : spec.y_columns)
            ys.push_back(table.numeric(c));
        std::vector<std::vector<std::string>> groups;
        for (const auto &g : spec.group_columns)
            groups.push_back(table.text(g));

        std::vector<Series> series;
        std::map<std::string, std::size_t> index;
        for (std::size_t r = 0; r < table.rows.size(); ++r)
        {
            std::string key;
            for (const auto &g : groups)
                key += (key.empty() ? "" : " ") + g[r];
            for (std::size_t k = 0; k < ys.size(); ++k)
            {
                std::string name = key;
                if (ys.size() > 1 || name.empty())
                    name += (name.empty() ? "" : " ") + spec.y_columns[k];
                const double x = xs[r], y = ys[k][r];
                if (!std::isfinite(x) || !std::isfinite(y) || (spec.log_y && !(y > 0.0)))
                    continue;
                auto [it, fresh] = index.emplace(name, series.size());
                if (fresh)
                    series.push_back({name, {}});
                series[it->second].pts.emplace_back(x, spec.log_y ? std::log10(y) : y);
            }
        }
        if (series.empty())
            throw Error(Errc::empty_plot, "no plottable points in the selected columns");

        double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
        for (auto &s : series)
        {
            std::stable_sort(s.pts.begin(), s.pts.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
            for (const auto &[x, y] : s.pts)
            {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
        }
        const Axis ax = linear_axis(x0, x1);
        const Axis ay = spec.log_y ? log_axis(y0, y1) : linear_axis(y0, y1);
        if (range_out)
            *range_out = {ax.lo, ax.hi, spec.log_y ? std::pow(10.0, ay.lo) : ay.lo, spec.log_y ? std::pow(10.0, ay.hi) : ay.hi};

        const double W = spec.width, H = spec.height;
        const double ml = 80, mr = 180, mt = 40, mb = 60;
        const double pw = W - ml - mr, ph = H - mt - mb;
        auto px = [&](double x) { return ml + (x - ax.lo) / (ax.hi - ax.lo) * pw; };
        auto py = [&](double y) { return mt + ph - (y - ay.lo) / (ay.hi - ay.lo) * ph; };

        std::string o;
        o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W, "%.0f") + "\" height=\"" + fmt(H, "%.0f") +
             "\" viewBox=\"0 0 " + fmt(W, "%.0f") + " " + fmt(H, "%.0f") + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
        o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        if (!spec.title.empty())
            o += "<text x=\"" + fmt(ml + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + esc(spec.title) + "</text>\n";

        // grid and ticks
        for (double t : ax.ticks)
        {
            const std::string X = fmt(px(t));
            o += "<line x1=\"" + X + "\" y1=\"" + fmt(mt) + "\" x2=\"" + X + "\" y2=\"" + fmt(mt + ph) + "\" stroke=\"#e0e0e0\"/>\n";
            o += "<text x=\"" + X + "\" y=\"" + fmt(mt + ph + 16) + "\" text-anchor=\"middle\">" + tick_label(t) + "</text>\n";
        }
        for (double t : ay.ticks)
        {
            const std::string Y = fmt(py(t));
            o += "<line x1=\"" + fmt(ml) + "\" y1=\"" + Y + "\" x2=\"" + fmt(ml + pw) + "\" y2=\"" + Y + "\" stroke=\"#e0e0e0\"/>\n";
            const std::string lab = spec.log_y ? "1e" + tick_label(t) : tick_label(t);
            o += "<text x=\"" + fmt(ml - 6) + "\" y=\"" + fmt(py(t) + 4) + "\" text-anchor=\"end\">" + lab + "</text>\n";
        }
        o += "<rect x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
             "\" fill=\"none\" stroke=\"black\"/>\n";

        std::string ylab = spec.y_label;
        if (ylab.empty())
            for (const auto &c : spec.y_columns)
                ylab += (ylab.empty() ? "" : ", ") + c;
        o += "<text x=\"" + fmt(ml + pw / 2) + "\" y=\"" + fmt(H - 16) + "\" text-anchor=\"middle\">" +
             esc(spec.x_label.empty() ? spec.x_column : spec.x_label) + "</text>\n";
        o += "<text transform=\"translate(18 " + fmt(mt + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
             esc(ylab + (spec.log_y ? " (log)" : "")) + "</text>\n";

        for (std::size_t i = 0; i < series.size(); ++i)
        {
            const char *col = kPalette[i % (sizeof kPalette / sizeof *kPalette)];
            std::string pts;
            for (const auto &[x, y] : series[i].pts)
                pts += (pts.empty() ? "" : " ") + fmt(px(x)) + "," + fmt(py(y));
            o += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
            for (const auto &[x, y] : series[i].pts)
                o += "<circle cx=\"" + fmt(px(x)) + "\" cy=\"" + fmt(py(y)) + "\" r=\"2\" fill=\"" + col + "\"/>\n";
            const double ly = mt + 10 + 18.0 * static_cast<double>(i);
            o += "<line x1=\"" + fmt(ml + pw + 12) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(ml + pw + 36) + "\" y2=\"" +
                 fmt(ly) + "\" stroke=\"" + col + "\" stroke-width=\"2\"/>\n";
            o += "<text x=\"" + fmt(ml + pw + 42) + "\" y=\"" + fmt(ly + 4) + "\">" + esc(series[i].name) + "</text>\n";
        }
        o += "</svg>\n";
        return o;
    }
}
