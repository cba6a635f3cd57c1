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

#ifndef CAISAC_PLOT_HPP
#define CAISAC_PLOT_HPP

#include <string>
#include <vector>

#include "caisac/csv.hpp"

namespace caisac
{
    struct PlotSpec
    {
        std::string x_column;
        std::vector<std::string> y_columns;
        // Series are split by the distinct values of these columns, in first-seen order.
        std::vector<std::string> group_columns;
        bool log_y = false;
        std::string title;
        std::string x_label; // default: x_column
        std::string y_label; // default: y columns joined
        int width = 720;
        int height = 480;
    };

    struct PlotRange
    {
        double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
    };

    /// Standalone SVG from CSV data only. Unknown columns raise unknown-column;
    /// a table without rows, or without any plottable (finite, and positive on
    /// a log axis) point, raises empty-plot.
    std::string emit_plot(const CsvTable &table, const PlotSpec &spec, PlotRange *range_out = nullptr);
}

#endif
