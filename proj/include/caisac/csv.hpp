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

#ifndef CAISAC_CSV_HPP
#define CAISAC_CSV_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace caisac
{
    /// Shortest text that reads back to the same double; "nan", "inf", "-inf" otherwise.
    std::string format_number(double v);
    std::string format_number(long long v);

    /// RFC 4180 field: quoted when it holds a comma, quote, CR or LF.
    std::string csv_escape(std::string_view field);

    class CsvWriter
    {
    public:
        explicit CsvWriter(std::vector<std::string> header);

        /// Throws invalid-input when the cell count differs from the header.
        void row(const std::vector<std::string> &cells);

        std::size_t num_rows() const { return rows_; }
        const std::vector<std::string> &header() const { return header_; }
        const std::string &str() const { return out_; }

        /// Writes the text verbatim (CRLF line ends per RFC 4180).
        void save(const std::string &path) const;

    private:
        std::vector<std::string> header_;
        std::string out_;
        std::size_t rows_ = 0;
    };

    struct CsvTable
    {
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;

        /// Column index; unknown-column error when absent.
        std::size_t column(std::string_view name) const;
        bool has_column(std::string_view name) const;
        std::vector<double> numeric(std::string_view name) const;
        std::vector<std::string> text(std::string_view name) const;
    };

    CsvTable parse_csv(std::string_view text);
    CsvTable load_csv(const std::string &path);

    void write_text_file(const std::string &path, std::string_view text);
}

#endif
