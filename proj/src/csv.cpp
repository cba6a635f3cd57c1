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

#include "caisac/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "caisac/common.hpp"

namespace caisac
{
    std::string format_number(double v)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        if (v == 0.0)
            return "0"; // folds -0
        char buf[64];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
        (void)ec;
        return std::string(buf, p);
    }

    std::string format_number(long long v)
    {
        char buf[32];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
        (void)ec;
        return std::string(buf, p);
    }

    std::string csv_escape(std::string_view field)
    {
        if (field.find_first_of(",\"\r\n") == std::string_view::npos)
            return std::string(field);
        std::string out = "\"";
        for (char c : field)
        {
            if (c == '"')
                out += '"';
            out += c;
        }
        out += '"';
        return out;
    }

    CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header))
    {
        if (header_.empty())
            throw Error(Errc::invalid_input, "CSV header is empty");
        for (std::size_t i = 0; i < header_.size(); ++i)
        {
            if (i)
                out_ += ',';
            out_ += csv_escape(header_[i]);
        }
        out_ += "\r\n";
    }

    void CsvWriter::row(const std::vector<std::string> &cells)
    {
        if (cells.size() != header_.size())
            throw Error(Errc::invalid_input, "CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                                 std::to_string(header_.size()));
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            if (i)
                out_ += ',';
            out_ += csv_escape(cells[i]);
        }
        out_ += "\r\n";
        ++rows_;
    }

    void CsvWriter::save(const std::string &path) const { write_text_file(path, out_); }

    void write_text_file(const std::string &path, std::string_view text)
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f)
            throw Error(Errc::io_error, "cannot open '" + path + "' for writing");
        f.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!f)
            throw Error(Errc::io_error, "write to '" + path + "' failed");
    }

    std::size_t CsvTable::column(std::string_view name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        throw Error(Errc::unknown_column, "no column named '" + std::string(name) + "'");
    }

    bool CsvTable::has_column(std::string_view name) const
    {
        for (const auto &h : header)
            if (h == name)
                return true;
        return false;
    }

    std::vector<std::string> CsvTable::text(std::string_view name) const
    {
        const std::size_t c = column(name);
        std::vector<std::string> v;
        v.reserve(rows.size());
        for (const auto &r : rows)
            v.push_back(c < r.size() ? r[c] : std::string());
        return v;
    }

    std::vector<double> CsvTable::numeric(std::string_view name) const
    {
        std::vector<double> v;
        for (const auto &s : text(name))
        {
            if (s == "nan")
                v.push_back(std::nan(""));
            else if (s == "inf")
                v.push_back(INFINITY);
            else if (s == "-inf")
                v.push_back(-INFINITY);
            else
            {
                double x = 0.0;
                auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
                if (ec != std::errc() || p != s.data() + s.size())
                    throw Error(Errc::invalid_input, "column '" + std::string(name) + "' holds non-numeric '" + s + "'");
                v.push_back(x);
            }
        }
        return v;
    }

    CsvTable parse_csv(std::string_view text)
    {
        std::vector<std::vector<std::string>> records;
        std::vector<std::string> rec;
        std::string field;
        bool quoted = false, any = false;
        std::size_t i = 0;
        auto end_record = [&] {
            rec.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(rec));
            rec.clear();
            any = false;
        };
        while (i < text.size())
        {
            const char c = text[i];
            if (quoted)
            {
                if (c == '"')
                {
                    if (i + 1 < text.size() && text[i + 1] == '"')
                    {
                        field += '"';
                        i += 2;
                        continue;
                    }
                    quoted = false;
                }
                else
                    field += c;
                ++i;
                continue;
            }
            if (c == '"' && field.empty())
            {
                quoted = true;
                any = true;
            }
            else if (c == ',')
            {
                rec.push_back(std::move(field));
                field.clear();
                any = true;
            }
            else if (c == '\r' || c == '\n')
            {
                if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
                    ++i;
                if (any || !field.empty() || !rec.empty())
                    end_record();
            }
            else
            {
                field += c;
                any = true;
            }
            ++i;
        }
        if (quoted)
            throw Error(Errc::invalid_input, "unterminated quoted CSV field");
        if (any || !field.empty() || !rec.empty())
            end_record();

        CsvTable t;
        if (records.empty())
            return t;
        t.header = std::move(records.front());
        for (std::size_t r = 1; r < records.size(); ++r)
        {
            if (records[r].size() != t.header.size())
                throw Error(Errc::invalid_input, "CSV record " + std::to_string(r + 1) + " has " +
                                                     std::to_string(records[r].size()) + " fields, header has " +
                                                     std::to_string(t.header.size()));
            t.rows.push_back(std::move(records[r]));
        }
        return t;
    }

    CsvTable load_csv(const std::string &path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw Error(Errc::io_error, "cannot open '" + path + "'");
        std::ostringstream buf;
        buf << f.rdbuf();
        return parse_csv(buf.str());
    }
}
