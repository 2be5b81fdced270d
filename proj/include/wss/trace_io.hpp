// SPDX-License-Identifier: Apache-2.0
//
// wsstest: windowed stationarity testing for channel-gain traces
// Copyright (C) 2026 The wsstest authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "wss/error.hpp"
#include "wss/format.hpp"
#include "wss/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wss
{

enum class TraceFormat
{
    canonical_csv,
    dataset_adapter
};

inline constexpr std::string_view canonical_header = "time_ms,tx_ban,tx_node,rx_ban,rx_node,gain_db";

/// Where a dataset field comes from: a column (by 0-based index or header
/// name) or a constant shared by every row.
struct FieldSource
{
    std::variant<std::size_t, std::string> column = std::size_t{0};
    std::optional<std::string> constant;

    static FieldSource index(std::size_t i) { return FieldSource{i, std::nullopt}; }
    static FieldSource named(std::string name) { return FieldSource{std::move(name), std::nullopt}; }
    static FieldSource fixed(std::string value) { return FieldSource{std::size_t{0}, std::move(value)}; }
};

/// Column mapping for raw dataset files. Times are multiplied by
/// time_scale_ms (e.g. 1000 for seconds); BAN fields may carry a "BAN" prefix.
struct DatasetLayout
{
    char delimiter = ',';
    bool has_header = true;
    FieldSource time = FieldSource::named("time_ms");
    FieldSource tx_ban = FieldSource::named("tx_ban");
    FieldSource tx_node = FieldSource::named("tx_node");
    FieldSource rx_ban = FieldSource::named("rx_ban");
    FieldSource rx_node = FieldSource::named("rx_node");
    FieldSource gain = FieldSource::named("gain_db");
    double time_scale_ms = 1.0;
};

struct IngestOptions
{
    double sample_interval_ms = 50.0;
    double receive_floor_db = -100.0; // gains <= floor are dropouts
    std::vector<std::string> node_vocabulary = {"LH", "RA", "LW"};
    std::optional<LinkId> link_filter;
    DatasetLayout layout;
};

namespace detail
{

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split_row(std::string_view line, char delimiter)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = line.find(delimiter, start);
        fields.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return fields;
}

inline std::optional<double> to_double(std::string text)
{
    // U+2212 MINUS SIGN shows up in hand-edited files.
    if (text.rfind("\xE2\x88\x92", 0) == 0)
        text.replace(0, 3, "-");
    std::string_view s = text;
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty())
        return std::nullopt;
    return value;
}

inline std::optional<int> to_ban(std::string_view text)
{
    if (text.size() > 3 && (text.substr(0, 3) == "BAN" || text.substr(0, 3) == "ban" || text.substr(0, 3) == "Ban"))
        text.remove_prefix(3);
    int value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty() || value < 1)
        return std::nullopt;
    return value;
}

struct RawRow
{
    double time_ms;
    double gain_db;
    std::size_t line;
};

struct ResolvedLayout
{
    std::optional<std::size_t> time, tx_ban, tx_node, rx_ban, rx_node, gain;
};

inline std::optional<std::size_t> resolve_column(const FieldSource &src, const std::vector<std::string> &header,
                                                 std::string_view field)
{
    if (src.constant)
        return std::nullopt;
    if (const auto *idx = std::get_if<std::size_t>(&src.column))
        return *idx;
    const auto &name = std::get<std::string>(src.column);
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw ConfigError("dataset layout: column '" + name + "' for field " + std::string(field) +
                          " not found in header");
    return static_cast<std::size_t>(it - header.begin());
}

} // namespace detail

/// Reads channel-gain rows and rebuilds one uniform-grid trace per link.
///
/// Grid points absent from the file and rows at or below the receive floor
/// become missing samples. Traces are returned sorted by LinkId.
inline std::vector<ChannelTrace> parse_trace(std::istream &in, TraceFormat format, const IngestOptions &options = {})
{
    if (!(options.sample_interval_ms > 0.0))
        throw ConfigError("sample interval must be positive");

    DatasetLayout layout = format == TraceFormat::canonical_csv ? DatasetLayout{} : options.layout;

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    if (format == TraceFormat::canonical_csv || layout.has_header)
    {
        if (!std::getline(in, line))
            throw ParseError(1, "missing header");
        ++line_no;
        if (line.rfind("\xEF\xBB\xBF", 0) == 0)
            line.erase(0, 3);
        if (format == TraceFormat::canonical_csv && detail::trim(line) != canonical_header)
            throw ParseError(1, "expected header '" + std::string(canonical_header) + "'");
        header = detail::split_row(line, layout.delimiter);
    }

    const detail::ResolvedLayout cols{detail::resolve_column(layout.time, header, "time"),
                                      detail::resolve_column(layout.tx_ban, header, "tx_ban"),
                                      detail::resolve_column(layout.tx_node, header, "tx_node"),
                                      detail::resolve_column(layout.rx_ban, header, "rx_ban"),
                                      detail::resolve_column(layout.rx_node, header, "rx_node"),
                                      detail::resolve_column(layout.gain, header, "gain")};

    const auto field = [&](const std::vector<std::string> &row, const std::optional<std::size_t> &col,
                           const FieldSource &src, std::string_view name) -> std::string {
        if (src.constant)
            return *src.constant;
        if (*col >= row.size())
            throw ParseError(line_no, "missing column for " + std::string(name));
        return row[*col];
    };

    const auto known_node = [&](const std::string &node) {
        return std::find(options.node_vocabulary.begin(), options.node_vocabulary.end(), node) !=
               options.node_vocabulary.end();
    };

    std::map<LinkId, std::vector<detail::RawRow>> rows;
    while (std::getline(in, line))
    {
        ++line_no;
        if (detail::trim(line).empty())
            continue;
        const auto row = detail::split_row(line, layout.delimiter);

        const auto time = detail::to_double(field(row, cols.time, layout.time, "time"));
        if (!time || !std::isfinite(*time))
            throw ParseError(line_no, "invalid time value");
        const auto tx_ban = detail::to_ban(field(row, cols.tx_ban, layout.tx_ban, "tx_ban"));
        const auto rx_ban = detail::to_ban(field(row, cols.rx_ban, layout.rx_ban, "rx_ban"));
        if (!tx_ban || !rx_ban)
            throw ParseError(line_no, "invalid BAN index");
        const auto gain_text = field(row, cols.gain, layout.gain, "gain");
        const auto gain = detail::to_double(gain_text);
        if (!gain || std::isinf(*gain))
            throw ParseError(line_no, "invalid gain value '" + gain_text + "'");

        LinkId link{field(row, cols.tx_node, layout.tx_node, "tx_node"), *tx_ban,
                    field(row, cols.rx_node, layout.rx_node, "rx_node"), *rx_ban};
        if (!known_node(link.tx_node) || !known_node(link.rx_node))
            throw ConfigError("line " + std::to_string(line_no) + ": unknown node label in link " + link.to_string());
        if (options.link_filter && link != *options.link_filter)
            continue;
        rows[link].push_back({*time * layout.time_scale_ms, *gain, line_no});
    }

    if (rows.empty())
        throw EmptyResultError(options.link_filter ? "no rows for link " + options.link_filter->to_string()
                                                   : std::string("no data rows"));

    const double dt = options.sample_interval_ms;
    std::vector<ChannelTrace> traces;
    traces.reserve(rows.size());
    for (auto &[link, link_rows] : rows)
    {
        const double t0 = link_rows.front().time_ms;
        std::vector<std::pair<std::size_t, const detail::RawRow *>> placed;
        placed.reserve(link_rows.size());
        for (const auto &r : link_rows)
        {
            const double offset = (r.time_ms - t0) / dt;
            const double idx = std::round(offset);
            if (std::abs(offset - idx) > 0.25)
                throw ParseError(r.line, "time " + format_number(r.time_ms) + " ms is off the " + format_number(dt) +
                                             " ms sampling grid");
            if (idx < 0.0 || (!placed.empty() && static_cast<std::size_t>(idx) <= placed.back().first))
                throw ParseError(r.line, "rows for link " + link.to_string() + " not strictly increasing in time");
            placed.emplace_back(static_cast<std::size_t>(idx), &r);
        }
        const std::size_t n = placed.back().first + 1;
        std::vector<double> gains(n, std::numeric_limits<double>::quiet_NaN());
        std::vector<SampleState> states(n, SampleState::missing);
        for (const auto &[idx, r] : placed)
        {
            if (std::isnan(r->gain_db) || r->gain_db <= options.receive_floor_db)
                continue;
            gains[idx] = r->gain_db;
            states[idx] = SampleState::observed;
        }
        traces.emplace_back(link, SamplingSpec{dt, t0}, std::move(gains), std::move(states));
    }
    return traces;
}

inline std::vector<ChannelTrace> parse_trace(const std::string &path, TraceFormat format,
                                             const IngestOptions &options = {})
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open trace file '" + path + "'");
    try
    {
        return parse_trace(in, format, options);
    }
    catch (const ParseError &e)
    {
        throw ParseError(e.line(), std::string(path) + ": " +
                                       std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
    }
}

/// Writes traces in canonical format. Only observed samples are emitted, so
/// parse(write(t)) == t for any trace that has not been regularized.
inline void write_canonical(std::ostream &out, std::span<const ChannelTrace> traces)
{
    out << canonical_header << '\n';
    for (const auto &trace : traces)
    {
        const auto &link = trace.link();
        for (std::size_t i = 0; i < trace.size(); ++i)
        {
            if (!trace.is_valid(i))
                continue;
            out << format_number(trace.time_ms(i)) << ',' << link.tx_ban << ',' << link.tx_node << ',' << link.rx_ban
                << ',' << link.rx_node << ',' << format_number(trace.gains()[i]) << '\n';
        }
    }
}

inline std::string to_canonical_csv(std::span<const ChannelTrace> traces)
{
    std::ostringstream out;
    write_canonical(out, traces);
    return out.str();
}

} // namespace wss
