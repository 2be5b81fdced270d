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
#include "wss/spectral.hpp"
#include "wss/stattests.hpp"
#include "wss/synth.hpp"
#include "wss/trace.hpp"
#include "wss/trace_io.hpp"
#include "wss/windowing.hpp"

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace wss
{

using json = nlohmann::json;

struct InputConfig
{
    std::vector<std::string> files; // as written in the config
    std::vector<std::filesystem::path> resolved; // relative to the config file
    TraceFormat format = TraceFormat::canonical_csv;
    IngestOptions ingest;
    GapPolicy gap;
};

enum class GroupSource
{
    links,
    role
};

/// A named set of links analysed together. A role ensemble selects every
/// loaded link from tx_node to rx_node of the given kind.
struct GroupSpec
{
    std::string name;
    GroupSource source = GroupSource::links;
    std::vector<LinkId> links;
    std::string tx_node;
    std::string rx_node;
    LinkKind kind = LinkKind::body_to_body;
    bool ordered = true; // unordered keeps one direction per BAN pair
    Aggregation aggregation = Aggregation::median_across_links;
};

// ANOVA, Brown-Forsythe and K-S; Kruskal-Wallis is an opt-in cross-check.
inline std::vector<TestKind> default_run_tests()
{
    return {TestKind::anova, TestKind::brown_forsythe, TestKind::ks};
}

struct SweepConfig
{
    bool enabled = false;
    std::vector<double> window_lengths_ms;
    std::vector<double> alphas = {0.01, 0.05, 0.1};
    std::vector<TestKind> tests;
    std::size_t min_samples = 30;
    KsMode ks_mode = KsMode::automatic;
};

struct SpectralConfig
{
    bool enabled = false;
    std::vector<double> window_lengths_ms;
    SpectralParams params;
};

enum class Emit
{
    csv,
    json,
    both
};

struct RunConfig
{
    std::optional<InputConfig> input;
    std::vector<SynthSpec> synthetic;
    std::vector<GroupSpec> groups; // empty: one group per loaded link
    SweepConfig sweep;
    SpectralConfig spectral;
    std::filesystem::path output_dir = "wsstest-out";
    Emit emit = Emit::both;
    std::size_t threads = 0;
    json echo; // effective configuration, after flag overrides
};

// Named best/worst-case links for the hub-to-hub and hub-to-sensor roles.
inline const std::vector<std::pair<std::string, std::string>> &link_presets()
{
    static const std::vector<std::pair<std::string, std::string>> presets = {
        {"LH-LH:best", "LH7->LH5"},  {"LH-LH:worst", "LH2->LH9"},  {"LH-RA:best", "LH5->RA7"},
        {"LH-RA:worst", "LH2->RA1"}, {"LH-LW:best", "LH7->LW8"},   {"LH-LW:worst", "LH2->LW10"},
    };
    return presets;
}

inline LinkId preset_link(std::string_view name)
{
    for (const auto &[key, link] : link_presets())
        if (key == name)
            return parse_link_id(link);
    throw ConfigError("unknown link preset '" + std::string(name) + "'");
}

// "LH7->LH5" -> "LH7_to_LH5"; anything outside [A-Za-z0-9._-] becomes '_'.
inline std::string file_safe(std::string_view name)
{
    std::string out;
    for (std::size_t i = 0; i < name.size(); ++i)
    {
        if (name.substr(i, 2) == "->")
        {
            out += "_to_";
            ++i;
            continue;
        }
        const char c = name[i];
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-') ? c : '_';
    }
    return out;
}

namespace detail
{

inline void reject_unknown_keys(const json &obj, std::string_view where, std::initializer_list<std::string_view> known)
{
    if (!obj.is_object())
        throw ConfigError(std::string(where) + " must be an object");
    for (const auto &[key, _] : obj.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown key '" + key + "' in " + std::string(where));
}

template <class T>
T get(const json &obj, std::string_view key, std::string_view where)
{
    try
    {
        return obj.at(std::string(key)).get<T>();
    }
    catch (const json::exception &)
    {
        throw ConfigError(std::string(where) + "." + std::string(key) + " has the wrong type");
    }
}

template <class T>
T get_or(const json &obj, std::string_view key, std::string_view where, T fallback)
{
    return obj.contains(std::string(key)) ? get<T>(obj, key, where) : fallback;
}

inline std::size_t get_count(const json &obj, std::string_view key, std::string_view where, std::size_t fallback)
{
    if (!obj.contains(std::string(key)))
        return fallback;
    const auto &v = obj.at(std::string(key));
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(std::string(where) + "." + std::string(key) + " must be a non-negative integer");
    return v.get<std::size_t>();
}

inline std::vector<double> parse_lengths(const json &v, std::string_view where)
{
    std::vector<double> out;
    if (v.is_array())
    {
        for (const auto &x : v)
        {
            if (!x.is_number())
                throw ConfigError(std::string(where) + " must hold numbers (ms)");
            out.push_back(x.get<double>());
        }
    }
    else if (v.is_object())
    {
        reject_unknown_keys(v, where, {"start", "stop", "step"});
        const double start = get<double>(v, "start", where);
        const double stop = get<double>(v, "stop", where);
        const double step = get<double>(v, "step", where);
        if (!(step > 0.0) || !(stop >= start) || (stop - start) / step > 1e6)
            throw ConfigError(std::string(where) + " range needs step > 0 and stop >= start");
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
        for (std::size_t i = 0; i <= count; ++i)
            out.push_back(start + static_cast<double>(i) * step);
    }
    else
        throw ConfigError(std::string(where) + " must be a list of ms values or {start, stop, step}");
    if (out.empty())
        throw ConfigError(std::string(where) + " is empty");
    for (double l : out)
        if (!(l > 0.0) || !std::isfinite(l))
            throw ConfigError(std::string(where) + " values must be positive");
    return out;
}

inline FieldSource parse_field(const json &v, std::string_view where)
{
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0))
        return FieldSource::index(v.get<std::size_t>());
    if (v.is_string())
        return FieldSource::named(v.get<std::string>());
    if (v.is_object())
    {
        reject_unknown_keys(v, where, {"constant"});
        return FieldSource::fixed(get<std::string>(v, "constant", where));
    }
    throw ConfigError(std::string(where) + " must be a column index, a header name or {\"constant\": ...}");
}

inline DatasetLayout parse_layout(const json &v)
{
    reject_unknown_keys(v, "input.adapter", {"delimiter", "has_header", "time_scale_ms", "columns"});
    DatasetLayout layout;
    if (v.contains("delimiter"))
    {
        const auto d = get<std::string>(v, "delimiter", "input.adapter");
        if (d == "\\t" || d == "tab")
            layout.delimiter = '\t';
        else if (d.size() == 1)
            layout.delimiter = d[0];
        else
            throw ConfigError("input.adapter.delimiter must be a single character");
    }
    layout.has_header = get_or(v, "has_header", "input.adapter", layout.has_header);
    layout.time_scale_ms = get_or(v, "time_scale_ms", "input.adapter", layout.time_scale_ms);
    if (!(layout.time_scale_ms > 0.0))
        throw ConfigError("input.adapter.time_scale_ms must be positive");
    if (v.contains("columns"))
    {
        const auto &c = v.at("columns");
        reject_unknown_keys(c, "input.adapter.columns", {"time", "tx_ban", "tx_node", "rx_ban", "rx_node", "gain"});
        const auto field = [&](const char *key, FieldSource &dst) {
            if (c.contains(key))
                dst = parse_field(c.at(key), std::string("input.adapter.columns.") + key);
        };
        field("time", layout.time);
        field("tx_ban", layout.tx_ban);
        field("tx_node", layout.tx_node);
        field("rx_ban", layout.rx_ban);
        field("rx_node", layout.rx_node);
        field("gain", layout.gain);
    }
    return layout;
}

inline InputConfig parse_input(const json &v, const std::filesystem::path &base_dir)
{
    reject_unknown_keys(v, "input",
                        {"files", "format", "sample_interval_ms", "receive_floor_db", "nodes", "gap_policy", "adapter"});
    InputConfig in;
    in.files = get<std::vector<std::string>>(v, "files", "input");
    if (in.files.empty())
        throw ConfigError("input.files is empty");
    for (const auto &f : in.files)
    {
        const std::filesystem::path p(f);
        in.resolved.push_back(p.is_absolute() ? p : base_dir / p);
    }
    const auto format = get_or<std::string>(v, "format", "input", "canonical_csv");
    if (format == "canonical_csv")
        in.format = TraceFormat::canonical_csv;
    else if (format == "dataset_adapter")
        in.format = TraceFormat::dataset_adapter;
    else
        throw ConfigError("input.format must be canonical_csv or dataset_adapter, got '" + format + "'");
    in.ingest.sample_interval_ms = get_or(v, "sample_interval_ms", "input", in.ingest.sample_interval_ms);
    if (!(in.ingest.sample_interval_ms > 0.0))
        throw ConfigError("input.sample_interval_ms must be positive");
    in.ingest.receive_floor_db = get_or(v, "receive_floor_db", "input", in.ingest.receive_floor_db);
    in.ingest.node_vocabulary = get_or(v, "nodes", "input", in.ingest.node_vocabulary);
    if (v.contains("gap_policy"))
    {
        const auto &g = v.at("gap_policy");
        reject_unknown_keys(g, "input.gap_policy", {"mode", "max_gap"});
        const auto mode = get_or<std::string>(g, "mode", "input.gap_policy", "drop_window");
        if (mode == "drop_window")
            in.gap.mode = GapMode::drop_window;
        else if (mode == "hold_last")
            in.gap.mode = GapMode::hold_last;
        else if (mode == "linear_interpolate")
            in.gap.mode = GapMode::linear_interpolate;
        else
            throw ConfigError("input.gap_policy.mode must be drop_window, hold_last or linear_interpolate");
        in.gap.max_gap = get_count(g, "max_gap", "input.gap_policy", 0);
    }
    if (v.contains("adapter"))
        in.ingest.layout = parse_layout(v.at("adapter"));
    return in;
}

inline SynthSpec parse_synth(const json &v, std::size_t index)
{
    const std::string where = "synthetic[" + std::to_string(index) + "]";
    reject_unknown_keys(v, where, {"kind", "duration_ms", "sample_interval_ms", "seed", "link", "params"});
    SynthSpec s;
    s.kind = parse_synth_kind(get<std::string>(v, "kind", where));
    s.duration_ms = get_or(v, "duration_ms", where, s.duration_ms);
    s.sample_interval_ms = get_or(v, "sample_interval_ms", where, s.sample_interval_ms);
    s.seed = get_or<std::uint64_t>(v, "seed", where, index + 1);
    s.link = v.contains("link") ? parse_link_id(get<std::string>(v, "link", where))
                                : LinkId{"LH", 1, "LH", static_cast<int>(index) + 2};
    if (v.contains("params"))
    {
        const auto &p = v.at("params");
        const std::string pw = where + ".params";
        reject_unknown_keys(p, pw,
                            {"mean_db", "std_db", "alt_std_db", "ar_coefficient", "step_period_ms", "step_db",
                             "chirp_start_hz", "chirp_end_hz", "walk_std_db"});
        auto &q = s.params;
        q.mean_db = get_or(p, "mean_db", pw, q.mean_db);
        q.std_db = get_or(p, "std_db", pw, q.std_db);
        q.alt_std_db = get_or(p, "alt_std_db", pw, q.alt_std_db);
        q.ar_coefficient = get_or(p, "ar_coefficient", pw, q.ar_coefficient);
        q.step_period_ms = get_or(p, "step_period_ms", pw, q.step_period_ms);
        q.step_db = get_or(p, "step_db", pw, q.step_db);
        q.chirp_start_hz = get_or(p, "chirp_start_hz", pw, q.chirp_start_hz);
        q.chirp_end_hz = get_or(p, "chirp_end_hz", pw, q.chirp_end_hz);
        q.walk_std_db = get_or(p, "walk_std_db", pw, q.walk_std_db);
    }
    try
    {
        validate(s);
    }
    catch (const ParameterError &e)
    {
        throw ConfigError(where + ": " + e.what());
    }
    return s;
}

inline GroupSpec parse_group(const json &v, std::size_t index)
{
    const std::string where = "groups[" + std::to_string(index) + "]";
    reject_unknown_keys(v, where, {"name", "preset", "links", "role", "kind", "enumeration", "aggregation"});
    GroupSpec g;
    const int sources = v.contains("preset") + v.contains("links") + v.contains("role");
    if (sources != 1)
        throw ConfigError(where + " needs exactly one of preset, links or role");
    if (v.contains("preset"))
    {
        const auto preset = get<std::string>(v, "preset", where);
        g.links = {preset_link(preset)};
        g.name = preset;
    }
    else if (v.contains("links"))
    {
        for (const auto &l : get<std::vector<std::string>>(v, "links", where))
            g.links.push_back(parse_link_id(l));
        if (g.links.empty())
            throw ConfigError(where + ".links is empty");
        g.name = g.links.size() == 1 ? g.links[0].to_string() : "group" + std::to_string(index + 1);
    }
    else
    {
        g.source = GroupSource::role;
        const auto role = get<std::string>(v, "role", where);
        const auto dash = role.find('-');
        if (dash == std::string::npos || dash == 0 || dash + 1 == role.size())
            throw ConfigError(where + ".role must look like LH-RA");
        g.tx_node = role.substr(0, dash);
        g.rx_node = role.substr(dash + 1);
        const auto kind = get_or<std::string>(v, "kind", where, "body_to_body");
        if (kind == "on_body")
            g.kind = LinkKind::on_body;
        else if (kind != "body_to_body")
            throw ConfigError(where + ".kind must be body_to_body or on_body");
        const auto enumeration = get_or<std::string>(v, "enumeration", where, "ordered");
        if (enumeration == "unordered")
            g.ordered = false;
        else if (enumeration != "ordered")
            throw ConfigError(where + ".enumeration must be ordered or unordered");
        g.name = role + (g.kind == LinkKind::on_body ? "_on-body" : "");
    }
    if (v.contains("role") == false && (v.contains("kind") || v.contains("enumeration")))
        throw ConfigError(where + ": kind and enumeration apply only to role groups");
    g.name = get_or(v, "name", where, g.name);
    if (g.name.empty())
        throw ConfigError(where + ".name is empty");
    if (v.contains("aggregation"))
        g.aggregation = parse_aggregation(get<std::string>(v, "aggregation", where));
    if (g.aggregation == Aggregation::single_link && (g.source == GroupSource::role || g.links.size() != 1))
        throw ConfigError(where + ": single_link aggregation needs exactly one link");
    return g;
}

inline void check_multiple(double value_ms, double unit_ms, std::string_view what)
{
    const double ratio = value_ms / unit_ms;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio) || std::round(ratio) < 1.0)
        throw ConfigError(std::string(what) + " " + format_number(value_ms) + " ms is not a whole number of " +
                          format_number(unit_ms) + " ms samples");
}

} // namespace detail

/// Builds a RunConfig from a parsed document. Relative input paths resolve
/// against base_dir (the config file's directory).
inline RunConfig parse_config(const json &doc, const std::filesystem::path &base_dir = {})
{
    using namespace detail;
    reject_unknown_keys(doc, "config", {"input", "synthetic", "groups", "sweep", "spectral", "output", "threads"});
    RunConfig cfg;
    cfg.echo = doc;

    if (doc.contains("input") == doc.contains("synthetic"))
        throw ConfigError("config needs exactly one of 'input' (trace files) or 'synthetic' (generated traces)");
    if (doc.contains("input"))
        cfg.input = parse_input(doc.at("input"), base_dir);
    else
    {
        const auto &list = doc.at("synthetic");
        if (!list.is_array() || list.empty())
            throw ConfigError("synthetic must be a non-empty list");
        std::set<LinkId> seen;
        for (std::size_t i = 0; i < list.size(); ++i)
        {
            cfg.synthetic.push_back(parse_synth(list[i], i));
            if (!seen.insert(cfg.synthetic.back().link).second)
                throw ConfigError("synthetic[" + std::to_string(i) + "] repeats link " +
                                  cfg.synthetic.back().link.to_string());
        }
    }

    if (doc.contains("groups"))
    {
        const auto &list = doc.at("groups");
        if (!list.is_array())
            throw ConfigError("groups must be a list");
        std::set<std::string> names;
        for (std::size_t i = 0; i < list.size(); ++i)
        {
            cfg.groups.push_back(parse_group(list[i], i));
            if (!names.insert(file_safe(cfg.groups.back().name)).second)
                throw ConfigError("duplicate group name '" + cfg.groups.back().name + "'");
        }
    }

    if (doc.contains("sweep"))
    {
        const auto &s = doc.at("sweep");
        reject_unknown_keys(s, "sweep", {"L_ms", "alphas", "tests", "min_samples", "ks_mode"});
        cfg.sweep.window_lengths_ms = s.contains("L_ms") ? parse_lengths(s.at("L_ms"), "sweep.L_ms")
                                                          : default_window_lengths();
        cfg.sweep.alphas = get_or(s, "alphas", "sweep", cfg.sweep.alphas);
        if (cfg.sweep.alphas.empty())
            throw ConfigError("sweep.alphas is empty");
        for (double a : cfg.sweep.alphas)
            if (!(a >= 0.0 && a <= 1.0))
                throw ConfigError("sweep.alphas must lie in [0, 1], got " + format_number(a));
        if (s.contains("tests"))
            for (const auto &t : get<std::vector<std::string>>(s, "tests", "sweep"))
                cfg.sweep.tests.push_back(parse_test_kind(t));
        else
            cfg.sweep.tests = default_run_tests();
        cfg.sweep.min_samples = get_count(s, "min_samples", "sweep", cfg.sweep.min_samples);
        if (cfg.sweep.min_samples == 0)
            throw ConfigError("sweep.min_samples must be at least 1");
        if (s.contains("ks_mode"))
            cfg.sweep.ks_mode = parse_ks_mode(get<std::string>(s, "ks_mode", "sweep"));
        cfg.sweep.enabled = !cfg.sweep.tests.empty();
    }

    if (doc.contains("spectral"))
    {
        const auto &s = doc.at("spectral");
        reject_unknown_keys(s, "spectral", {"L_ms", "nw", "k", "taper"});
        cfg.spectral.enabled = true;
        cfg.spectral.window_lengths_ms = s.contains("L_ms") ? parse_lengths(s.at("L_ms"), "spectral.L_ms")
                                                             : std::vector<double>{5000, 10000};
        cfg.spectral.params.nw = get_or(s, "nw", "spectral", cfg.spectral.params.nw);
        cfg.spectral.params.k = get_count(s, "k", "spectral", cfg.spectral.params.k);
        const auto taper = get_or<std::string>(s, "taper", "spectral", "dpss");
        if (taper == "boxcar")
            cfg.spectral.params.taper = TaperKind::boxcar;
        else if (taper != "dpss")
            throw ConfigError("spectral.taper must be dpss or boxcar");
        const auto &p = cfg.spectral.params;
        if (p.taper == TaperKind::dpss &&
            (!(p.nw >= 1.0) || p.k < 1 || static_cast<double>(p.k) > 2.0 * p.nw - 1.0))
            throw ConfigError("spectral needs nw >= 1 and 1 <= k <= 2 nw - 1");
    }

    if (!cfg.sweep.enabled && !cfg.spectral.enabled)
        throw ConfigError("nothing to do: enable at least one test in 'sweep' or add a 'spectral' section");

    if (doc.contains("output"))
    {
        const auto &o = doc.at("output");
        reject_unknown_keys(o, "output", {"dir", "emit"});
        // Relative to the working directory; input files are relative to the config.
        if (o.contains("dir"))
            cfg.output_dir = get<std::string>(o, "dir", "output");
        const auto emit = get_or<std::string>(o, "emit", "output", "both");
        if (emit == "csv")
            cfg.emit = Emit::csv;
        else if (emit == "json")
            cfg.emit = Emit::json;
        else if (emit != "both")
            throw ConfigError("output.emit must be csv, json or both");
    }
    cfg.threads = get_count(doc, "threads", "config", 0);

    // Every window length must map onto whole samples for every input.
    std::vector<double> intervals;
    if (cfg.input)
        intervals.push_back(cfg.input->ingest.sample_interval_ms);
    for (const auto &s : cfg.synthetic)
        intervals.push_back(s.sample_interval_ms);
    for (double dt : intervals)
    {
        if (cfg.sweep.enabled)
            for (double l : cfg.sweep.window_lengths_ms)
                check_multiple(l / 2.0, dt, "sweep interval L/2 for L =");
        if (cfg.spectral.enabled)
            for (double l : cfg.spectral.window_lengths_ms)
                check_multiple(l, dt, "spectral window");
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    json doc;
    try
    {
        doc = json::parse(in, nullptr, true, true);
    }
    catch (const json::parse_error &e)
    {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(doc, path.parent_path());
}

/// Command-line overrides, applied to the document before parsing so that the
/// echoed config reflects what actually ran.
struct Overrides
{
    std::optional<std::string> input;
    std::optional<std::string> format;
    std::optional<std::string> out;
    std::optional<std::string> tests;
    std::optional<std::string> alphas;
    std::optional<std::string> window_lengths;
    std::optional<std::size_t> min_samples;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> spectral;
    std::optional<std::size_t> threads;
};

namespace detail
{

inline std::vector<std::string> split_list(std::string_view text)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size())
    {
        const auto comma = text.find(',', start);
        const auto piece = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!piece.empty())
            out.emplace_back(piece);
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

inline double parse_flag_number(const std::string &text, std::string_view flag)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError(std::string(flag) + ": '" + text + "' is not a number");
    return v;
}

// "3000,5000" or "100:100000:100".
inline json parse_lengths_flag(const std::string &text, std::string_view flag)
{
    if (text.find(':') != std::string::npos)
    {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');)
            parts.push_back(p);
        if (parts.size() != 3)
            throw ConfigError(std::string(flag) + " range must be start:stop:step");
        return json{{"start", parse_flag_number(parts[0], flag)},
                    {"stop", parse_flag_number(parts[1], flag)},
                    {"step", parse_flag_number(parts[2], flag)}};
    }
    json list = json::array();
    for (const auto &p : split_list(text))
        list.push_back(parse_flag_number(p, flag));
    return list;
}

} // namespace detail

inline void apply_overrides(json &doc, const Overrides &o)
{
    using namespace detail;
    if (!doc.is_object())
        doc = json::object();
    if (o.input)
    {
        doc.erase("synthetic");
        doc["input"]["files"] = json::array({*o.input});
    }
    if (o.format)
        doc["input"]["format"] = *o.format;
    if (o.out)
        doc["output"]["dir"] = *o.out;
    if (o.tests)
        doc["sweep"]["tests"] = split_list(*o.tests);
    if (o.alphas)
    {
        json list = json::array();
        for (const auto &a : split_list(*o.alphas))
            list.push_back(parse_flag_number(a, "--alphas"));
        doc["sweep"]["alphas"] = list;
    }
    if (o.window_lengths)
        doc["sweep"]["L_ms"] = parse_lengths_flag(*o.window_lengths, "--L");
    if (o.min_samples)
        doc["sweep"]["min_samples"] = *o.min_samples;
    if (o.seed)
    {
        if (!doc.contains("synthetic") || !doc["synthetic"].is_array())
            throw ConfigError("--seed applies only to synthetic inputs");
        // Spec i gets seed + i so ensembles stay distinct.
        std::uint64_t s = *o.seed;
        for (auto &spec : doc["synthetic"])
            spec["seed"] = s++;
    }
    if (o.spectral)
    {
        if (*o.spectral == "off")
            doc.erase("spectral");
        else
            doc["spectral"]["L_ms"] = parse_lengths_flag(*o.spectral, "--spectral");
    }
    if (o.threads)
        doc["threads"] = *o.threads;
}

} // namespace wss
