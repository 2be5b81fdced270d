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

#include "wss/config.hpp"
#include "wss/error.hpp"
#include "wss/format.hpp"
#include "wss/parallel.hpp"
#include "wss/spectral.hpp"
#include "wss/synth.hpp"
#include "wss/trace.hpp"
#include "wss/trace_io.hpp"
#include "wss/windowing.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace wss
{

inline constexpr std::string_view tool_name = "wsstest";
inline constexpr std::string_view tool_version = "0.1.0";

// Window lengths below this are flagged as under the 30-samples-per-interval bar at 20 Hz.
inline constexpr double reliability_threshold_ms = 3000.0;

struct GroupProfile
{
    std::string name;
    std::vector<LinkId> links;
    StationarityProfile profile;
};

struct SpectralEntry
{
    LinkId link;
    SpectralVariationResult result;
};

struct ExcludedEntry
{
    std::string analysis; // "sweep" or "spectral"
    std::string scope;    // group name or link
    double window_length_ms = 0.0;
    std::string reason;
};

struct InputDigest
{
    std::string source;
    std::string sha256;
};

struct Provenance
{
    std::string tool_version;
    json config;
    std::string config_sha256;
    std::vector<InputDigest> inputs;
    std::string payload_sha256; // over the report with this field left out
};

struct RunReport
{
    std::vector<GroupProfile> profiles;
    std::vector<SpectralEntry> spectral;
    std::vector<ExcludedEntry> excluded;
    std::vector<std::string> warnings;
    Provenance provenance;
};

inline std::string sha256_hex(std::string_view data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCategory::analysis, "SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i)
    {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

namespace detail
{

inline std::string read_bytes(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open trace file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Rethrows e in the same exit-code category with a context prefix.
[[noreturn]] inline void rethrow_with_context(const Error &e, const std::string &context)
{
    const std::string what = context + ": " + e.what();
    switch (e.category())
    {
    case ErrorCategory::config: throw ConfigError(what);
    case ErrorCategory::input: throw InputError(what);
    case ErrorCategory::analysis: throw AnalysisError(what);
    }
    throw Error(e.category(), what);
}

struct LoadedInputs
{
    std::vector<ChannelTrace> traces; // sorted by link
    std::vector<InputDigest> digests;
};

inline LoadedInputs load_inputs(const RunConfig &cfg)
{
    LoadedInputs out;
    std::map<LinkId, ChannelTrace> by_link;
    const auto add = [&](ChannelTrace t, const std::string &source) {
        const auto link = t.link();
        if (!by_link.emplace(link, std::move(t)).second)
            throw InputError(source + ": link " + link.to_string() + " already loaded from another input");
    };

    if (cfg.input)
    {
        const auto &in = *cfg.input;
        for (std::size_t i = 0; i < in.files.size(); ++i)
        {
            const std::string bytes = read_bytes(in.resolved[i]);
            out.digests.push_back({in.files[i], sha256_hex(bytes)});
            std::istringstream stream(bytes);
            std::vector<ChannelTrace> traces;
            try
            {
                traces = parse_trace(stream, in.format, in.ingest);
            }
            catch (const ParseError &e)
            {
                throw ParseError(e.line(), in.files[i] + ": " +
                                               std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
            }
            catch (const Error &e)
            {
                rethrow_with_context(e, in.files[i]);
            }
            for (auto &t : traces)
            {
                try
                {
                    add(regularize(t, in.gap), in.files[i]);
                }
                catch (const InputError &e)
                {
                    rethrow_with_context(e, in.files[i]);
                }
            }
        }
    }
    for (std::size_t i = 0; i < cfg.synthetic.size(); ++i)
    {
        auto result = generate(cfg.synthetic[i]);
        const std::string source = "synthetic[" + std::to_string(i) + "]";
        const std::vector<ChannelTrace> one{result.trace};
        out.digests.push_back({source, sha256_hex(to_canonical_csv(one))});
        add(std::move(result.trace), source);
    }
    for (auto &[_, t] : by_link)
        out.traces.push_back(std::move(t));
    return out;
}

struct ResolvedGroup
{
    std::string name;
    std::vector<std::size_t> members; // indices into the loaded traces
    Aggregation aggregation = Aggregation::single_link;
};

inline std::vector<ResolvedGroup> resolve_groups(const RunConfig &cfg, const std::vector<ChannelTrace> &traces)
{
    std::vector<ResolvedGroup> out;
    if (cfg.groups.empty())
    {
        for (std::size_t i = 0; i < traces.size(); ++i)
            out.push_back({traces[i].link().to_string(), {i}, Aggregation::single_link});
        return out;
    }
    const auto find = [&](const LinkId &l) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < traces.size(); ++i)
            if (traces[i].link() == l)
                return i;
        return std::nullopt;
    };
    for (const auto &g : cfg.groups)
    {
        ResolvedGroup r{g.name, {}, g.aggregation};
        if (g.source == GroupSource::links)
        {
            for (const auto &l : g.links)
            {
                const auto idx = find(l);
                if (!idx)
                    throw EmptyResultError("group " + g.name + ": link " + l.to_string() +
                                           " is not present in the loaded traces");
                if (std::find(r.members.begin(), r.members.end(), *idx) == r.members.end())
                    r.members.push_back(*idx);
            }
        }
        else
        {
            for (std::size_t i = 0; i < traces.size(); ++i)
            {
                const auto &l = traces[i].link();
                if (l.tx_node != g.tx_node || l.rx_node != g.rx_node || l.kind() != g.kind)
                    continue;
                // Unordered: keep tx_ban < rx_ban, or the reverse only when its mirror is absent.
                if (!g.ordered && l.tx_ban > l.rx_ban && find(LinkId{l.tx_node, l.rx_ban, l.rx_node, l.tx_ban}))
                    continue;
                r.members.push_back(i);
            }
            if (r.members.empty())
                throw EmptyResultError("group " + g.name + ": no loaded link matches role " + g.tx_node + "-" +
                                       g.rx_node);
        }
        if (r.members.size() == 1 && r.aggregation == Aggregation::median_across_links)
            r.aggregation = Aggregation::single_link;
        out.push_back(std::move(r));
    }
    return out;
}

inline json cell_json(const ProfileCell &c)
{
    return json{{"L_ms", c.window_length_ms}, {"test", to_string(c.test)},       {"alpha", c.alpha},
                {"gamma", c.gamma},           {"n_comparisons", c.n_comparisons}, {"n_skipped", c.n_skipped}};
}

inline json profiles_json(const RunReport &r)
{
    json out = json::array();
    for (const auto &g : r.profiles)
    {
        json links = json::array();
        for (const auto &l : g.links)
            links.push_back(l.to_string());
        json tests = json::array();
        for (auto t : g.profile.tests)
            tests.push_back(to_string(t));
        json cells = json::array();
        for (const auto &c : g.profile.cells)
            cells.push_back(cell_json(c));
        json excluded = json::array();
        for (const auto &e : g.profile.excluded)
            excluded.push_back({{"L_ms", e.window_length_ms}, {"reason", e.reason}});
        out.push_back({{"group", g.name},
                       {"links", links},
                       {"aggregation", to_string(g.profile.aggregation)},
                       {"tests", tests},
                       {"alphas", g.profile.alphas},
                       {"cells", cells},
                       {"excluded", excluded}});
    }
    return out;
}

inline json spectral_json(const RunReport &r)
{
    json out = json::array();
    for (const auto &s : r.spectral)
    {
        const auto &v = s.result;
        out.push_back({{"link", s.link.to_string()},
                       {"L_ms", v.window_length_ms},
                       {"samples_per_window", v.samples_per_window},
                       {"M", v.windows},
                       {"windows_skipped", v.windows_skipped},
                       {"K", v.k},
                       {"NW", v.nw},
                       {"v_l", v.v_l},
                       {"v_l_normalized", v.v_l_normalized},
                       {"freqs_hz", v.freqs_hz},
                       {"mean_psd", v.mean_psd},
                       {"var_psd", v.per_freq_variance}});
    }
    return out;
}

// Everything except the payload digest itself.
inline json payload_json(const RunReport &r)
{
    json excluded = json::array();
    for (const auto &e : r.excluded)
        excluded.push_back(
            {{"analysis", e.analysis}, {"scope", e.scope}, {"L_ms", e.window_length_ms}, {"reason", e.reason}});
    json inputs = json::array();
    for (const auto &d : r.provenance.inputs)
        inputs.push_back({{"source", d.source}, {"sha256", d.sha256}});
    return json{{"tool", tool_name},
                {"profiles", profiles_json(r)},
                {"spectral", spectral_json(r)},
                {"excluded", excluded},
                {"warnings", r.warnings},
                {"provenance",
                 {{"tool_version", r.provenance.tool_version},
                  {"config", r.provenance.config},
                  {"config_sha256", r.provenance.config_sha256},
                  {"inputs", inputs}}}};
}

} // namespace detail

/// Full report document, including the payload digest.
inline json report_json(const RunReport &r)
{
    json doc = detail::payload_json(r);
    doc["provenance"]["payload_sha256"] = r.provenance.payload_sha256;
    return doc;
}

/// Loads or synthesizes inputs and computes every configured analysis. No files are written.
inline RunReport run(const RunConfig &cfg)
{
    RunReport report;
    const auto inputs = detail::load_inputs(cfg);
    const auto &traces = inputs.traces;
    const auto groups = detail::resolve_groups(cfg, traces);

    if (cfg.sweep.enabled)
    {
        for (const auto &g : groups)
        {
            std::vector<ChannelTrace> members;
            GroupProfile gp{g.name, {}, {}};
            for (auto i : g.members)
            {
                members.push_back(traces[i]);
                gp.links.push_back(traces[i].link());
            }
            SweepOptions opts;
            opts.tests = cfg.sweep.tests;
            opts.alphas = cfg.sweep.alphas;
            opts.aggregation = g.aggregation;
            opts.min_samples = cfg.sweep.min_samples;
            opts.ks_mode = cfg.sweep.ks_mode;
            opts.threads = cfg.threads;
            try
            {
                gp.profile = sweep_profile(members, cfg.sweep.window_lengths_ms, opts);
            }
            catch (const Error &e)
            {
                detail::rethrow_with_context(e, "group " + g.name);
            }
            for (const auto &e : gp.profile.excluded)
                report.excluded.push_back({"sweep", g.name, e.window_length_ms, e.reason});
            const auto lengths = gp.profile.window_lengths();
            if (lengths.empty())
                report.warnings.push_back("group " + g.name +
                                          ": every window length was excluded; its plot files hold only a header");
            else if (lengths.front() < reliability_threshold_ms)
                report.warnings.push_back("group " + g.name + ": window lengths from " +
                                          format_number(lengths.front()) + " ms are below the " +
                                          format_number(reliability_threshold_ms) +
                                          " ms reliability threshold; treat those gamma values with caution");
            report.profiles.push_back(std::move(gp));
        }
    }

    if (cfg.spectral.enabled)
    {
        std::set<std::size_t> used;
        for (const auto &g : groups)
            used.insert(g.members.begin(), g.members.end());
        std::vector<std::pair<std::size_t, double>> jobs;
        for (auto i : used)
            for (double l : cfg.spectral.window_lengths_ms)
                jobs.emplace_back(i, l);

        // One taper bank per (window length, sample interval), shared read-only.
        std::map<std::size_t, TaperBank> banks;
        for (const auto &[i, l] : jobs)
        {
            const auto ln = samples_per_window(l, traces[i].sampling().sample_interval_ms);
            if (!banks.contains(ln) && traces[i].size() / ln >= 2)
            {
                try
                {
                    banks.emplace(ln, make_taper_bank(ln, cfg.spectral.params));
                }
                catch (const Error &e)
                {
                    detail::rethrow_with_context(e, "spectral window " + format_number(l) + " ms");
                }
            }
        }

        std::vector<std::optional<SpectralVariationResult>> results(jobs.size());
        std::vector<std::string> reasons(jobs.size());
        parallel_for(jobs.size(), cfg.threads, [&](std::size_t j) {
            const auto &[i, l] = jobs[j];
            const auto &t = traces[i];
            const auto ln = samples_per_window(l, t.sampling().sample_interval_ms);
            const auto bank = banks.find(ln);
            if (bank == banks.end())
            {
                reasons[j] = "insufficient data: fewer than 2 complete windows of " + std::to_string(ln) + " samples";
                return;
            }
            try
            {
                results[j] = spectral_variation(spectrogram(t, l, bank->second), bank->second);
            }
            catch (const InsufficientDataError &e)
            {
                reasons[j] = std::string("insufficient data: ") + e.what();
            }
        });
        for (std::size_t j = 0; j < jobs.size(); ++j)
        {
            const auto &link = traces[jobs[j].first].link();
            if (results[j])
                report.spectral.push_back({link, std::move(*results[j])});
            else
                report.excluded.push_back({"spectral", link.to_string(), jobs[j].second, reasons[j]});
        }
    }

    report.provenance.tool_version = std::string(tool_version);
    report.provenance.config = cfg.echo;
    report.provenance.config_sha256 = sha256_hex(cfg.echo.dump());
    report.provenance.inputs = inputs.digests;
    report.provenance.payload_sha256 = sha256_hex(detail::payload_json(report).dump());
    return report;
}

namespace detail
{

using FileSet = std::vector<std::pair<std::filesystem::path, std::string>>; // relative path, contents

inline std::string plot_csv(const GroupProfile &g, TestKind test)
{
    std::string out = "L_ms,alpha,gamma\n";
    // Cells are already ordered by L, then test, then alpha.
    for (const auto &c : g.profile.cells)
        if (c.test == test)
            out += format_number(c.window_length_ms) + "," + format_number(c.alpha) + "," + format_number(c.gamma) +
                   "\n";
    return out;
}

inline FileSet plot_files(const RunReport &r)
{
    FileSet files;
    for (const auto &g : r.profiles)
        for (auto t : g.profile.tests)
            files.emplace_back(std::filesystem::path(file_safe(g.name) + "_" + std::string(to_string(t)) + ".csv"),
                               plot_csv(g, t));
    return files;
}

inline std::string profile_csv(const RunReport &r)
{
    std::string out = "group,L_ms,test,alpha,gamma,n_comparisons,n_skipped\n";
    for (const auto &g : r.profiles)
        for (const auto &c : g.profile.cells)
            out += g.name + "," + format_number(c.window_length_ms) + "," + std::string(to_string(c.test)) + "," +
                   format_number(c.alpha) + "," + format_number(c.gamma) + "," + std::to_string(c.n_comparisons) +
                   "," + std::to_string(c.n_skipped) + "\n";
    return out;
}

inline std::string spectral_csv(const RunReport &r)
{
    std::string out = "link,L_ms,v_l,v_l_normalized,M,K,NW\n";
    for (const auto &s : r.spectral)
    {
        const auto &v = s.result;
        out += s.link.to_string() + "," + format_number(v.window_length_ms) + "," + format_number(v.v_l) + "," +
               format_number(v.v_l_normalized) + "," + std::to_string(v.windows) + "," + std::to_string(v.k) + "," +
               format_number(v.nw) + "\n";
    }
    return out;
}

inline std::string spectral_variance_csv(const RunReport &r)
{
    std::string out = "link,L_ms,freq_hz,var_psd\n";
    for (const auto &s : r.spectral)
        for (std::size_t j = 0; j < s.result.freqs_hz.size(); ++j)
            out += s.link.to_string() + "," + format_number(s.result.window_length_ms) + "," +
                   format_number(s.result.freqs_hz[j]) + "," + format_number(s.result.per_freq_variance[j]) + "\n";
    return out;
}

inline void write_file(const std::filesystem::path &path, const std::string &contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + path.string() + "'");
    out << contents;
    out.close();
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
}

// Writes every file into a staging directory inside target, then renames each
// into place. On failure, staged and already-moved files are removed.
inline void publish(const std::filesystem::path &target, const FileSet &files)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(target, ec);
    if (ec || !fs::is_directory(target))
        throw IoError("cannot create output directory '" + target.string() + "'");
    const fs::path staging = target / ".wsstest-staging";
    fs::remove_all(staging, ec);
    std::vector<fs::path> moved;
    try
    {
        for (const auto &[rel, contents] : files)
        {
            fs::create_directories((staging / rel).parent_path());
            write_file(staging / rel, contents);
        }
        for (const auto &[rel, _] : files)
        {
            fs::create_directories((target / rel).parent_path());
            fs::rename(staging / rel, target / rel);
            moved.push_back(target / rel);
        }
        fs::remove_all(staging);
    }
    catch (const std::exception &e)
    {
        for (const auto &p : moved)
            fs::remove(p, ec);
        fs::remove_all(staging, ec);
        if (const auto *io = dynamic_cast<const IoError *>(&e))
            throw *io;
        throw IoError("writing outputs to '" + target.string() + "' failed: " + e.what());
    }
}

} // namespace detail

/// One `L_ms,alpha,gamma` file per (group, test) in target, sorted by L then alpha.
inline void emit_plotdata(const RunReport &report, const std::filesystem::path &target)
{
    detail::publish(target, detail::plot_files(report));
}

/// Writes the configured outputs for a finished report.
inline void write_outputs(const RunReport &report, const RunConfig &cfg)
{
    detail::FileSet files;
    const bool csv = cfg.emit != Emit::json;
    const bool js = cfg.emit != Emit::csv;
    if (cfg.sweep.enabled)
    {
        if (csv)
            files.emplace_back("profile.csv", detail::profile_csv(report));
        if (js)
            files.emplace_back("profile.json", detail::profiles_json(report).dump(2) + "\n");
        for (auto &[rel, contents] : detail::plot_files(report))
            files.emplace_back(std::filesystem::path("plot") / rel, std::move(contents));
    }
    if (cfg.spectral.enabled)
    {
        if (csv)
        {
            files.emplace_back("spectral.csv", detail::spectral_csv(report));
            files.emplace_back("spectral_variance.csv", detail::spectral_variance_csv(report));
        }
        if (js)
            files.emplace_back("spectral.json", detail::spectral_json(report).dump(2) + "\n");
    }
    files.emplace_back("report.json", report_json(report).dump(2) + "\n");
    detail::publish(cfg.output_dir, files);
}

/// run() followed by write_outputs().
inline RunReport execute(const RunConfig &cfg)
{
    auto report = run(cfg);
    write_outputs(report, cfg);
    return report;
}

} // namespace wss
