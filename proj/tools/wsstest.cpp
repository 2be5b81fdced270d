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

// wsstest: command-line front end.
//
//   wsstest run --config sweep.json [--L 3000:30000:1000] [--out dir] ...
//   wsstest synth --kind mean_step --seed 3 --output trace.csv

#include "wss/wss.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace
{

int run_command(const std::string &config_path, const wss::Overrides &overrides)
{
    wss::json doc = wss::json::object();
    std::filesystem::path base_dir = std::filesystem::current_path();
    if (!config_path.empty())
    {
        std::ifstream in(config_path);
        if (!in)
            throw wss::ConfigError("cannot open config file '" + config_path + "'");
        try
        {
            doc = wss::json::parse(in, nullptr, true, true);
        }
        catch (const wss::json::parse_error &e)
        {
            throw wss::ConfigError(config_path + ": " + e.what());
        }
        base_dir = std::filesystem::path(config_path).parent_path();
    }
    // --input is relative to the working directory, not the config.
    auto adjusted = overrides;
    if (adjusted.input)
        adjusted.input = std::filesystem::absolute(*adjusted.input).lexically_normal().string();
    wss::apply_overrides(doc, adjusted);

    const auto cfg = wss::parse_config(doc, base_dir);
    const auto report = wss::execute(cfg);

    for (const auto &w : report.warnings)
        std::cerr << "wsstest: warning: " << w << "\n";
    std::size_t cells = 0;
    for (const auto &g : report.profiles)
        cells += g.profile.cells.size();
    std::cout << "groups: " << report.profiles.size() << ", gamma cells: " << cells
              << ", spectral results: " << report.spectral.size() << ", excluded: " << report.excluded.size() << "\n"
              << "outputs: " << cfg.output_dir.string() << "\n"
              << "payload sha256: " << report.provenance.payload_sha256 << "\n";
    return 0;
}

int synth_command(const wss::SynthSpec &spec, const std::string &output)
{
    try
    {
        wss::validate(spec);
    }
    catch (const wss::ParameterError &e)
    {
        throw wss::ConfigError(e.what());
    }
    const auto result = wss::generate(spec);
    const std::vector<wss::ChannelTrace> traces{result.trace};
    if (output.empty() || output == "-")
    {
        wss::write_canonical(std::cout, traces);
        return 0;
    }
    std::ofstream out(output, std::ios::binary | std::ios::trunc);
    if (!out)
        throw wss::IoError("cannot write '" + output + "'");
    wss::write_canonical(out, traces);
    if (!out.flush())
        throw wss::IoError("failed writing '" + output + "'");
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Windowed wide-sense-stationarity testing for channel-gain traces"};
    app.set_version_flag("--version", std::string(wss::tool_version));
    app.require_subcommand(1);

    auto *run = app.add_subcommand("run", "Run a stationarity sweep and/or spectral analysis");
    std::string config_path;
    wss::Overrides ov;
    run->add_option("-c,--config", config_path, "JSON run configuration");
    run->add_option("--input", ov.input, "Trace file (replaces input.files and any synthetic inputs)");
    run->add_option("--format", ov.format, "canonical_csv or dataset_adapter");
    run->add_option("-o,--out", ov.out, "Output directory");
    run->add_option("--tests", ov.tests, "Comma-separated tests: anova,brown_forsythe,ks,kruskal_wallis");
    run->add_option("--alphas", ov.alphas, "Comma-separated significance levels");
    run->add_option("--L", ov.window_lengths, "Window lengths in ms: a,b,c or start:stop:step");
    run->add_option("--min-samples", ov.min_samples, "Minimum samples per interval");
    run->add_option("--seed", ov.seed, "Base seed for synthetic inputs (input i gets seed + i)");
    run->add_option("--spectral", ov.spectral, "Spectral window lengths in ms, or 'off'");
    run->add_option("--threads", ov.threads, "Worker threads (0 = all cores)");

    auto *synth = app.add_subcommand("synth", "Write a synthetic trace in canonical CSV");
    std::string kind = "iid_gaussian", link = "LH1->LH2", output;
    wss::SynthSpec spec;
    synth->add_option("--kind", kind, "iid_gaussian, ar1, mean_step, variance_step, chirp, shadowed_walk");
    synth->add_option("--duration", spec.duration_ms, "Duration in ms")->capture_default_str();
    synth->add_option("--sample-interval", spec.sample_interval_ms, "Sample interval in ms")->capture_default_str();
    synth->add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
    synth->add_option("--link", link, "Link label, e.g. LH7->LH5")->capture_default_str();
    synth->add_option("--mean", spec.params.mean_db, "Mean gain (dB)")->capture_default_str();
    synth->add_option("--std", spec.params.std_db, "Noise std (dB)")->capture_default_str();
    synth->add_option("--alt-std", spec.params.alt_std_db, "variance_step alternate std (dB)")->capture_default_str();
    synth->add_option("--ar", spec.params.ar_coefficient, "AR(1) coefficient")->capture_default_str();
    synth->add_option("--step-period", spec.params.step_period_ms, "Step period (ms)")->capture_default_str();
    synth->add_option("--step", spec.params.step_db, "mean_step size (dB)")->capture_default_str();
    synth->add_option("--walk-std", spec.params.walk_std_db, "shadowed_walk step std (dB)")->capture_default_str();
    synth->add_option("-o,--output", output, "Output file (default stdout)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return static_cast<int>(wss::ErrorCategory::config);
    }

    try
    {
        if (*run)
            return run_command(config_path, ov);
        spec.kind = wss::parse_synth_kind(kind);
        spec.link = wss::parse_link_id(link);
        return synth_command(spec, output);
    }
    catch (const wss::Error &e)
    {
        std::cerr << "wsstest: error: " << e.what() << "\n";
        return e.exit_code();
    }
    catch (const std::exception &e)
    {
        std::cerr << "wsstest: internal error: " << e.what() << "\n";
        return static_cast<int>(wss::ErrorCategory::analysis);
    }
}
