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
#include "wss/parallel.hpp"
#include "wss/stattests.hpp"
#include "wss/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wss
{

/// Window of length L split into two consecutive intervals of L/2.
struct WindowPlan
{
    double window_length_ms = 0.0;
    double interval_length_ms = 0.0;
    std::size_t samples_per_interval = 0;
    std::size_t min_samples = 30;

    bool admissible() const noexcept { return samples_per_interval >= min_samples; }

    friend bool operator==(const WindowPlan &, const WindowPlan &) = default;
};

/// Builds the plan for window length L. Throws ConfigError unless L/2 is a
/// positive whole number of sample intervals.
inline WindowPlan make_plan(double window_length_ms, double sample_interval_ms, std::size_t min_samples = 30)
{
    if (!(window_length_ms > 0.0) || !std::isfinite(window_length_ms))
        throw ConfigError("window length must be positive, got " + format_number(window_length_ms));
    const double interval = window_length_ms / 2.0;
    const double ratio = interval / sample_interval_ms;
    const double whole = std::round(ratio);
    if (whole < 1.0 || std::abs(ratio - whole) > 1e-9 * std::max(1.0, ratio))
        throw ConfigError("window length " + format_number(window_length_ms) + " ms does not split into intervals of a "
                          "whole number of " + format_number(sample_interval_ms) + " ms samples");
    return {window_length_ms, interval, static_cast<std::size_t>(whole), min_samples};
}

struct Interval
{
    std::span<const double> values; // view into the trace's gains
    bool usable = true;             // false when any sample is missing
};

/// Splits the trace into floor(n / l_n) consecutive intervals; the trailing
/// remainder is discarded. The returned spans borrow from the trace.
inline std::vector<Interval> segment(const ChannelTrace &trace, const WindowPlan &plan)
{
    if (plan.samples_per_interval == 0)
        throw ParameterError("window plan has zero samples per interval");
    if (!plan.admissible())
        throw ParameterError("window plan with " + std::to_string(plan.samples_per_interval) + " < " +
                             std::to_string(plan.min_samples) + " samples per interval is not admissible");
    const std::size_t ln = plan.samples_per_interval;
    const std::size_t m = trace.size() / ln;
    if (m < 2)
        throw InsufficientDataError("trace " + trace.link().to_string() + " has " + std::to_string(trace.size()) +
                                    " samples; need at least 2 intervals of " + std::to_string(ln));
    std::vector<Interval> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
    {
        Interval iv{trace.gains().subspan(i * ln, ln), true};
        for (std::size_t j = i * ln; j < (i + 1) * ln; ++j)
            if (!trace.is_usable(j))
            {
                iv.usable = false;
                break;
            }
        out.push_back(iv);
    }
    return out;
}

/// p-values for comparisons (interval i, interval i+1), i = 0..m-2, per test.
/// Empty optionals mark comparisons skipped because an interval is unusable.
struct PairwiseSeries
{
    WindowPlan plan;
    std::vector<LinkId> links; // source links; more than one after aggregation
    std::map<TestKind, std::vector<std::optional<double>>> p_values;

    std::size_t comparisons() const { return p_values.empty() ? 0 : p_values.begin()->second.size(); }
};

inline PairwiseSeries pairwise_pvalues(const ChannelTrace &trace, const WindowPlan &plan,
                                       std::span<const TestKind> tests, KsMode ks_mode = KsMode::automatic)
{
    const auto intervals = segment(trace, plan);
    PairwiseSeries series{plan, {trace.link()}, {}};
    for (TestKind t : tests)
    {
        auto &ps = series.p_values[t];
        ps.assign(intervals.size() - 1, std::nullopt);
        for (std::size_t i = 0; i + 1 < intervals.size(); ++i)
        {
            if (!intervals[i].usable || !intervals[i + 1].usable)
                continue;
            ps[i] = run_test(t, intervals[i].values, intervals[i + 1].values, ks_mode).p_value;
        }
    }
    return series;
}

struct GammaCount
{
    std::size_t stationary = 0;
    std::size_t usable = 0;
    std::size_t skipped = 0;
};

inline GammaCount count_stationary(std::span<const std::optional<double>> p_values, double alpha)
{
    GammaCount c;
    for (const auto &p : p_values)
    {
        if (!p)
        {
            ++c.skipped;
            continue;
        }
        ++c.usable;
        c.stationary += *p >= alpha;
    }
    return c;
}

/// Fraction of usable comparisons with p >= alpha (the boundary counts as stationary).
inline double gamma(std::span<const std::optional<double>> p_values, double alpha)
{
    const auto c = count_stationary(p_values, alpha);
    if (c.usable == 0)
        throw UndefinedGammaError("gamma is undefined: no usable comparisons");
    return static_cast<double>(c.stationary) / static_cast<double>(c.usable);
}

inline double gamma(const PairwiseSeries &series, TestKind test, double alpha)
{
    const auto it = series.p_values.find(test);
    if (it == series.p_values.end())
        throw UndefinedGammaError("gamma is undefined: series has no p-values for test " + std::string(to_string(test)));
    return gamma(it->second, alpha);
}

/// Per-comparison median of p-values across links (mean of the two middle
/// values for even counts). Links of different lengths are aligned by index.
inline PairwiseSeries median_pvalues_across_links(std::span<const PairwiseSeries> series_set)
{
    if (series_set.empty())
        throw ParameterError("median across links needs at least one series");
    const auto &first = series_set.front();
    PairwiseSeries out{first.plan, {}, {}};
    for (const auto &s : series_set)
    {
        if (!(s.plan == first.plan))
            throw ParameterError("median across links: series were computed with different window plans");
        for (const auto &l : s.links)
        {
            if (!first.links.empty() && (l.tx_node != first.links.front().tx_node || l.rx_node != first.links.front().rx_node))
                throw ParameterError("median across links: link " + l.to_string() + " has different node roles than " +
                                     first.links.front().to_string());
            out.links.push_back(l);
        }
    }
    for (const auto &[test, _] : first.p_values)
    {
        std::size_t length = 0;
        for (const auto &s : series_set)
        {
            const auto it = s.p_values.find(test);
            if (it == s.p_values.end())
                throw ParameterError("median across links: series lacks test " + std::string(to_string(test)));
            length = std::max(length, it->second.size());
        }
        auto &dst = out.p_values[test];
        dst.assign(length, std::nullopt);
        std::vector<double> column;
        for (std::size_t i = 0; i < length; ++i)
        {
            column.clear();
            for (const auto &s : series_set)
            {
                const auto &ps = s.p_values.at(test);
                if (i < ps.size() && ps[i])
                    column.push_back(*ps[i]);
            }
            if (column.empty())
                continue;
            std::sort(column.begin(), column.end());
            const std::size_t mid = column.size() / 2;
            dst[i] = column.size() % 2 == 1 ? column[mid] : 0.5 * (column[mid - 1] + column[mid]);
        }
    }
    return out;
}

enum class Aggregation
{
    single_link,
    median_across_links,    // median of per-window p-values, then threshold
    mean_gamma_across_links // threshold per link, then average gamma
};

inline std::string_view to_string(Aggregation a)
{
    switch (a)
    {
    case Aggregation::single_link: return "single_link";
    case Aggregation::median_across_links: return "median_across_links";
    case Aggregation::mean_gamma_across_links: return "mean_gamma_across_links";
    }
    return "unknown";
}

inline Aggregation parse_aggregation(std::string_view name)
{
    if (name == "single_link")
        return Aggregation::single_link;
    if (name == "median_across_links" || name == "median")
        return Aggregation::median_across_links;
    if (name == "mean_gamma_across_links" || name == "mean_gamma")
        return Aggregation::mean_gamma_across_links;
    throw ConfigError("unknown aggregation '" + std::string(name) + "'");
}

struct ProfileCell
{
    double window_length_ms = 0.0;
    TestKind test = TestKind::anova;
    double alpha = 0.05;
    double gamma = 0.0;
    std::size_t n_comparisons = 0; // usable comparisons behind gamma
    std::size_t n_skipped = 0;
};

struct Exclusion
{
    double window_length_ms = 0.0;
    std::string reason;
};

/// Gamma versus window length. Cells are ordered by L, then test, then alpha.
struct StationarityProfile
{
    std::vector<ProfileCell> cells;
    std::vector<double> alphas;
    std::vector<TestKind> tests;
    Aggregation aggregation = Aggregation::single_link;
    std::vector<Exclusion> excluded;

    std::vector<double> window_lengths() const
    {
        std::vector<double> out;
        for (const auto &c : cells)
            if (out.empty() || out.back() != c.window_length_ms)
                out.push_back(c.window_length_ms);
        return out;
    }

    std::optional<ProfileCell> find(double window_length_ms, TestKind test, double alpha) const
    {
        for (const auto &c : cells)
            if (c.window_length_ms == window_length_ms && c.test == test && c.alpha == alpha)
                return c;
        return std::nullopt;
    }
};

struct SweepOptions
{
    std::vector<TestKind> tests = std::vector<TestKind>(std::begin(all_test_kinds), std::end(all_test_kinds));
    std::vector<double> alphas = {0.01, 0.05, 0.1};
    Aggregation aggregation = Aggregation::single_link;
    std::size_t min_samples = 30;
    KsMode ks_mode = KsMode::automatic;
    std::size_t threads = 0; // 0 = hardware concurrency
};

/// Default window-length sweep: 100 ms to 100 s in 100 ms steps.
inline std::vector<double> default_window_lengths()
{
    std::vector<double> out;
    for (int l = 100; l <= 100000; l += 100)
        out.push_back(l);
    return out;
}

/// Computes gamma for every admissible (L, test, alpha). Window lengths whose
/// intervals hold fewer than min_samples samples, or for which no trace has
/// two usable intervals, are listed in `excluded` with a reason.
inline StationarityProfile sweep_profile(std::span<const ChannelTrace> traces, std::span<const double> window_lengths_ms,
                                         const SweepOptions &options)
{
    if (traces.empty())
        throw ParameterError("sweep needs at least one trace");
    if (options.aggregation == Aggregation::single_link && traces.size() != 1)
        throw ConfigError("single_link aggregation needs exactly one trace, got " + std::to_string(traces.size()));
    if (options.tests.empty())
        throw ConfigError("sweep needs at least one test");
    if (options.min_samples == 0)
        throw ConfigError("min_samples must be at least 1");
    const double dt = traces.front().sampling().sample_interval_ms;
    for (const auto &t : traces)
        if (t.sampling().sample_interval_ms != dt)
            throw ConfigError("traces in one sweep must share a sample interval");

    std::vector<double> alphas = options.alphas;
    std::sort(alphas.begin(), alphas.end());
    alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
    for (double a : alphas)
        if (!(a >= 0.0 && a <= 1.0))
            throw ConfigError("alpha must lie in [0, 1], got " + format_number(a));
    std::vector<TestKind> tests = options.tests;
    std::sort(tests.begin(), tests.end());
    tests.erase(std::unique(tests.begin(), tests.end()), tests.end());

    std::vector<double> lengths(window_lengths_ms.begin(), window_lengths_ms.end());
    std::sort(lengths.begin(), lengths.end());
    lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());

    StationarityProfile profile;
    profile.alphas = alphas;
    profile.tests = tests;
    profile.aggregation = options.aggregation;

    std::vector<WindowPlan> plans;
    plans.reserve(lengths.size());
    for (double l : lengths)
        plans.push_back(make_plan(l, dt, options.min_samples));
    if (std::none_of(plans.begin(), plans.end(), [](const WindowPlan &p) { return p.admissible(); }))
        throw ConfigError("no admissible window length: the minimum admissible L is " +
                          format_number(2.0 * static_cast<double>(options.min_samples) * dt) + " ms (" +
                          std::to_string(options.min_samples) + " samples per interval at " + format_number(dt) +
                          " ms sampling)");

    struct Outcome
    {
        std::vector<ProfileCell> cells;
        std::optional<std::string> excluded;
    };
    std::vector<Outcome> outcomes(plans.size());

    parallel_for(plans.size(), options.threads, [&](std::size_t li) {
        const WindowPlan &plan = plans[li];
        Outcome &out = outcomes[li];
        if (!plan.admissible())
        {
            out.excluded = "interval has " + std::to_string(plan.samples_per_interval) + " < " +
                           std::to_string(plan.min_samples) + " samples";
            return;
        }
        std::vector<PairwiseSeries> series;
        for (const auto &trace : traces)
        {
            if (trace.size() / plan.samples_per_interval < 2)
                continue;
            series.push_back(pairwise_pvalues(trace, plan, tests, options.ks_mode));
        }
        if (series.empty())
        {
            out.excluded = "insufficient data: no trace holds two intervals of " +
                           std::to_string(plan.samples_per_interval) + " samples";
            return;
        }

        if (options.aggregation == Aggregation::mean_gamma_across_links)
        {
            for (TestKind t : tests)
                for (double a : alphas)
                {
                    double sum = 0.0;
                    std::size_t links = 0, usable = 0, skipped = 0;
                    for (const auto &s : series)
                    {
                        const auto c = count_stationary(s.p_values.at(t), a);
                        skipped += c.skipped;
                        if (c.usable == 0)
                            continue;
                        usable += c.usable;
                        sum += static_cast<double>(c.stationary) / static_cast<double>(c.usable);
                        ++links;
                    }
                    if (links == 0)
                    {
                        out.cells.clear();
                        out.excluded = "no usable comparisons (every interval pair contains missing samples)";
                        return;
                    }
                    out.cells.push_back({plan.window_length_ms, t, a, sum / static_cast<double>(links), usable, skipped});
                }
            return;
        }

        const PairwiseSeries combined =
            series.size() == 1 ? std::move(series.front()) : median_pvalues_across_links(series);
        for (TestKind t : tests)
            for (double a : alphas)
            {
                const auto c = count_stationary(combined.p_values.at(t), a);
                if (c.usable == 0)
                {
                    out.cells.clear();
                    out.excluded = "no usable comparisons (every interval pair contains missing samples)";
                    return;
                }
                out.cells.push_back({plan.window_length_ms, t, a,
                                     static_cast<double>(c.stationary) / static_cast<double>(c.usable), c.usable,
                                     c.skipped});
            }
    });

    for (std::size_t li = 0; li < plans.size(); ++li)
    {
        if (outcomes[li].excluded)
            profile.excluded.push_back({plans[li].window_length_ms, *outcomes[li].excluded});
        else
            profile.cells.insert(profile.cells.end(), outcomes[li].cells.begin(), outcomes[li].cells.end());
    }
    return profile;
}

} // namespace wss
