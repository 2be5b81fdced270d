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

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "wss/stattests.hpp"
#include "wss/synth.hpp"
#include "wss/windowing.hpp"

#include <cmath>
#include <vector>

using Catch::Matchers::WithinAbs;
using wss::TestKind;

namespace
{

const std::vector<TestKind> all_tests(std::begin(wss::all_test_kinds), std::end(wss::all_test_kinds));

wss::ChannelTrace make_trace(std::vector<double> gains, wss::LinkId link = {"LH", 1, "LH", 2})
{
    return wss::ChannelTrace(std::move(link), {}, std::move(gains));
}

wss::PairwiseSeries series_of(std::vector<std::optional<double>> ps, wss::LinkId link = {"LH", 1, "LH", 2})
{
    wss::PairwiseSeries s;
    s.plan = wss::make_plan(3000, 50);
    s.links = {std::move(link)};
    s.p_values[TestKind::anova] = std::move(ps);
    return s;
}

wss::ChannelTrace iid(std::uint64_t seed, double duration_ms)
{
    wss::SynthSpec spec;
    spec.seed = seed;
    spec.duration_ms = duration_ms;
    return wss::generate(spec).trace;
}

} // namespace

TEST_CASE("make_plan", "[windowing]")
{
    const auto p = wss::make_plan(3000, 50);
    CHECK(p.interval_length_ms == 1500.0);
    CHECK(p.samples_per_interval == 30);
    CHECK(p.admissible());
    CHECK_FALSE(wss::make_plan(2000, 50).admissible());
    CHECK(wss::make_plan(2000, 50, 20).admissible());
    CHECK_THROWS_AS(wss::make_plan(150, 50), wss::ConfigError); // l_n = 1.5
    CHECK_THROWS_AS(wss::make_plan(50, 50), wss::ConfigError);  // l_n = 0.5
    CHECK_THROWS_AS(wss::make_plan(-100, 50), wss::ConfigError);
}

TEST_CASE("segment", "[windowing]")
{
    const auto plan = wss::make_plan(300, 50, 3);
    REQUIRE(plan.samples_per_interval == 3);

    std::vector<double> g(10);
    for (int i = 0; i < 10; ++i)
        g[i] = i;
    const auto ten = make_trace(g);
    const auto iv = wss::segment(ten, plan);
    REQUIRE(iv.size() == 3);
    CHECK(iv[2].values[0] == 6.0);
    CHECK(iv[2].values[2] == 8.0);
    for (const auto &i : iv)
        CHECK(i.values.size() == 3);

    CHECK(wss::segment(make_trace({0, 1, 2, 3, 4, 5}), plan).size() == 2);
    CHECK_THROWS_AS(wss::segment(make_trace({0, 1, 2, 3, 4}), plan), wss::InsufficientDataError);
    CHECK_THROWS_AS(wss::segment(ten, wss::make_plan(300, 50, 4)), wss::ParameterError);
}

TEST_CASE("segment flags intervals holding missing samples", "[windowing]")
{
    std::vector<wss::SampleState> st(9, wss::SampleState::observed);
    st[4] = wss::SampleState::missing;
    const wss::ChannelTrace t({"LH", 1, "LH", 2}, {}, std::vector<double>(9, -60.0), st);
    const auto iv = wss::segment(t, wss::make_plan(300, 50, 3));
    CHECK(iv[0].usable);
    CHECK_FALSE(iv[1].usable);
    CHECK(iv[2].usable);

    const auto s = wss::pairwise_pvalues(t, wss::make_plan(300, 50, 3), all_tests);
    for (const auto &[test, ps] : s.p_values)
    {
        REQUIRE(ps.size() == 2);
        CHECK_FALSE(ps[0].has_value());
        CHECK_FALSE(ps[1].has_value());
    }
    CHECK_THROWS_AS(wss::gamma(s, TestKind::anova, 0.05), wss::UndefinedGammaError);
}

TEST_CASE("pairwise_pvalues examples", "[windowing]")
{
    const auto plan = wss::make_plan(3000, 50);
    const auto constant = make_trace(std::vector<double>(300, -70.0));
    const auto s = wss::pairwise_pvalues(constant, plan, all_tests);
    CHECK(s.comparisons() == 9);
    for (const auto &[test, ps] : s.p_values)
        for (const auto &p : ps)
            CHECK(p.value() == 1.0);

    wss::Rng rng(11);
    std::vector<double> g(300);
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = ((i / 30) % 2 == 0 ? 0.0 : 10.0) + rng.normal(0.0, 0.01);
    const auto alt = wss::pairwise_pvalues(make_trace(g), plan, std::vector<TestKind>{TestKind::anova});
    for (const auto &p : alt.p_values.at(TestKind::anova))
        CHECK(p.value() < 1e-12);

    const auto two = wss::pairwise_pvalues(make_trace(std::vector<double>(60, 1.0)), plan, all_tests);
    for (const auto &[test, ps] : two.p_values)
        CHECK(ps.size() == 1);
}

TEST_CASE("gamma examples", "[windowing]")
{
    const std::vector<std::optional<double>> ps{0.2, 0.01, 0.7};
    CHECK(wss::gamma(ps, 0.05) == 2.0 / 3.0);
    CHECK(wss::gamma(std::vector<std::optional<double>>{1.0, 1.0}, 0.1) == 1.0);
    CHECK(wss::gamma(std::vector<std::optional<double>>{0.05}, 0.05) == 1.0);
    CHECK(wss::gamma(std::vector<std::optional<double>>{0.2, std::nullopt, 0.01}, 0.05) == 0.5);
    CHECK_THROWS_AS(wss::gamma(std::vector<std::optional<double>>{std::nullopt}, 0.05), wss::UndefinedGammaError);
    CHECK_THROWS_AS(wss::gamma(std::vector<std::optional<double>>{}, 0.05), wss::UndefinedGammaError);
    CHECK_THROWS_AS(wss::gamma(series_of({0.5}), TestKind::ks, 0.05), wss::UndefinedGammaError);
}

TEST_CASE("median_pvalues_across_links", "[windowing]")
{
    const std::vector<wss::PairwiseSeries> three{series_of({0.1}, {"LH", 1, "LH", 2}),
                                                  series_of({0.9}, {"LH", 3, "LH", 4}),
                                                  series_of({0.5}, {"LH", 5, "LH", 6})};
    const auto m3 = wss::median_pvalues_across_links(three);
    CHECK(m3.p_values.at(TestKind::anova)[0].value() == 0.5);
    CHECK(m3.links.size() == 3);

    const std::vector<wss::PairwiseSeries> two{series_of({0.2, std::nullopt}), series_of({0.4, 0.6})};
    const auto m2 = wss::median_pvalues_across_links(two);
    CHECK_THAT(m2.p_values.at(TestKind::anova)[0].value(), WithinAbs(0.3, 1e-15));
    CHECK(m2.p_values.at(TestKind::anova)[1].value() == 0.6);

    const std::vector<wss::PairwiseSeries> one{series_of({0.3, std::nullopt, 0.01})};
    CHECK(wss::median_pvalues_across_links(one).p_values == one[0].p_values);

    CHECK_THROWS(wss::median_pvalues_across_links(std::span<const wss::PairwiseSeries>{}));

    auto other_plan = series_of({0.1});
    other_plan.plan = wss::make_plan(5000, 50);
    const std::vector<wss::PairwiseSeries> mixed{series_of({0.1}), other_plan};
    CHECK_THROWS_AS(wss::median_pvalues_across_links(mixed), wss::ParameterError);
}

TEST_CASE("sweep_profile admissibility", "[windowing][sweep]")
{
    const std::vector<wss::ChannelTrace> traces{iid(5, 60000)};
    const std::vector<double> lengths{2000, 3000};
    wss::SweepOptions opts;
    opts.alphas = {0.05};
    const auto prof = wss::sweep_profile(traces, lengths, opts);
    CHECK(prof.window_lengths() == std::vector<double>{3000});
    REQUIRE(prof.excluded.size() == 1);
    CHECK(prof.excluded[0].window_length_ms == 2000);
    CHECK(prof.excluded[0].reason == "interval has 20 < 30 samples");
    CHECK(prof.cells.size() == 4);

    const std::vector<double> short_only{1000, 2000};
    try
    {
        wss::sweep_profile(traces, short_only, opts);
        FAIL("expected a config error");
    }
    catch (const wss::ConfigError &e)
    {
        CHECK(std::string(e.what()).find("3000") != std::string::npos);
    }

    // A window longer than half the trace is excluded, not fatal.
    const std::vector<double> with_long{3000, 70000};
    const auto p2 = wss::sweep_profile(traces, with_long, opts);
    REQUIRE(p2.excluded.size() == 1);
    CHECK(p2.excluded[0].reason.rfind("insufficient data", 0) == 0);
}

TEST_CASE("sweep_profile on iid noise is calibrated", "[windowing][sweep]")
{
    // 10 minutes at 20 Hz: 399 comparisons at L = 3 s.
    const std::vector<wss::ChannelTrace> traces{iid(42, 600000)};
    const std::vector<double> lengths{3000};
    wss::SweepOptions opts;
    opts.alphas = {0.05};
    const auto prof = wss::sweep_profile(traces, lengths, opts);
    for (const auto &c : prof.cells)
    {
        INFO(wss::to_string(c.test) << " gamma " << c.gamma);
        CHECK(c.n_comparisons == 399);
        CHECK_THAT(c.gamma, WithinAbs(0.95, 0.03));
    }
}

TEST_CASE("gamma is antitone in alpha and gamma(0) = 1", "[windowing][property]")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        wss::SynthSpec spec;
        spec.kind = wss::SynthKind::shadowed_walk;
        spec.seed = seed;
        spec.duration_ms = 120000;
        const auto s = wss::pairwise_pvalues(wss::generate(spec).trace, wss::make_plan(3000, 50), all_tests);
        for (const auto &[test, ps] : s.p_values)
        {
            CHECK(wss::gamma(ps, 0.0) == 1.0);
            double prev = 1.0;
            for (double a = 0.0; a <= 1.0; a += 0.01)
            {
                const double g = wss::gamma(ps, a);
                CHECK(g <= prev);
                prev = g;
            }
        }
    }
}

TEST_CASE("p-values are translation invariant", "[windowing][property]")
{
    const auto plan = wss::make_plan(3000, 50);
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        wss::SynthSpec spec;
        spec.kind = wss::SynthKind::variance_step;
        spec.seed = seed;
        spec.params.step_period_ms = 2500;
        const auto t = wss::generate(spec).trace;
        std::vector<double> shifted(t.gains().begin(), t.gains().end());
        for (auto &g : shifted)
            g += 17.0;
        const auto a = wss::pairwise_pvalues(t, plan, all_tests);
        const auto b = wss::pairwise_pvalues(make_trace(shifted), plan, all_tests);
        for (TestKind k : all_tests)
        {
            const auto &pa = a.p_values.at(k);
            const auto &pb = b.p_values.at(k);
            REQUIRE(pa.size() == pb.size());
            for (std::size_t i = 0; i < pa.size(); ++i)
            {
                if (k == TestKind::ks || k == TestKind::kruskal_wallis)
                    CHECK(pa[i].value() == pb[i].value());
                else
                    CHECK_THAT(pa[i].value(), WithinAbs(pb[i].value(), 1e-9));
            }
        }
    }
}

TEST_CASE("segment + test composition matches a straight-line version", "[windowing][property]")
{
    wss::Rng rng(99);
    const auto plan = wss::make_plan(300, 50, 3);
    for (int trial = 0; trial < 200; ++trial)
    {
        std::vector<double> g(12);
        for (auto &x : g)
            x = std::round(rng.normal(0.0, 3.0) * 4.0) / 4.0; // coarse grid forces ties
        const auto s = wss::pairwise_pvalues(make_trace(g), plan, all_tests);
        for (int i = 0; i < 3; ++i)
        {
            const std::vector<double> a(g.begin() + 3 * i, g.begin() + 3 * i + 3);
            const std::vector<double> b(g.begin() + 3 * i + 3, g.begin() + 3 * i + 6);
            const auto f_p = [](double f) {
                return std::isnan(f) ? 1.0 : (std::isinf(f) ? 0.0 : oracle::f_upper_tail(f, 1, 4));
            };
            CHECK_THAT(s.p_values.at(TestKind::anova)[i].value(), WithinAbs(f_p(oracle::anova_f({a, b})), 1e-9));
            CHECK_THAT(s.p_values.at(TestKind::brown_forsythe)[i].value(),
                       WithinAbs(f_p(oracle::brown_forsythe_f(a, b)), 1e-9));

            const double p_ks = oracle::permutation_pvalue(a, b, [](const auto &x, const auto &y) {
                return static_cast<double>(oracle::ks_scaled(x, y));
            }, 0.5);
            CHECK_THAT(s.p_values.at(TestKind::ks)[i].value(), WithinAbs(p_ks, 1e-12));

            const double h = oracle::kruskal_wallis_h(a, b);
            if (std::isfinite(h))
                CHECK_THAT(s.p_values.at(TestKind::kruskal_wallis)[i].value(),
                           WithinAbs(oracle::chi2_upper_tail(h, 1), 1e-9));
        }
    }
}

TEST_CASE("sweeps are deterministic across thread counts", "[windowing][property]")
{
    std::vector<wss::ChannelTrace> traces;
    for (std::uint64_t s = 1; s <= 3; ++s)
        traces.push_back(iid(s, 120000));
    const std::vector<double> lengths{2000, 3000, 4000, 5000, 6000, 10000};
    for (auto agg : {wss::Aggregation::median_across_links, wss::Aggregation::mean_gamma_across_links})
    {
        wss::SweepOptions opts;
        opts.aggregation = agg;
        opts.threads = 1;
        const auto serial = wss::sweep_profile(traces, lengths, opts);
        for (std::size_t threads : {2u, 4u, 8u})
        {
            opts.threads = threads;
            const auto par = wss::sweep_profile(traces, lengths, opts);
            REQUIRE(par.cells.size() == serial.cells.size());
            for (std::size_t i = 0; i < par.cells.size(); ++i)
            {
                CHECK(par.cells[i].window_length_ms == serial.cells[i].window_length_ms);
                CHECK(par.cells[i].gamma == serial.cells[i].gamma);
                CHECK(par.cells[i].n_comparisons == serial.cells[i].n_comparisons);
            }
        }
    }
}

TEST_CASE("single_link needs one trace", "[windowing][sweep]")
{
    const std::vector<wss::ChannelTrace> traces{iid(1, 60000), iid(2, 60000)};
    const std::vector<double> lengths{3000};
    CHECK_THROWS_AS(wss::sweep_profile(traces, lengths, wss::SweepOptions{}), wss::ConfigError);
}
