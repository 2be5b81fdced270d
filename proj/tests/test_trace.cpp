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

#include "wss/synth.hpp"
#include "wss/trace.hpp"
#include "wss/trace_io.hpp"

#include <cmath>
#include <sstream>
#include <vector>

using wss::SampleState;

namespace
{

std::vector<wss::ChannelTrace> parse(const std::string &text, wss::IngestOptions opts = {})
{
    std::istringstream in(text);
    return wss::parse_trace(in, wss::TraceFormat::canonical_csv, opts);
}

wss::ChannelTrace with_gap(std::vector<double> gains, std::vector<std::size_t> missing)
{
    std::vector<SampleState> states(gains.size(), SampleState::observed);
    for (auto i : missing)
        states[i] = SampleState::missing;
    return wss::ChannelTrace(wss::LinkId{"LH", 1, "LH", 2}, {}, std::move(gains), std::move(states));
}

const std::string header = "time_ms,tx_ban,tx_node,rx_ban,rx_node,gain_db\n";

} // namespace

TEST_CASE("LinkId text form and kind", "[trace]")
{
    const auto l = wss::parse_link_id("LH7->LH5");
    CHECK(l.tx_node == "LH");
    CHECK(l.tx_ban == 7);
    CHECK(l.rx_ban == 5);
    CHECK(l.kind() == wss::LinkKind::body_to_body);
    CHECK(l.to_string() == "LH7->LH5");
    CHECK(wss::parse_link_id("LH3->RA3").kind() == wss::LinkKind::on_body);
    CHECK_THROWS_AS(wss::parse_link_id("LH7-LH5"), wss::ConfigError);
    CHECK_THROWS_AS(wss::parse_link_id("7->LH5"), wss::ConfigError);
}

TEST_CASE("parse_trace builds a uniform grid", "[trace][io]")
{
    const auto traces = parse(header + "0,1,LH,2,LH,-60\n50,1,LH,2,LH,-61\n100,1,LH,2,LH,-59\n");
    REQUIRE(traces.size() == 1);
    const auto &t = traces[0];
    CHECK(t.size() == 3);
    CHECK(t.link() == wss::LinkId{"LH", 1, "LH", 2});
    CHECK(t.gains()[0] == -60.0);
    CHECK(t.gains()[2] == -59.0);
    CHECK(t.valid_mask() == std::vector<bool>{true, true, true});

    const auto gappy = parse(header + "0,1,LH,2,LH,-60\n150,1,LH,2,LH,-62\n");
    REQUIRE(gappy[0].size() == 4);
    CHECK(gappy[0].valid_mask() == std::vector<bool>{true, false, false, true});
    CHECK(std::isnan(gappy[0].gains()[1]));
}

TEST_CASE("receive-floor rows are dropouts", "[trace][io]")
{
    const auto t = parse(header + "0,1,LH,2,LH,-60\n50,1,LH,2,LH,-100.0\n100,1,LH,2,LH,\xE2\x88\x92" "100.0\n150,1,LH,2,LH,-99.5\n");
    CHECK(t[0].valid_mask() == std::vector<bool>{true, false, false, true});

    wss::IngestOptions opts;
    opts.receive_floor_db = -110.0;
    CHECK(parse(header + "0,1,LH,2,LH,-60\n50,1,LH,2,LH,-100\n", opts)[0].valid_mask() ==
          std::vector<bool>{true, true});
}

TEST_CASE("parse_trace errors", "[trace][io]")
{
    try
    {
        parse(header + "0,1,LH,2,LH,-60\n50,1,LH,2,LH,abc\n");
        FAIL("expected a parse error");
    }
    catch (const wss::ParseError &e)
    {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse("time,gain\n0,-60\n"), wss::ParseError);
    CHECK_THROWS_AS(parse(header + "0,1,LH,2,XX,-60\n"), wss::ConfigError);
    CHECK_THROWS_AS(parse(header + "50,1,LH,2,LH,-60\n0,1,LH,2,LH,-60\n"), wss::ParseError);
    CHECK_THROWS_AS(parse(header + "0,1,LH,2,LH,-60\n70,1,LH,2,LH,-60\n"), wss::ParseError);
    CHECK_THROWS_AS(parse(header), wss::EmptyResultError);

    wss::IngestOptions opts;
    opts.link_filter = wss::parse_link_id("LH5->LH6");
    CHECK_THROWS_AS(parse(header + "0,1,LH,2,LH,-60\n", opts), wss::EmptyResultError);
}

TEST_CASE("parse_trace groups rows by link", "[trace][io]")
{
    const auto traces = parse(header + "0,1,LH,2,LH,-60\n0,2,LH,1,RA,-70\n50,1,LH,2,LH,-61\n50,2,LH,1,RA,-71\n");
    REQUIRE(traces.size() == 2);
    CHECK(traces[0].link() != traces[1].link());
    CHECK(traces[0].size() == 2);

    wss::IngestOptions opts;
    opts.link_filter = wss::parse_link_id("LH2->RA1");
    const auto one = parse(header + "0,1,LH,2,LH,-60\n0,2,LH,1,RA,-70\n50,2,LH,1,RA,-71\n", opts);
    REQUIRE(one.size() == 1);
    CHECK(one[0].link().to_string() == "LH2->RA1");
}

TEST_CASE("dataset adapter maps declared columns", "[trace][io]")
{
    wss::IngestOptions opts;
    opts.layout.delimiter = ';';
    opts.layout.time = wss::FieldSource::named("t_s");
    opts.layout.tx_ban = wss::FieldSource::named("from");
    opts.layout.tx_node = wss::FieldSource::fixed("LH");
    opts.layout.rx_ban = wss::FieldSource::named("to");
    opts.layout.rx_node = wss::FieldSource::index(3);
    opts.layout.gain = wss::FieldSource::named("rssi");
    opts.layout.time_scale_ms = 1000.0;
    std::istringstream in("t_s;from;to;node;rssi\n0.00;BAN7;BAN5;LH;-66\n0.05;BAN7;BAN5;LH;-67\n0.10;BAN7;BAN5;LH;-100\n");
    const auto t = wss::parse_trace(in, wss::TraceFormat::dataset_adapter, opts);
    REQUIRE(t.size() == 1);
    CHECK(t[0].link().to_string() == "LH7->LH5");
    CHECK(t[0].valid_mask() == std::vector<bool>{true, true, false});

    opts.layout.gain = wss::FieldSource::named("nope");
    std::istringstream again("t_s;from;to;node;rssi\n0;1;2;LH;-60\n");
    CHECK_THROWS_AS(wss::parse_trace(again, wss::TraceFormat::dataset_adapter, opts), wss::ConfigError);
}

TEST_CASE("canonical round trip preserves gains bit-exactly", "[trace][io][property]")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        wss::Rng rng(seed);
        const std::size_t n = 5 + seed * 13;
        std::vector<double> gains(n);
        std::vector<SampleState> states(n, SampleState::observed);
        for (std::size_t i = 0; i < n; ++i)
        {
            gains[i] = rng.normal(-70.0, 7.0) / 3.0;
            if (i > 0 && i + 1 < n && rng.uniform() < 0.2)
                states[i] = SampleState::missing;
        }
        std::vector<wss::ChannelTrace> traces;
        traces.emplace_back(wss::LinkId{"LH", 1, "RA", 2}, wss::SamplingSpec{50.0, 1234.0}, gains, states);
        traces.emplace_back(wss::LinkId{"LH", 3, "LW", 3}, wss::SamplingSpec{50.0, 0.0}, gains, states);
        const auto text = wss::to_canonical_csv(traces);
        std::istringstream in(text);
        const auto back = wss::parse_trace(in, wss::TraceFormat::canonical_csv);
        REQUIRE(back.size() == 2);
        CHECK(back[0] == traces[0]);
        CHECK(back[1] == traces[1]);
    }
}

TEST_CASE("regularize fills short gaps", "[trace][regularize]")
{
    const auto t = with_gap({-60, 0, -62}, {1});
    const auto lin = wss::regularize(t, {wss::GapMode::linear_interpolate, 1});
    CHECK(lin.gains()[1] == -61.0);
    CHECK(lin.valid_mask() == std::vector<bool>{true, false, true});
    CHECK(lin.is_usable(1));

    const auto hold = wss::regularize(t, {wss::GapMode::hold_last, 1});
    CHECK(hold.gains()[1] == -60.0);
    CHECK(hold.gains()[2] == -62.0);

    const auto drop = wss::regularize(t, {wss::GapMode::drop_window, 5});
    CHECK(drop == t);
}

TEST_CASE("regularize leaves long gaps invalid", "[trace][regularize]")
{
    const auto t = with_gap({-60, 0, 0, 0, 0, 0, -62}, {1, 2, 3, 4, 5});
    for (auto mode : {wss::GapMode::linear_interpolate, wss::GapMode::hold_last})
    {
        const auto r = wss::regularize(t, {mode, 2});
        CHECK(r.missing_count() == 5);
        CHECK(r == t);
    }
}

TEST_CASE("hold_last cannot fill a leading gap", "[trace][regularize]")
{
    const auto t = with_gap({0, 0, -61, -62}, {0, 1});
    try
    {
        wss::regularize(t, {wss::GapMode::hold_last, 3});
        FAIL("expected an error");
    }
    catch (const wss::InputError &e)
    {
        CHECK(std::string(e.what()).find("first valid index is 2") != std::string::npos);
    }
    // Interpolation just leaves it.
    CHECK(wss::regularize(t, {wss::GapMode::linear_interpolate, 3}).missing_count() == 2);
}

TEST_CASE("regularize is idempotent", "[trace][regularize][property]")
{
    wss::Rng rng(3);
    for (int trial = 0; trial < 50; ++trial)
    {
        const std::size_t n = 40;
        std::vector<double> gains(n);
        std::vector<std::size_t> missing;
        for (std::size_t i = 0; i < n; ++i)
        {
            gains[i] = rng.normal(-65.0, 2.0);
            if (i > 0 && rng.uniform() < 0.3)
                missing.push_back(i);
        }
        const auto t = with_gap(gains, missing);
        for (auto mode : {wss::GapMode::drop_window, wss::GapMode::hold_last, wss::GapMode::linear_interpolate})
        {
            const wss::GapPolicy policy{mode, static_cast<std::size_t>(trial % 4)};
            const auto once = wss::regularize(t, policy);
            CHECK(wss::regularize(once, policy) == once);
        }
    }
}

TEST_CASE("slice", "[trace]")
{
    std::vector<double> g(10);
    for (int i = 0; i < 10; ++i)
        g[i] = -50.0 - i;
    const wss::ChannelTrace t(wss::LinkId{"LH", 1, "LH", 2}, {50.0, 100.0}, g);
    CHECK(wss::slice(t, 0, 10) == t);
    const auto s = wss::slice(t, 2, 3);
    REQUIRE(s.size() == 3);
    CHECK(s.gains()[0] == -52.0);
    CHECK(s.gains()[2] == -54.0);
    CHECK(s.sampling().start_time_ms == 200.0);
    CHECK_THROWS_AS(wss::slice(t, 8, 5), wss::BoundsError);
    CHECK_THROWS_AS(wss::slice(t, 11, 0), wss::BoundsError);
}

TEST_CASE("ChannelTrace invariants", "[trace]")
{
    CHECK_THROWS_AS(wss::ChannelTrace(wss::LinkId{}, {}, std::vector<double>{}), wss::ParameterError);
    CHECK_THROWS_AS(wss::ChannelTrace(wss::LinkId{}, {}, std::vector<double>{1.0, std::nan("")}), wss::DomainError);
    CHECK_THROWS_AS(wss::ChannelTrace(wss::LinkId{}, {0.0, 0.0}, std::vector<double>{1.0}), wss::ParameterError);
}
