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

#include <cctype>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wss
{

enum class LinkKind
{
    on_body,
    body_to_body
};

/// Directed radio link between two body-worn nodes.
///
/// Text form is `<tx_node><tx_ban>-><rx_node><rx_ban>`, e.g. `LH7->LH5`.
struct LinkId
{
    std::string tx_node;
    int tx_ban = 1;
    std::string rx_node;
    int rx_ban = 1;

    LinkKind kind() const noexcept { return tx_ban == rx_ban ? LinkKind::on_body : LinkKind::body_to_body; }

    std::string to_string() const
    {
        return tx_node + std::to_string(tx_ban) + "->" + rx_node + std::to_string(rx_ban);
    }

    friend auto operator<=>(const LinkId &, const LinkId &) = default;
    friend bool operator==(const LinkId &, const LinkId &) = default;
};

namespace detail
{
// "LH7" -> ("LH", 7). Returns nullopt unless the token is letters followed by digits.
inline std::optional<std::pair<std::string, int>> split_node_token(std::string_view token)
{
    std::size_t i = 0;
    while (i < token.size() && std::isalpha(static_cast<unsigned char>(token[i])))
        ++i;
    if (i == 0 || i == token.size())
        return std::nullopt;
    int ban = 0;
    for (std::size_t j = i; j < token.size(); ++j)
    {
        if (!std::isdigit(static_cast<unsigned char>(token[j])))
            return std::nullopt;
        ban = ban * 10 + (token[j] - '0');
        if (ban > 1000000)
            return std::nullopt;
    }
    return std::pair{std::string(token.substr(0, i)), ban};
}
} // namespace detail

/// Parses the `LH7->LH5` text form. Throws ConfigError on malformed labels.
inline LinkId parse_link_id(std::string_view text)
{
    const auto arrow = text.find("->");
    if (arrow == std::string_view::npos)
        throw ConfigError("malformed link label '" + std::string(text) + "' (expected e.g. LH7->LH5)");
    const auto tx = detail::split_node_token(text.substr(0, arrow));
    const auto rx = detail::split_node_token(text.substr(arrow + 2));
    if (!tx || !rx)
        throw ConfigError("malformed link label '" + std::string(text) + "' (expected e.g. LH7->LH5)");
    return LinkId{tx->first, tx->second, rx->first, rx->second};
}

struct SamplingSpec
{
    double sample_interval_ms = 50.0;
    double start_time_ms = 0.0;
};

enum class SampleState : std::uint8_t
{
    observed, // recorded gain
    filled,   // imputed by regularize(); gain finite, not a real observation
    missing   // dropout or receive-floor sentinel; gain is NaN
};

/// Uniformly sampled channel-gain series (dB) for one directed link.
///
/// Sample i sits at start_time_ms + i * sample_interval_ms. Missing samples
/// hold NaN; observed and filled samples are always finite.
class ChannelTrace
{
public:
    ChannelTrace(LinkId link, SamplingSpec sampling, std::vector<double> gains, std::vector<SampleState> states)
        : link_(std::move(link)), sampling_(sampling), gains_(std::move(gains)), states_(std::move(states))
    {
        if (gains_.empty() || gains_.size() != states_.size())
            throw ParameterError("trace needs equal-length gains and states, length >= 1");
        if (!(sampling_.sample_interval_ms > 0.0) || !std::isfinite(sampling_.sample_interval_ms))
            throw ParameterError("sample interval must be positive");
        for (std::size_t i = 0; i < gains_.size(); ++i)
        {
            if (states_[i] == SampleState::missing)
                gains_[i] = std::numeric_limits<double>::quiet_NaN();
            else if (!std::isfinite(gains_[i]))
                throw DomainError("non-finite gain at index " + std::to_string(i) + " of " + link_.to_string());
        }
    }

    // Fully observed trace.
    ChannelTrace(LinkId link, SamplingSpec sampling, std::vector<double> gains)
        : ChannelTrace(std::move(link), sampling, gains, std::vector<SampleState>(gains.size(), SampleState::observed)) {}

    const LinkId &link() const noexcept { return link_; }
    const SamplingSpec &sampling() const noexcept { return sampling_; }
    std::size_t size() const noexcept { return gains_.size(); }
    std::span<const double> gains() const noexcept { return gains_; }
    std::span<const SampleState> states() const noexcept { return states_; }

    double time_ms(std::size_t i) const noexcept
    {
        return sampling_.start_time_ms + static_cast<double>(i) * sampling_.sample_interval_ms;
    }

    // False for dropouts and for filled samples.
    bool is_valid(std::size_t i) const noexcept { return states_[i] == SampleState::observed; }

    // True when the sample may enter a statistic (observed or filled).
    bool is_usable(std::size_t i) const noexcept { return states_[i] != SampleState::missing; }

    std::vector<bool> valid_mask() const
    {
        std::vector<bool> mask(states_.size());
        for (std::size_t i = 0; i < states_.size(); ++i)
            mask[i] = is_valid(i);
        return mask;
    }

    std::size_t missing_count() const noexcept
    {
        std::size_t n = 0;
        for (auto s : states_)
            n += s == SampleState::missing;
        return n;
    }

    friend bool operator==(const ChannelTrace &a, const ChannelTrace &b)
    {
        if (a.link_ != b.link_ || a.states_ != b.states_ || a.gains_.size() != b.gains_.size() ||
            a.sampling_.sample_interval_ms != b.sampling_.sample_interval_ms ||
            a.sampling_.start_time_ms != b.sampling_.start_time_ms)
            return false;
        for (std::size_t i = 0; i < a.gains_.size(); ++i)
        {
            const bool na = std::isnan(a.gains_[i]), nb = std::isnan(b.gains_[i]);
            if (na != nb || (!na && a.gains_[i] != b.gains_[i]))
                return false;
        }
        return true;
    }

private:
    LinkId link_;
    SamplingSpec sampling_;
    std::vector<double> gains_;
    std::vector<SampleState> states_;
};

enum class GapMode
{
    drop_window,
    hold_last,
    linear_interpolate
};

struct GapPolicy
{
    GapMode mode = GapMode::drop_window;
    std::size_t max_gap = 0; // ignored by drop_window
};

/// Fills missing runs of length <= max_gap. Filled samples stay flagged
/// invalid; longer runs stay missing. drop_window returns the trace unchanged.
inline ChannelTrace regularize(const ChannelTrace &trace, const GapPolicy &policy)
{
    if (policy.mode == GapMode::drop_window)
        return trace;

    std::vector<double> gains(trace.gains().begin(), trace.gains().end());
    std::vector<SampleState> states(trace.states().begin(), trace.states().end());
    const std::size_t n = gains.size();

    if (policy.mode == GapMode::hold_last && states[0] == SampleState::missing)
    {
        std::size_t first = 0;
        while (first < n && states[first] == SampleState::missing)
            ++first;
        if (first == n)
            throw InputError("trace " + trace.link().to_string() + " has no usable samples to hold");
        throw InputError("trace " + trace.link().to_string() +
                         " begins with a gap that hold_last cannot fill; first valid index is " + std::to_string(first));
    }

    std::size_t i = 0;
    while (i < n)
    {
        if (states[i] != SampleState::missing)
        {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < n && states[end] == SampleState::missing)
            ++end;
        const std::size_t run = end - i;
        const bool has_left = i > 0;
        const bool has_right = end < n;

        if (run <= policy.max_gap)
        {
            if (policy.mode == GapMode::hold_last && has_left)
            {
                for (std::size_t j = i; j < end; ++j)
                {
                    gains[j] = gains[i - 1];
                    states[j] = SampleState::filled;
                }
            }
            else if (policy.mode == GapMode::linear_interpolate && has_left && has_right)
            {
                const double lo = gains[i - 1], hi = gains[end];
                const double span = static_cast<double>(run + 1);
                for (std::size_t j = i; j < end; ++j)
                {
                    const double w = static_cast<double>(j - i + 1) / span;
                    gains[j] = lo + (hi - lo) * w;
                    states[j] = SampleState::filled;
                }
            }
        }
        i = end;
    }
    return ChannelTrace(trace.link(), trace.sampling(), std::move(gains), std::move(states));
}

/// Contiguous sub-trace [start_index, start_index + length).
inline ChannelTrace slice(const ChannelTrace &trace, std::size_t start_index, std::size_t length)
{
    if (length == 0 || start_index > trace.size() || length > trace.size() - start_index)
        throw BoundsError("slice [" + std::to_string(start_index) + ", +" + std::to_string(length) +
                          ") out of range for trace of length " + std::to_string(trace.size()));
    const auto first = static_cast<std::ptrdiff_t>(start_index);
    const auto last = first + static_cast<std::ptrdiff_t>(length);
    SamplingSpec sampling = trace.sampling();
    sampling.start_time_ms = trace.time_ms(start_index);
    return ChannelTrace(trace.link(), sampling,
                        std::vector<double>(trace.gains().begin() + first, trace.gains().begin() + last),
                        std::vector<SampleState>(trace.states().begin() + first, trace.states().begin() + last));
}

} // namespace wss
