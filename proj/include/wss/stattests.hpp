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
#include "wss/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wss
{

enum class TestKind
{
    anova,
    brown_forsythe,
    ks,
    kruskal_wallis
};

inline constexpr TestKind all_test_kinds[] = {TestKind::anova, TestKind::brown_forsythe, TestKind::ks,
                                              TestKind::kruskal_wallis};

inline std::string_view to_string(TestKind kind)
{
    switch (kind)
    {
    case TestKind::anova: return "anova";
    case TestKind::brown_forsythe: return "brown_forsythe";
    case TestKind::ks: return "ks";
    case TestKind::kruskal_wallis: return "kruskal_wallis";
    }
    return "unknown";
}

inline TestKind parse_test_kind(std::string_view name)
{
    if (name == "anova")
        return TestKind::anova;
    if (name == "brown_forsythe" || name == "bf")
        return TestKind::brown_forsythe;
    if (name == "ks" || name == "kolmogorov_smirnov")
        return TestKind::ks;
    if (name == "kruskal_wallis" || name == "kw")
        return TestKind::kruskal_wallis;
    throw ConfigError("unknown test '" + std::string(name) + "'");
}

// For chi-square outcomes numerator holds k and denominator is 0; K-S leaves both 0.
struct DegreesOfFreedom
{
    double numerator = 0.0;
    double denominator = 0.0;
};

struct TestOutcome
{
    TestKind test = TestKind::anova;
    double statistic = 0.0;
    DegreesOfFreedom dof;
    double p_value = 1.0;
};

enum class KsMode
{
    exact,
    asymptotic,
    automatic
};

inline std::string_view to_string(KsMode mode)
{
    switch (mode)
    {
    case KsMode::exact: return "exact";
    case KsMode::asymptotic: return "asymptotic";
    case KsMode::automatic: return "automatic";
    }
    return "unknown";
}

inline KsMode parse_ks_mode(std::string_view name)
{
    if (name == "exact")
        return KsMode::exact;
    if (name == "asymptotic")
        return KsMode::asymptotic;
    if (name == "automatic" || name == "auto")
        return KsMode::automatic;
    throw ConfigError("unknown K-S mode '" + std::string(name) + "'");
}

// Exact K-S p-values are used in automatic mode while min(n_a, n_b) <= this.
inline constexpr std::size_t ks_exact_threshold = 25;

namespace detail
{

inline void check_sample(std::span<const double> x, std::size_t min_size, std::string_view test, std::string_view which)
{
    if (x.size() < min_size)
        throw ParameterError(std::string(test) + ": sample " + std::string(which) + " needs at least " +
                             std::to_string(min_size) + " values, got " + std::to_string(x.size()));
    for (double v : x)
        if (!std::isfinite(v))
            throw DomainError(std::string(test) + ": sample " + std::string(which) + " contains a non-finite value");
}

inline bool is_constant(std::span<const double> x)
{
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

struct FRatio
{
    double statistic;
    double dof_between;
    double dof_within;
    double p_value;
};

// One-way ANOVA F over k groups. Values are shifted by the pooled minimum
// before accumulation; constant groups contribute an exact zero within-SS.
inline FRatio one_way_f(std::span<const std::span<const double>> groups)
{
    const std::size_t k = groups.size();
    std::size_t total = 0;
    double pivot = std::numeric_limits<double>::infinity();
    for (const auto &g : groups)
    {
        total += g.size();
        for (double v : g)
            pivot = std::min(pivot, v);
    }

    std::vector<double> means(k);
    double grand_sum = 0.0;
    double within = 0.0;
    for (std::size_t i = 0; i < k; ++i)
    {
        const auto &g = groups[i];
        double sum = 0.0;
        for (double v : g)
            sum += v - pivot;
        grand_sum += sum;
        if (is_constant(g))
        {
            means[i] = g.front() - pivot;
            continue;
        }
        means[i] = sum / static_cast<double>(g.size());
        double ss = 0.0;
        for (double v : g)
        {
            const double d = (v - pivot) - means[i];
            ss += d * d;
        }
        within += ss;
    }
    const double grand_mean = grand_sum / static_cast<double>(total);
    double between = 0.0;
    for (std::size_t i = 0; i < k; ++i)
    {
        const double d = means[i] - grand_mean;
        between += static_cast<double>(groups[i].size()) * d * d;
    }

    const double df_between = static_cast<double>(k - 1);
    const double df_within = static_cast<double>(total - k);
    if (within == 0.0)
    {
        if (between == 0.0)
            return {0.0, df_between, df_within, 1.0};
        return {std::numeric_limits<double>::infinity(), df_between, df_within, 0.0};
    }
    const double f = (between / df_between) / (within / df_within);
    return {f, df_between, df_within, special::f_upper_tail(f, df_between, df_within)};
}

inline double median(std::span<const double> x)
{
    std::vector<double> v(x.begin(), x.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1)
        return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

inline std::vector<double> abs_deviation_from_median(std::span<const double> x)
{
    const double med = median(x);
    std::vector<double> d(x.size());
    std::transform(x.begin(), x.end(), d.begin(), [med](double v) { return std::abs(v - med); });
    return d;
}

struct KsStatistic
{
    std::int64_t scaled; // max |i*n_b - j*n_a| over pooled unique values
    double d;
};

inline KsStatistic ks_statistic(std::span<const double> sorted_a, std::span<const double> sorted_b)
{
    const auto na = static_cast<std::int64_t>(sorted_a.size());
    const auto nb = static_cast<std::int64_t>(sorted_b.size());
    std::int64_t i = 0, j = 0, best = 0;
    while (i < na || j < nb)
    {
        double v;
        if (j >= nb || (i < na && sorted_a[static_cast<std::size_t>(i)] <= sorted_b[static_cast<std::size_t>(j)]))
            v = sorted_a[static_cast<std::size_t>(i)];
        else
            v = sorted_b[static_cast<std::size_t>(j)];
        while (i < na && sorted_a[static_cast<std::size_t>(i)] == v)
            ++i;
        while (j < nb && sorted_b[static_cast<std::size_t>(j)] == v)
            ++j;
        best = std::max(best, std::abs(i * nb - j * na));
    }
    return {best, static_cast<double>(best) / static_cast<double>(na * nb)};
}

// Exact permutation p-value P(D >= observed) conditional on the pooled tie
// structure. Probability mass is propagated along the label lattice and
// absorbed at tie-block ends where the ECDF gap reaches the observed value.
inline double ks_exact_p(std::size_t na, std::size_t nb, std::span<const double> pooled_sorted,
                         std::int64_t observed_scaled)
{
    const std::size_t n1 = std::min(na, nb), n2 = std::max(na, nb);
    const std::size_t total = n1 + n2;
    std::vector<char> block_end(total + 1, 0);
    for (std::size_t s = 1; s <= total; ++s)
        block_end[s] = (s == total || pooled_sorted[s - 1] < pooled_sorted[s]) ? 1 : 0;

    const auto n1i = static_cast<std::int64_t>(n1), n2i = static_cast<std::int64_t>(n2);
    std::vector<double> mass((n1 + 1) * (n2 + 1), 0.0);
    const auto at = [&](std::size_t i, std::size_t j) -> double & { return mass[i * (n2 + 1) + j]; };
    at(0, 0) = 1.0;
    double exited = 0.0;
    for (std::size_t i = 0; i <= n1; ++i)
    {
        for (std::size_t j = 0; j <= n2; ++j)
        {
            double m = at(i, j);
            if (m == 0.0)
                continue;
            const std::size_t s = i + j;
            if (block_end[s] &&
                std::abs(static_cast<std::int64_t>(i) * n2i - static_cast<std::int64_t>(j) * n1i) >= observed_scaled)
            {
                exited += m;
                continue;
            }
            if (s == total)
                continue;
            const double remaining = static_cast<double>(total - s);
            if (i < n1)
                at(i + 1, j) += m * (static_cast<double>(n1 - i) / remaining);
            if (j < n2)
                at(i, j + 1) += m * (static_cast<double>(n2 - j) / remaining);
        }
    }
    return std::clamp(exited, 0.0, 1.0);
}

// Midranks (1-based) of the pooled sample a ++ b.
inline std::vector<double> pooled_midranks(std::span<const double> a, std::span<const double> b, double &tie_sum)
{
    const std::size_t n = a.size() + b.size();
    std::vector<std::pair<double, std::size_t>> items;
    items.reserve(n);
    for (std::size_t i = 0; i < a.size(); ++i)
        items.emplace_back(a[i], i);
    for (std::size_t i = 0; i < b.size(); ++i)
        items.emplace_back(b[i], a.size() + i);
    std::sort(items.begin(), items.end());
    std::vector<double> ranks(n);
    tie_sum = 0.0;
    std::size_t i = 0;
    while (i < n)
    {
        std::size_t j = i;
        while (j < n && items[j].first == items[i].first)
            ++j;
        const double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t)
            ranks[items[t].second] = rank;
        const double t = static_cast<double>(j - i);
        tie_sum += t * t * t - t;
        i = j;
    }
    return ranks;
}

} // namespace detail

/// Two-group one-way ANOVA: F = MS_between / MS_within with dof (1, N - 2).
/// Identical constant samples give F = 0, p = 1; zero within-variance with
/// distinct means gives F = inf, p = 0.
inline TestOutcome anova_oneway(std::span<const double> a, std::span<const double> b)
{
    detail::check_sample(a, 2, "anova", "a");
    detail::check_sample(b, 2, "anova", "b");
    const std::span<const double> groups[] = {a, b};
    const auto f = detail::one_way_f(groups);
    return {TestKind::anova, f.statistic, {f.dof_between, f.dof_within}, f.p_value};
}

/// Brown-Forsythe: ANOVA on absolute deviations from each sample's median.
inline TestOutcome brown_forsythe(std::span<const double> a, std::span<const double> b)
{
    detail::check_sample(a, 2, "brown_forsythe", "a");
    detail::check_sample(b, 2, "brown_forsythe", "b");
    const auto da = detail::abs_deviation_from_median(a);
    const auto db = detail::abs_deviation_from_median(b);
    const std::span<const double> groups[] = {da, db};
    const auto f = detail::one_way_f(groups);
    return {TestKind::brown_forsythe, f.statistic, {f.dof_between, f.dof_within}, f.p_value};
}

/// Two-sided two-sample Kolmogorov-Smirnov test.
///
/// D is evaluated at the pooled unique values, so ties are handled exactly.
/// The exact p-value is the permutation probability given the pooled ties;
/// the asymptotic one is the Kolmogorov tail at D * sqrt(n_a n_b / (n_a + n_b)).
inline TestOutcome ks_two_sample(std::span<const double> a, std::span<const double> b,
                                 KsMode mode = KsMode::automatic)
{
    detail::check_sample(a, 1, "ks", "a");
    detail::check_sample(b, 1, "ks", "b");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const auto stat = detail::ks_statistic(sa, sb);

    if (mode == KsMode::automatic)
        mode = std::min(a.size(), b.size()) <= ks_exact_threshold ? KsMode::exact : KsMode::asymptotic;

    double p;
    if (stat.scaled == 0)
        p = 1.0;
    else if (mode == KsMode::exact)
    {
        std::vector<double> pooled;
        pooled.reserve(sa.size() + sb.size());
        std::merge(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(pooled));
        p = detail::ks_exact_p(a.size(), b.size(), pooled, stat.scaled);
    }
    else
    {
        const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
        p = special::kolmogorov_upper_tail(stat.d * std::sqrt(na * nb / (na + nb)));
    }
    return {TestKind::ks, stat.d, {}, p};
}

/// Kruskal-Wallis H with midranks and tie correction; p from chi^2 with 1 dof.
inline TestOutcome kruskal_wallis(std::span<const double> a, std::span<const double> b)
{
    detail::check_sample(a, 2, "kruskal_wallis", "a");
    detail::check_sample(b, 2, "kruskal_wallis", "b");
    double tie_sum = 0.0;
    const auto ranks = detail::pooled_midranks(a, b, tie_sum);
    const double n = static_cast<double>(ranks.size());
    const double correction = 1.0 - tie_sum / (n * n * n - n);
    if (correction <= 0.0)
        return {TestKind::kruskal_wallis, 0.0, {1.0, 0.0}, 1.0};

    double ra = 0.0, rb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        ra += ranks[i];
    for (std::size_t i = 0; i < b.size(); ++i)
        rb += ranks[a.size() + i];
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double raw = 12.0 / (n * (n + 1.0)) * (ra * ra / na + rb * rb / nb) - 3.0 * (n + 1.0);
    const double h = std::max(0.0, raw / correction);
    return {TestKind::kruskal_wallis, h, {1.0, 0.0}, special::chi2_upper_tail(h, 1.0)};
}

inline TestOutcome run_test(TestKind kind, std::span<const double> a, std::span<const double> b,
                            KsMode ks_mode = KsMode::automatic)
{
    switch (kind)
    {
    case TestKind::anova: return anova_oneway(a, b);
    case TestKind::brown_forsythe: return brown_forsythe(a, b);
    case TestKind::ks: return ks_two_sample(a, b, ks_mode);
    case TestKind::kruskal_wallis: return kruskal_wallis(a, b);
    }
    throw ParameterError("unknown test kind");
}

} // namespace wss
