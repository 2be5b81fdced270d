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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

// Distribution tails used to turn test statistics into p-values.

namespace wss::special
{

namespace detail
{
inline constexpr double eps = 1e-15;
inline constexpr double tiny = 1e-300;
inline constexpr int max_iterations = 100000;

inline double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Modified Lentz evaluation of the continued fraction for I_x(a,b).
// Returns NaN when it fails to converge.
inline double beta_continued_fraction(double a, double b, double x)
{
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny)
        d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iterations; ++m)
    {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps)
            return h;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// sum_n (1-b)_n / n! * x^n / (a+n); I_x(a,b) = x^a / B(a,b) * sum.
inline double beta_series(double a, double b, double x)
{
    double term = 1.0;
    double sum = 1.0 / a;
    for (int n = 1; n <= max_iterations; ++n)
    {
        term *= (n - b) * x / n;
        const double add = term / (a + n);
        sum += add;
        if (std::abs(add) < eps * std::abs(sum))
            break;
    }
    return sum;
}

// Lower regularized incomplete beta with x below the CF switch point.
inline double incomplete_beta_lower(double a, double b, double x)
{
    const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    const double cf = beta_continued_fraction(a, b, x);
    if (!std::isnan(cf))
        return std::exp(log_front) * cf / a;
    return std::exp(a * std::log(x) - log_beta(a, b)) * beta_series(a, b, x);
}

inline double gamma_series(double a, double x)
{
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < max_iterations; ++n)
    {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * eps)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_continued_fraction(double a, double x)
{
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_iterations; ++i)
    {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}
} // namespace detail

/// Regularized incomplete beta function I_x(a, b).
inline double incomplete_beta(double a, double b, double x)
{
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("incomplete_beta: shape parameters must be positive and finite");
    if (!std::isfinite(x) || x < 0.0 || x > 1.0)
        throw DomainError("incomplete_beta: x must lie in [0, 1]");
    if (x == 0.0)
        return 0.0;
    if (x == 1.0)
        return 1.0;
    if (x < (a + 1.0) / (a + b + 2.0))
        return detail::incomplete_beta_lower(a, b, x);
    return 1.0 - detail::incomplete_beta_lower(b, a, 1.0 - x);
}

/// Upper regularized incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
inline double gamma_q(double a, double x)
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError("gamma_q: shape must be positive and finite");
    if (std::isnan(x))
        throw DomainError("gamma_q: x is NaN");
    if (x <= 0.0)
        return 1.0;
    if (std::isinf(x))
        return 0.0;
    if (x < a + 1.0)
        return 1.0 - detail::gamma_series(a, x);
    return detail::gamma_continued_fraction(a, x);
}

/// P(F(d1, d2) >= x).
inline double f_upper_tail(double x, double d1, double d2)
{
    if (!std::isfinite(x))
        throw DomainError("f_upper_tail: x must be finite");
    if (!(d1 > 0.0) || !(d2 > 0.0) || !std::isfinite(d1) || !std::isfinite(d2))
        throw DomainError("f_upper_tail: degrees of freedom must be positive");
    if (x <= 0.0)
        return 1.0;
    // d2 / (d2 + d1 x) computed without cancellation for large x.
    const double z = d2 / (d2 + d1 * x);
    return incomplete_beta(0.5 * d2, 0.5 * d1, z);
}

/// P(chi^2_k >= x).
inline double chi2_upper_tail(double x, double k)
{
    if (!std::isfinite(x))
        throw DomainError("chi2_upper_tail: x must be finite");
    if (!(k >= 1.0) || !std::isfinite(k))
        throw DomainError("chi2_upper_tail: k must be >= 1");
    if (x <= 0.0)
        return 1.0;
    return gamma_q(0.5 * k, 0.5 * x);
}

/// Survival function of the Kolmogorov distribution, P(K >= lambda).
inline double kolmogorov_upper_tail(double lambda)
{
    if (std::isnan(lambda))
        throw DomainError("kolmogorov_upper_tail: lambda is NaN");
    if (lambda <= 0.0)
        return 1.0;
    if (lambda < 1.18)
    {
        // Jacobi-theta form; the alternating series converges slowly here.
        const double pi = std::numbers::pi;
        const double w = pi * pi / (8.0 * lambda * lambda);
        double sum = 0.0;
        for (int k = 1; k <= 50; ++k)
        {
            const double odd = 2.0 * k - 1.0;
            const double term = std::exp(-odd * odd * w);
            sum += term;
            if (term < 1e-17 * sum)
                break;
        }
        const double cdf = std::sqrt(2.0 * pi) / lambda * sum;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k)
    {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17)
            break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

} // namespace wss::special
