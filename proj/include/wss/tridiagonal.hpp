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
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

// Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for selected
// eigenvalues and shifted inverse iteration for their eigenvectors.

namespace wss::tridiagonal
{

/// Number of eigenvalues strictly below x. offdiag[i] couples rows i and i+1.
inline std::size_t count_below(std::span<const double> diag, std::span<const double> offdiag, double x)
{
    const double guard = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    std::size_t count = 0;
    double q = diag[0] - x;
    if (q == 0.0)
        q = -guard;
    count += q < 0.0;
    for (std::size_t i = 1; i < diag.size(); ++i)
    {
        q = diag[i] - x - offdiag[i - 1] * offdiag[i - 1] / q;
        if (q == 0.0)
            q = -guard;
        count += q < 0.0;
    }
    return count;
}

/// Eigenvalue with 0-based ascending rank `index`, by bisection.
inline double eigenvalue(std::span<const double> diag, std::span<const double> offdiag, std::size_t index)
{
    const std::size_t n = diag.size();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double r = (i > 0 ? std::abs(offdiag[i - 1]) : 0.0) + (i + 1 < n ? std::abs(offdiag[i]) : 0.0);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    const double scale = std::max(std::abs(lo), std::abs(hi));
    lo -= 1e-12 * scale + std::numeric_limits<double>::min();
    hi += 1e-12 * scale + std::numeric_limits<double>::min();
    for (int iter = 0; iter < 200; ++iter)
    {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (count_below(diag, offdiag, mid) > index)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)))
            break;
    }
    return 0.5 * (lo + hi);
}

/// Solves (T - shift I) x = rhs in place with partial pivoting (LAPACK gtsv
/// elimination). Exactly singular pivots are perturbed to a tiny value.
inline void solve_shifted(std::span<const double> diag, std::span<const double> offdiag, double shift,
                          std::vector<double> &rhs)
{
    const std::size_t n = diag.size();
    if (n == 1)
    {
        double p = diag[0] - shift;
        if (p == 0.0)
            p = std::numeric_limits<double>::epsilon();
        rhs[0] /= p;
        return;
    }
    std::vector<double> dl(offdiag.begin(), offdiag.end()); // sub-diagonal
    std::vector<double> du(offdiag.begin(), offdiag.end()); // super-diagonal
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i)
        d[i] = diag[i] - shift;
    std::vector<double> du2(n, 0.0); // second super-diagonal from row swaps
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        norm = std::max(norm, std::abs(diag[i]) + (i > 0 ? std::abs(offdiag[i - 1]) : 0.0) +
                                  (i + 1 < n ? std::abs(offdiag[i]) : 0.0));
    const double tiny_pivot = std::max(norm, 1.0) * std::numeric_limits<double>::epsilon();

    for (std::size_t i = 0; i + 1 < n; ++i)
    {
        if (std::abs(d[i]) >= std::abs(dl[i]))
        {
            if (d[i] == 0.0)
                d[i] = tiny_pivot;
            const double fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            rhs[i + 1] -= fact * rhs[i];
            dl[i] = 0.0;
        }
        else
        {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            const double temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if (i + 2 < n)
            {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            std::swap(rhs[i], rhs[i + 1]);
            rhs[i + 1] -= fact * rhs[i];
        }
    }
    if (d[n - 1] == 0.0)
        d[n - 1] = tiny_pivot;
    rhs[n - 1] /= d[n - 1];
    rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
    for (std::size_t k = n - 2; k-- > 0;)
        rhs[k] = (rhs[k] - du[k] * rhs[k + 1] - du2[k] * rhs[k + 2]) / d[k];
}

/// Unit eigenvector for `lambda`, orthogonalized against `previous`.
inline std::vector<double> eigenvector(std::span<const double> diag, std::span<const double> offdiag, double lambda,
                                       std::span<const std::vector<double>> previous)
{
    const std::size_t n = diag.size();
    std::vector<double> v(n);
    // Deterministic start with no symmetry, so it overlaps both even and odd eigenvectors.
    for (std::size_t i = 0; i < n; ++i)
        v[i] = 1.0 + 0.37 * static_cast<double>(i) / static_cast<double>(n) + 0.05 * std::sin(1.7 * static_cast<double>(i));

    const auto orthonormalize = [&](std::vector<double> &x) {
        for (const auto &p : previous)
        {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                dot += x[i] * p[i];
            for (std::size_t i = 0; i < n; ++i)
                x[i] -= dot * p[i];
        }
        double norm = 0.0;
        for (double e : x)
            norm += e * e;
        norm = std::sqrt(norm);
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw ParameterError("inverse iteration failed to produce an eigenvector");
        for (double &e : x)
            e /= norm;
    };

    orthonormalize(v);
    std::vector<double> prev = v;
    for (int iter = 0; iter < 8; ++iter)
    {
        solve_shifted(diag, offdiag, lambda, v);
        orthonormalize(v);
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            dot += v[i] * prev[i];
        if (iter >= 2 && 1.0 - std::abs(dot) < 1e-15)
            break;
        prev = v;
    }
    return v;
}

} // namespace wss::tridiagonal
