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
#include "wss/trace.hpp"
#include "wss/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace wss
{

/// Orthonormal taper set with energy-concentration eigenvalues.
struct TaperBank
{
    std::size_t length = 0;
    double nw = 0.0;
    std::size_t k = 0;
    std::vector<std::vector<double>> tapers;
    std::vector<double> eigenvalues;
};

namespace detail
{

// Fraction of a unit-norm sequence's energy inside |f| <= half_bandwidth
// (cycles/sample): v' A v with A[m][n] = sin(2 pi W (m-n)) / (pi (m-n)).
inline double band_concentration(std::span<const double> v, double half_bandwidth)
{
    const std::size_t n = v.size();
    const double pi = std::numbers::pi;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += v[i] * v[i];
    acc *= 2.0 * half_bandwidth;
    for (std::size_t lag = 1; lag < n; ++lag)
    {
        double r = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i)
            r += v[i] * v[i + lag];
        acc += 2.0 * r * std::sin(2.0 * pi * half_bandwidth * static_cast<double>(lag)) / (pi * static_cast<double>(lag));
    }
    return acc;
}

} // namespace detail

/// Tridiagonal matrix whose eigenvectors are the Slepian sequences:
/// diag[n] = ((N-1-2n)/2)^2 cos(2 pi W), offdiag[n-1] = n (N-n) / 2, W = NW/N.
struct SlepianTridiagonal
{
    std::vector<double> diag;
    std::vector<double> offdiag;
};

inline SlepianTridiagonal slepian_tridiagonal(std::size_t length, double nw)
{
    const double n = static_cast<double>(length);
    const double w = nw / n;
    SlepianTridiagonal m;
    m.diag.resize(length);
    m.offdiag.resize(length > 0 ? length - 1 : 0);
    const double c = std::cos(2.0 * std::numbers::pi * w);
    for (std::size_t i = 0; i < length; ++i)
    {
        const double h = (n - 1.0 - 2.0 * static_cast<double>(i)) / 2.0;
        m.diag[i] = h * h * c;
    }
    for (std::size_t i = 1; i < length; ++i)
        m.offdiag[i - 1] = static_cast<double>(i) * (n - static_cast<double>(i)) / 2.0;
    return m;
}

/// First k discrete prolate spheroidal sequences of the given length.
///
/// Tapers are unit-norm. Sign convention: even-order tapers have a positive
/// sum; odd-order tapers have a positive first moment sum((N-1-2n) v[n]),
/// i.e. they start with a positive lobe.
inline TaperBank dpss(std::size_t length, double nw, std::size_t k)
{
    if (!(nw >= 1.0) || !std::isfinite(nw))
        throw ParameterError("dpss: time-bandwidth product must be >= 1, got " + format_number(nw));
    if (k < 1 || static_cast<double>(k) > 2.0 * nw - 1.0)
        throw ParameterError("dpss: taper count " + std::to_string(k) + " outside [1, 2NW-1] for NW = " + format_number(nw));
    if (length < k)
        throw ParameterError("dpss: length " + std::to_string(length) + " is shorter than the taper count");
    if (!(nw < static_cast<double>(length) / 2.0))
        throw ParameterError("dpss: NW must be below length/2");

    const auto mat = slepian_tridiagonal(length, nw);
    TaperBank bank{length, nw, k, {}, {}};
    bank.tapers.reserve(k);
    for (std::size_t j = 0; j < k; ++j)
    {
        const double lambda = tridiagonal::eigenvalue(mat.diag, mat.offdiag, length - 1 - j);
        auto v = tridiagonal::eigenvector(mat.diag, mat.offdiag, lambda, bank.tapers);
        double orient = 0.0;
        for (std::size_t i = 0; i < length; ++i)
            orient += (j % 2 == 0 ? 1.0 : static_cast<double>(length) - 1.0 - 2.0 * static_cast<double>(i)) * v[i];
        if (orient < 0.0)
            for (double &e : v)
                e = -e;
        bank.eigenvalues.push_back(detail::band_concentration(v, nw / static_cast<double>(length)));
        bank.tapers.push_back(std::move(v));
    }
    return bank;
}

/// Single rectangular taper 1/sqrt(N); its eigenvalue is the concentration in
/// |f| <= 1/N.
inline TaperBank boxcar_bank(std::size_t length)
{
    if (length == 0)
        throw ParameterError("boxcar taper needs length >= 1");
    std::vector<double> taper(length, 1.0 / std::sqrt(static_cast<double>(length)));
    const double concentration = detail::band_concentration(taper, 1.0 / static_cast<double>(length));
    return TaperBank{length, 0.0, 1, {std::move(taper)}, {concentration}};
}

namespace detail
{

// Twiddle table for e^{-i 2 pi r / n}, r = 0..n-1.
struct Twiddles
{
    std::vector<double> cos_table;
    std::vector<double> sin_table;

    explicit Twiddles(std::size_t n) : cos_table(n), sin_table(n)
    {
        for (std::size_t r = 0; r < n; ++r)
        {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
            cos_table[r] = std::cos(angle);
            sin_table[r] = std::sin(angle);
        }
    }
};

inline std::vector<double> demean(std::span<const double> window)
{
    double sum = 0.0;
    for (double v : window)
        sum += v;
    const double mean = sum / static_cast<double>(window.size());
    std::vector<double> out(window.size());
    for (std::size_t i = 0; i < window.size(); ++i)
        out[i] = window[i] - mean;
    return out;
}

// |sum_t taper[t] x[t] e^{-i 2 pi j t / n}|^2 for j = 0..freqs-1, accumulated into out.
inline void accumulate_eigenspectrum(std::span<const double> centered, std::span<const double> taper,
                                     const Twiddles &tw, std::size_t freqs, std::vector<double> &out, double weight)
{
    const std::size_t n = centered.size();
    std::vector<double> tapered(n);
    for (std::size_t t = 0; t < n; ++t)
        tapered[t] = taper[t] * centered[t];
    for (std::size_t j = 0; j < freqs; ++j)
    {
        const std::size_t step = j % n;
        std::size_t r = 0;
        double re = 0.0, im = 0.0;
        for (std::size_t t = 0; t < n; ++t)
        {
            re += tapered[t] * tw.cos_table[r];
            im -= tapered[t] * tw.sin_table[r];
            r += step;
            if (r >= n)
                r -= n;
        }
        out[j] += weight * (re * re + im * im);
    }
}

} // namespace detail

/// Squared magnitude of the tapered DFT of the mean-removed window at
/// frequencies j / N cycles per sample, j = 0..freqs-1.
inline std::vector<double> eigenspectrum(std::span<const double> window, std::span<const double> taper,
                                         std::size_t freqs)
{
    if (window.empty())
        throw ParameterError("eigenspectrum: empty window");
    if (taper.size() != window.size())
        throw ParameterError("eigenspectrum: taper length " + std::to_string(taper.size()) +
                             " does not match window length " + std::to_string(window.size()));
    const auto centered = detail::demean(window);
    const detail::Twiddles tw(window.size());
    std::vector<double> out(freqs, 0.0);
    detail::accumulate_eigenspectrum(centered, taper, tw, freqs, out, 1.0);
    return out;
}

inline std::size_t one_sided_bins(std::size_t length) { return length / 2 + 1; }

/// Unweighted mean of the K eigenspectra on the one-sided grid (N/2 + 1 bins).
inline std::vector<double> multitaper_psd(std::span<const double> window, const TaperBank &bank)
{
    if (bank.length != window.size())
        throw ParameterError("multitaper_psd: taper length " + std::to_string(bank.length) +
                             " does not match window length " + std::to_string(window.size()));
    const auto centered = detail::demean(window);
    const detail::Twiddles tw(window.size());
    const std::size_t freqs = one_sided_bins(window.size());
    std::vector<double> out(freqs, 0.0);
    if (bank.k == 1)
    {
        detail::accumulate_eigenspectrum(centered, bank.tapers[0], tw, freqs, out, 1.0);
        return out;
    }
    std::vector<double> sum(freqs, 0.0);
    for (const auto &taper : bank.tapers)
        detail::accumulate_eigenspectrum(centered, taper, tw, freqs, sum, 1.0);
    for (std::size_t j = 0; j < freqs; ++j)
        out[j] = sum[j] / static_cast<double>(bank.k);
    return out;
}

enum class TaperKind
{
    dpss,
    boxcar
};

struct SpectralParams
{
    double nw = 4.0;
    std::size_t k = 7;
    TaperKind taper = TaperKind::dpss;
};

/// Per-window multitaper PSDs over non-overlapping complete windows.
struct Spectrogram
{
    double window_length_ms = 0.0;
    std::size_t samples_per_window = 0;
    std::vector<double> freqs_hz;
    std::vector<std::vector<double>> per_window_psd;
    std::vector<double> window_start_ms;
    std::size_t windows_skipped = 0; // complete windows dropped for missing samples
};

struct SpectralVariationResult
{
    double window_length_ms = 0.0;
    std::size_t samples_per_window = 0;
    std::size_t windows = 0; // M
    std::size_t windows_skipped = 0;
    std::size_t k = 0;
    double nw = 0.0;
    std::vector<double> freqs_hz;
    std::vector<double> mean_psd;
    std::vector<double> per_freq_variance;
    double v_l = 0.0;
    double v_l_normalized = 0.0; // v_l / mean over bins of mean_psd^2
};

inline std::size_t samples_per_window(double window_length_ms, double sample_interval_ms)
{
    const double ratio = window_length_ms / sample_interval_ms;
    const double whole = std::round(ratio);
    if (!(window_length_ms > 0.0) || whole < 1.0 || std::abs(ratio - whole) > 1e-9 * std::max(1.0, ratio))
        throw ConfigError("spectral window " + format_number(window_length_ms) + " ms is not a whole number of " +
                          format_number(sample_interval_ms) + " ms samples");
    return static_cast<std::size_t>(whole);
}

inline TaperBank make_taper_bank(std::size_t length, const SpectralParams &params)
{
    return params.taper == TaperKind::boxcar ? boxcar_bank(length) : dpss(length, params.nw, params.k);
}

inline Spectrogram spectrogram(const ChannelTrace &trace, double window_length_ms, const TaperBank &bank)
{
    const double dt = trace.sampling().sample_interval_ms;
    const std::size_t ln = samples_per_window(window_length_ms, dt);
    if (bank.length != ln)
        throw ParameterError("taper bank length does not match the spectral window");
    Spectrogram s;
    s.window_length_ms = window_length_ms;
    s.samples_per_window = ln;
    const std::size_t bins = one_sided_bins(ln);
    s.freqs_hz.resize(bins);
    for (std::size_t j = 0; j < bins; ++j)
        s.freqs_hz[j] = static_cast<double>(j) * 1000.0 / (dt * static_cast<double>(ln));
    const std::size_t m = trace.size() / ln;
    for (std::size_t w = 0; w < m; ++w)
    {
        bool usable = true;
        for (std::size_t i = w * ln; i < (w + 1) * ln && usable; ++i)
            usable = trace.is_usable(i);
        if (!usable)
        {
            ++s.windows_skipped;
            continue;
        }
        s.per_window_psd.push_back(multitaper_psd(trace.gains().subspan(w * ln, ln), bank));
        s.window_start_ms.push_back(trace.time_ms(w * ln));
    }
    return s;
}

/// Across-window variance of the multitaper PSD at each frequency, and its
/// mean over frequency (V_L). Uses Welford accumulation, so a trace of
/// identical windows yields exactly zero.
inline SpectralVariationResult spectral_variation(const Spectrogram &spec, const TaperBank &bank)
{
    const std::size_t m = spec.per_window_psd.size();
    if (m < 2)
        throw InsufficientDataError("spectral variation needs at least 2 complete usable windows of " +
                                    format_number(spec.window_length_ms) + " ms, got " + std::to_string(m));
    const std::size_t bins = spec.freqs_hz.size();
    SpectralVariationResult r;
    r.window_length_ms = spec.window_length_ms;
    r.samples_per_window = spec.samples_per_window;
    r.windows = m;
    r.windows_skipped = spec.windows_skipped;
    r.k = bank.k;
    r.nw = bank.nw;
    r.freqs_hz = spec.freqs_hz;
    r.mean_psd.assign(bins, 0.0);
    std::vector<double> m2(bins, 0.0);
    for (std::size_t w = 0; w < m; ++w)
    {
        const auto &psd = spec.per_window_psd[w];
        const double count = static_cast<double>(w + 1);
        for (std::size_t j = 0; j < bins; ++j)
        {
            const double delta = psd[j] - r.mean_psd[j];
            r.mean_psd[j] += delta / count;
            m2[j] += delta * (psd[j] - r.mean_psd[j]);
        }
    }
    r.per_freq_variance.resize(bins);
    double var_sum = 0.0, power_sq_sum = 0.0;
    for (std::size_t j = 0; j < bins; ++j)
    {
        r.per_freq_variance[j] = m2[j] / static_cast<double>(m);
        var_sum += r.per_freq_variance[j];
        power_sq_sum += r.mean_psd[j] * r.mean_psd[j];
    }
    r.v_l = var_sum / static_cast<double>(bins);
    const double power_sq = power_sq_sum / static_cast<double>(bins);
    r.v_l_normalized = power_sq > 0.0 ? r.v_l / power_sq : 0.0;
    return r;
}

inline SpectralVariationResult spectral_variation(const ChannelTrace &trace, double window_length_ms,
                                                  const SpectralParams &params = {})
{
    const std::size_t ln = samples_per_window(window_length_ms, trace.sampling().sample_interval_ms);
    if (trace.size() / ln < 2)
        throw InsufficientDataError("trace " + trace.link().to_string() + " holds fewer than 2 windows of " +
                                    format_number(window_length_ms) + " ms");
    const TaperBank bank = make_taper_bank(ln, params);
    return spectral_variation(spectrogram(trace, window_length_ms, bank), bank);
}

} // namespace wss
