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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wss
{

/// Seeded generator used for all synthetic data.
///
/// The stream is std::mt19937_64 seeded with the 64-bit seed directly.
/// uniform() takes the top 53 bits of one draw scaled by 2^-53, giving [0, 1).
/// normal() is the Marsaglia polar method on 2u - 1 pairs; each accepted pair
/// yields two variates, returned first-then-second.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do
        {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

enum class SynthKind
{
    iid_gaussian,
    ar1,
    mean_step,
    variance_step,
    chirp,
    shadowed_walk
};

inline std::string_view to_string(SynthKind k)
{
    switch (k)
    {
    case SynthKind::iid_gaussian: return "iid_gaussian";
    case SynthKind::ar1: return "ar1";
    case SynthKind::mean_step: return "mean_step";
    case SynthKind::variance_step: return "variance_step";
    case SynthKind::chirp: return "chirp";
    case SynthKind::shadowed_walk: return "shadowed_walk";
    }
    return "unknown";
}

inline SynthKind parse_synth_kind(std::string_view name)
{
    for (auto k : {SynthKind::iid_gaussian, SynthKind::ar1, SynthKind::mean_step, SynthKind::variance_step,
                   SynthKind::chirp, SynthKind::shadowed_walk})
        if (to_string(k) == name)
            return k;
    throw ConfigError("unknown synthetic trace kind '" + std::string(name) + "'");
}

// Parameters not used by a kind are ignored.
struct SynthParams
{
    double mean_db = -60.0;
    double std_db = 2.0;           // noise std; variance_step uses it on even segments
    double alt_std_db = 4.0;       // variance_step std on odd segments
    double ar_coefficient = 0.9;   // ar1; marginal std stays std_db
    double step_period_ms = 5000.0;
    double step_db = 10.0;         // mean_step offset on odd segments
    double chirp_start_hz = 0.1;
    double chirp_end_hz = 9.0;     // amplitude sqrt(2) * std_db, swept over the whole trace
    double walk_std_db = 0.1;      // shadowed_walk increment std per sample
};

struct SynthSpec
{
    SynthKind kind = SynthKind::iid_gaussian;
    double duration_ms = 60000.0;
    double sample_interval_ms = 50.0;
    SynthParams params;
    std::uint64_t seed = 1;
    LinkId link{"LH", 1, "LH", 2};
};

struct GroundTruth
{
    std::vector<std::pair<double, double>> stationary_regions; // [start_ms, end_ms)
    std::vector<double> change_points;                         // ms
};

struct SynthResult
{
    ChannelTrace trace;
    GroundTruth truth;
};

inline void validate(const SynthSpec &spec)
{
    const auto &p = spec.params;
    if (!(spec.sample_interval_ms > 0.0) || !std::isfinite(spec.sample_interval_ms))
        throw ParameterError("synth: sample interval must be positive");
    if (!(spec.duration_ms >= 2.0 * spec.sample_interval_ms) || !std::isfinite(spec.duration_ms))
        throw ParameterError("synth: duration must cover at least two samples");
    if (!(p.std_db >= 0.0) || !(p.alt_std_db >= 0.0) || !(p.walk_std_db >= 0.0))
        throw ParameterError("synth: standard deviations must be >= 0");
    if (!(std::abs(p.ar_coefficient) < 1.0))
        throw ParameterError("synth: AR coefficient magnitude must be < 1");
    if (!std::isfinite(p.mean_db) || !std::isfinite(p.step_db))
        throw ParameterError("synth: mean and step must be finite");
    if ((spec.kind == SynthKind::mean_step || spec.kind == SynthKind::variance_step) && !(p.step_period_ms > 0.0))
        throw ParameterError("synth: step period must be positive");
    const double nyquist = 500.0 / spec.sample_interval_ms;
    if (spec.kind == SynthKind::chirp &&
        (!(p.chirp_start_hz >= 0.0) || !(p.chirp_end_hz >= 0.0) || p.chirp_start_hz > nyquist || p.chirp_end_hz > nyquist))
        throw ParameterError("synth: chirp band must lie within [0, " + format_number(nyquist) + "] Hz");
}

/// Deterministic synthetic trace with its ground truth.
inline SynthResult generate(const SynthSpec &spec)
{
    validate(spec);
    const auto &p = spec.params;
    const double dt = spec.sample_interval_ms;
    const auto n = static_cast<std::size_t>(std::floor(spec.duration_ms / dt + 1e-9));
    const double end_ms = static_cast<double>(n) * dt;
    Rng rng(spec.seed);
    std::vector<double> gains(n);
    GroundTruth truth;

    const auto segment_of = [&](std::size_t i) {
        return static_cast<std::uint64_t>(std::floor(static_cast<double>(i) * dt / p.step_period_ms + 1e-9));
    };
    const auto add_step_truth = [&] {
        double start = 0.0;
        for (double t = p.step_period_ms; t < end_ms - 1e-9; t += p.step_period_ms)
        {
            truth.change_points.push_back(t);
            truth.stationary_regions.emplace_back(start, t);
            start = t;
        }
        truth.stationary_regions.emplace_back(start, end_ms);
    };

    switch (spec.kind)
    {
    case SynthKind::iid_gaussian:
        for (auto &g : gains)
            g = rng.normal(p.mean_db, p.std_db);
        truth.stationary_regions.emplace_back(0.0, end_ms);
        break;
    case SynthKind::ar1:
    {
        const double innovation = p.std_db * std::sqrt(1.0 - p.ar_coefficient * p.ar_coefficient);
        double e = rng.normal(0.0, p.std_db);
        for (std::size_t i = 0; i < n; ++i)
        {
            if (i > 0)
                e = p.ar_coefficient * e + rng.normal(0.0, innovation);
            gains[i] = p.mean_db + e;
        }
        truth.stationary_regions.emplace_back(0.0, end_ms);
        break;
    }
    case SynthKind::mean_step:
        for (std::size_t i = 0; i < n; ++i)
            gains[i] = rng.normal(p.mean_db + (segment_of(i) % 2 == 1 ? p.step_db : 0.0), p.std_db);
        add_step_truth();
        break;
    case SynthKind::variance_step:
        for (std::size_t i = 0; i < n; ++i)
            gains[i] = rng.normal(p.mean_db, segment_of(i) % 2 == 1 ? p.alt_std_db : p.std_db);
        add_step_truth();
        break;
    case SynthKind::chirp:
    {
        const double total_s = end_ms / 1000.0;
        const double rate = (p.chirp_end_hz - p.chirp_start_hz) / total_s;
        const double amplitude = std::sqrt(2.0) * p.std_db;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double t = static_cast<double>(i) * dt / 1000.0;
            const double phase = 2.0 * std::numbers::pi * (p.chirp_start_hz * t + 0.5 * rate * t * t);
            gains[i] = p.mean_db + amplitude * std::sin(phase);
        }
        break;
    }
    case SynthKind::shadowed_walk:
    {
        double walk = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            if (i > 0)
                walk += rng.normal(0.0, p.walk_std_db);
            gains[i] = p.mean_db + walk + rng.normal(0.0, p.std_db);
        }
        break;
    }
    }
    return {ChannelTrace(spec.link, SamplingSpec{dt, 0.0}, std::move(gains)), std::move(truth)};
}

} // namespace wss
