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

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace wss
{

inline std::size_t resolve_thread_count(std::size_t requested, std::size_t tasks)
{
    std::size_t n = requested == 0 ? std::max<std::size_t>(1, std::thread::hardware_concurrency()) : requested;
    return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(1, tasks));
}

/// Runs body(i) for i in [0, count) on a bounded pool. Tasks must write to
/// disjoint outputs. If any task throws, the exception of the lowest failing
/// index is rethrown after all workers finish.
template <class Body>
void parallel_for(std::size_t count, std::size_t threads, Body &&body)
{
    if (count == 0)
        return;
    threads = resolve_thread_count(threads, count);
    std::vector<std::exception_ptr> errors(count);
    if (threads == 1)
    {
        for (std::size_t i = 0; i < count; ++i)
        {
            try
            {
                body(i);
            }
            catch (...)
            {
                errors[i] = std::current_exception();
                break;
            }
        }
    }
    else
    {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        {
            std::vector<std::jthread> workers;
            workers.reserve(threads);
            for (std::size_t t = 0; t < threads; ++t)
            {
                workers.emplace_back([&] {
                    while (!failed.load(std::memory_order_relaxed))
                    {
                        const std::size_t i = next.fetch_add(1);
                        if (i >= count)
                            return;
                        try
                        {
                            body(i);
                        }
                        catch (...)
                        {
                            errors[i] = std::current_exception();
                            failed = true;
                        }
                    }
                });
            }
        }
    }
    for (const auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace wss
