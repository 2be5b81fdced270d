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

#include <array>
#include <charconv>
#include <string>
#include <string_view>

namespace wss
{

/// Renders a double with 17 significant digits (`%.17g`), which round-trips
/// every finite binary64 value.
inline std::string format_number(double value)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

inline std::string format_number(long long value) { return std::to_string(value); }

} // namespace wss
