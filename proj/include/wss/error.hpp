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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wss
{

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorCategory
{
    config = 2,
    input = 3,
    analysis = 4
};

class Error : public std::runtime_error
{
public:
    Error(ErrorCategory category, const std::string &what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

struct ConfigError : Error
{
    explicit ConfigError(const std::string &what) : Error(ErrorCategory::config, what) {}
};

struct InputError : Error
{
    explicit InputError(const std::string &what) : Error(ErrorCategory::input, what) {}
};

// Malformed row in a trace file. line() is 1-based and counts the header.
class ParseError : public InputError
{
public:
    ParseError(std::size_t line, const std::string &what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct EmptyResultError : InputError
{
    explicit EmptyResultError(const std::string &what) : InputError(what) {}
};

// Output could not be written.
struct IoError : InputError
{
    explicit IoError(const std::string &what) : InputError(what) {}
};

struct AnalysisError : Error
{
    explicit AnalysisError(const std::string &what) : Error(ErrorCategory::analysis, what) {}
};

struct BoundsError : AnalysisError
{
    explicit BoundsError(const std::string &what) : AnalysisError(what) {}
};

struct InsufficientDataError : AnalysisError
{
    explicit InsufficientDataError(const std::string &what) : AnalysisError(what) {}
};

struct UndefinedGammaError : AnalysisError
{
    explicit UndefinedGammaError(const std::string &what) : AnalysisError(what) {}
};

// Invalid numeric argument (non-finite input, out-of-domain parameter).
struct DomainError : AnalysisError
{
    explicit DomainError(const std::string &what) : AnalysisError(what) {}
};

struct ParameterError : AnalysisError
{
    explicit ParameterError(const std::string &what) : AnalysisError(what) {}
};

} // namespace wss
