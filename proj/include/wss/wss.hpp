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

#include "wss/config.hpp"
#include "wss/error.hpp"
#include "wss/parallel.hpp"
#include "wss/pipeline.hpp"
#include "wss/spectral.hpp"
#include "wss/special_functions.hpp"
#include "wss/stattests.hpp"
#include "wss/synth.hpp"
#include "wss/trace.hpp"
#include "wss/trace_io.hpp"
#include "wss/windowing.hpp"
