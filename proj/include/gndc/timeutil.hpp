// Copyright 2026 The gndc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gndc {

// "YYYY-MM-DDTHH:MM:SSZ" for whole seconds; fractional seconds are appended
// with millisecond precision when present.
std::string format_iso8601(double seconds_since_epoch);

// Accepts YYYY-MM-DD, YYYY-MM-DDTHH:MM[:SS[.fff]] with optional Z or +HH:MM
// suffix, or a plain number of seconds since the epoch. Throws InvalidArgument.
double parse_iso8601(std::string_view text);

}  // namespace gndc
