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

#include "gndc/timeutil.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "gndc/error.hpp"

namespace gndc {

namespace {

[[noreturn]] void bad_time(std::string_view text) {
  fail(ErrorCode::kInvalidArgument, "invalid timestamp '" + std::string(text) + "'");
}

int digits(std::string_view s, std::size_t pos, std::size_t n, std::string_view text) {
  if (pos + n > s.size()) bad_time(text);
  int v = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const char c = s[pos + k];
    if (c < '0' || c > '9') bad_time(text);
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace

std::string format_iso8601(double seconds) {
  using namespace std::chrono;
  const auto total_ms = static_cast<std::int64_t>(std::llround(seconds * 1000.0));
  const sys_time<milliseconds> tp{milliseconds{total_ms}};
  const auto day = floor<days>(tp);
  const year_month_day ymd{day};
  const hh_mm_ss hms{tp - day};
  const auto ms = static_cast<int>(hms.subseconds().count());
  char buf[48];
  const int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                              static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                              static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                              static_cast<int>(hms.seconds().count()));
  std::string out(buf, static_cast<std::size_t>(n));
  if (ms != 0) {
    std::snprintf(buf, sizeof buf, ".%03d", ms);
    out += buf;
  }
  return out + "Z";
}

double parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  if (text.empty()) bad_time(text);
  if (text.find('-', 1) == std::string_view::npos) {
    // Plain epoch seconds.
    std::string s(text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) bad_time(text);
    return v;
  }
  const int y = digits(text, 0, 4, text);
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') bad_time(text);
  const int mo = digits(text, 5, 2, text);
  const int d = digits(text, 8, 2, text);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) bad_time(text);
  double secs = static_cast<double>(sys_days{ymd}.time_since_epoch().count()) * 86400.0;
  std::size_t pos = 10;
  if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
    const int hh = digits(text, pos + 1, 2, text);
    if (pos + 3 >= text.size() || text[pos + 3] != ':') bad_time(text);
    const int mm = digits(text, pos + 4, 2, text);
    pos += 6;
    int ss = 0;
    double frac = 0.0;
    if (pos < text.size() && text[pos] == ':') {
      ss = digits(text, pos + 1, 2, text);
      pos += 3;
      if (pos < text.size() && text[pos] == '.') {
        std::size_t end = pos + 1;
        double scale = 0.1;
        while (end < text.size() && text[end] >= '0' && text[end] <= '9') {
          frac += scale * (text[end] - '0');
          scale *= 0.1;
          ++end;
        }
        if (end == pos + 1) bad_time(text);
        pos = end;
      }
    }
    if (hh > 23 || mm > 59 || ss > 60) bad_time(text);
    secs += hh * 3600.0 + mm * 60.0 + ss + frac;
  }
  if (pos < text.size()) {
    const char c = text[pos];
    if (c == 'Z' && pos + 1 == text.size()) return secs;
    if ((c == '+' || c == '-') && text.size() == pos + 6 && text[pos + 3] == ':') {
      const int oh = digits(text, pos + 1, 2, text);
      const int om = digits(text, pos + 4, 2, text);
      const double off = oh * 3600.0 + om * 60.0;
      return c == '+' ? secs - off : secs + off;
    }
    bad_time(text);
  }
  return secs;
}

}  // namespace gndc
