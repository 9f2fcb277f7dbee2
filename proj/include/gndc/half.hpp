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

#include <bit>
#include <cstdint>

namespace gndc {

// IEEE-754 binary16 storage type.
struct Half {
  std::uint16_t bits = 0;
  bool operator==(const Half&) const = default;
};

// Round-to-nearest-even; overflow goes to infinity, NaN stays NaN.
inline Half float_to_half(float f) {
  const std::uint32_t x = std::bit_cast<std::uint32_t>(f);
  const std::uint32_t sign = (x >> 16) & 0x8000u;
  const std::uint32_t abs = x & 0x7fffffffu;

  if (abs >= 0x7f800000u) {  // inf or nan
    const std::uint32_t mant = abs > 0x7f800000u ? 0x200u | ((abs >> 13) & 0x3ffu) : 0u;
    return {static_cast<std::uint16_t>(sign | 0x7c00u | mant)};
  }
  if (abs >= 0x477ff000u) {  // rounds to >= 65520 -> inf
    return {static_cast<std::uint16_t>(sign | 0x7c00u)};
  }
  if (abs >= 0x38800000u) {  // normal half range
    const std::uint32_t lsb = (abs >> 13) & 1u;
    const std::uint32_t rounded = abs + 0xfffu + lsb;
    return {static_cast<std::uint16_t>(sign | ((rounded - 0x38000000u) >> 13))};
  }
  if (abs < 0x33000000u) {  // below half the smallest subnormal
    return {static_cast<std::uint16_t>(sign)};
  }
  // Subnormal result: shift the full 24-bit significand into place.
  const std::uint32_t exp = abs >> 23;
  const std::uint32_t mant = (abs & 0x7fffffu) | 0x800000u;
  const std::uint32_t shift = 126u - exp;  // 14..24
  const std::uint32_t halfway = 1u << (shift - 1);
  const std::uint32_t rem = mant & ((1u << shift) - 1u);
  std::uint32_t q = mant >> shift;
  if (rem > halfway || (rem == halfway && (q & 1u))) ++q;
  return {static_cast<std::uint16_t>(sign | q)};
}

inline float half_to_float(Half h) {
  const std::uint32_t sign = static_cast<std::uint32_t>(h.bits & 0x8000u) << 16;
  const std::uint32_t exp = (h.bits >> 10) & 0x1fu;
  std::uint32_t mant = h.bits & 0x3ffu;
  if (exp == 0x1f) {
    return std::bit_cast<float>(sign | 0x7f800000u | (mant << 13));
  }
  if (exp == 0) {
    if (mant == 0) return std::bit_cast<float>(sign);
    std::uint32_t e = 113;  // 127 - 15 + 1
    while ((mant & 0x400u) == 0) {
      mant <<= 1;
      --e;
    }
    mant &= 0x3ffu;
    return std::bit_cast<float>(sign | (e << 23) | (mant << 13));
  }
  return std::bit_cast<float>(sign | ((exp + 112u) << 23) | (mant << 13));
}

inline float round_to_half(float f) { return half_to_float(float_to_half(f)); }

inline float load_value(float v) { return v; }
inline double load_value(double v) { return v; }
inline float load_value(Half v) { return half_to_float(v); }

}  // namespace gndc
