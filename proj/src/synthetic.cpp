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

#include "gndc/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gndc/error.hpp"

namespace gndc {

CubeBundle make_cube(std::size_t height, std::size_t width, std::size_t frames,
                     std::size_t channels, const CubeFunction& fn, std::int64_t t0,
                     std::int64_t step_seconds) {
  if (height == 0 || width == 0 || frames == 0 || channels == 0) {
    fail(ErrorCode::kInvalidArgument, "synthetic cube dimensions must be positive");
  }
  CubeBundle b;
  b.meta.crs = "EPSG:4326";
  b.meta.height = height;
  b.meta.width = width;
  for (std::size_t t = 0; t < frames; ++t) {
    b.meta.timestamps.push_back(t0 + static_cast<std::int64_t>(t) * step_seconds);
  }
  for (std::size_t c = 0; c < channels; ++c) b.meta.band_names.push_back("b" + std::to_string(c));
  b.meta.value_scale.assign(channels, 1.0);
  b.meta.value_offset.assign(channels, 0.0);
  b.values.resize(b.meta.samples());
  b.mask.assign(b.meta.voxels(), 1);
  for (std::size_t i = 0; i < height; ++i) {
    const double y = (static_cast<double>(i) + 0.5) / static_cast<double>(height);
    for (std::size_t j = 0; j < width; ++j) {
      const double x = (static_cast<double>(j) + 0.5) / static_cast<double>(width);
      for (std::size_t t = 0; t < frames; ++t) {
        const double tn =
            frames == 1 ? 0.5 : static_cast<double>(t) / static_cast<double>(frames - 1);
        for (std::size_t c = 0; c < channels; ++c) {
          b.values[b.value_index(i, j, t, c)] = static_cast<float>(fn(x, y, tn, c));
        }
      }
    }
  }
  return b;
}

CubeBundle sinusoid_cube(std::size_t height, std::size_t width, std::size_t frames,
                         std::size_t channels) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  return make_cube(height, width, frames, channels, [](double x, double y, double t, std::size_t c) {
    return std::sin(kTwoPi * (x + 0.25 * static_cast<double>(c))) * std::cos(kTwoPi * y) *
           (0.5 + 0.5 * t);
  });
}

CubeBundle seasonal_cube(std::size_t height, std::size_t width, std::size_t frames,
                         std::size_t channels, std::uint64_t seed) {
  // A handful of low-frequency plane waves per coefficient.
  struct Wave {
    double kx, ky, phase, amp;
  };
  constexpr int kWaves = 4;
  Rng rng(seed);
  std::vector<Wave> waves(channels * 3 * kWaves);
  for (auto& w : waves) {
    w = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), rng.uniform(0.0, 2.0 * std::numbers::pi),
         rng.uniform(0.3, 1.0) / kWaves};
  }
  auto coef = [&](std::size_t c, int which, double x, double y) {
    double s = 0.0;
    for (int k = 0; k < kWaves; ++k) {
      const Wave& w = waves[(c * 3 + static_cast<std::size_t>(which)) * kWaves + static_cast<std::size_t>(k)];
      s += w.amp * std::sin(2.0 * std::numbers::pi * (w.kx * x + w.ky * y) + w.phase);
    }
    return s;
  };
  return make_cube(height, width, frames, channels, [&](double x, double y, double t, std::size_t c) {
    const double base = 0.5 + 0.3 * coef(c, 0, x, y);
    const double slope = 0.4 * coef(c, 1, x, y);
    const double curve = 1.2 * (0.5 + coef(c, 2, x, y));
    return base + slope * (t - 0.5) - curve * (t - 0.5) * (t - 0.5);
  });
}

CubeBundle textured_cube(std::size_t height, std::size_t width, std::size_t frames,
                         std::size_t channels, std::uint64_t seed) {
  struct Wave {
    double kx, ky, phase, drift, amp;
  };
  constexpr int kOctaves = 5;
  constexpr int kPerOctave = 3;
  Rng rng(seed);
  std::vector<Wave> waves;
  for (std::size_t c = 0; c < channels; ++c) {
    for (int o = 0; o < kOctaves; ++o) {
      for (int k = 0; k < kPerOctave; ++k) {
        const double f = std::pow(2.0, o) * rng.uniform(0.75, 1.5);
        const double dir = rng.uniform(0.0, 2.0 * std::numbers::pi);
        waves.push_back({f * std::cos(dir), f * std::sin(dir), rng.uniform(0.0, 2.0 * std::numbers::pi),
                         rng.uniform(-1.0, 1.0), std::pow(0.6, o) / kPerOctave});
      }
    }
  }
  const std::size_t per_channel = kOctaves * kPerOctave;
  return make_cube(height, width, frames, channels, [&](double x, double y, double t, std::size_t c) {
    double s = 0.5;
    for (std::size_t n = 0; n < per_channel; ++n) {
      const Wave& w = waves[c * per_channel + n];
      s += w.amp * std::sin(2.0 * std::numbers::pi * (w.kx * x + w.ky * y) + w.phase + w.drift * t);
    }
    return s;
  });
}

std::size_t add_cloud_discs(CubeBundle& bundle, std::size_t t, double coverage, double radius_px,
                            Rng& rng) {
  const auto& m = bundle.meta;
  if (t >= m.frames()) fail(ErrorCode::kIndexOutOfRange, "cloud frame out of range");
  const std::size_t target = static_cast<std::size_t>(coverage * static_cast<double>(m.pixels()));
  std::size_t masked = 0;
  for (std::size_t i = 0; i < m.height; ++i) {
    for (std::size_t j = 0; j < m.width; ++j) masked += bundle.valid(i, j, t) ? 0 : 1;
  }
  const std::size_t already = masked;
  int guard = 0;
  while (masked < target && guard++ < 100000) {
    const double ci = rng.uniform(0.0, static_cast<double>(m.height));
    const double cj = rng.uniform(0.0, static_cast<double>(m.width));
    const double r = radius_px * rng.uniform(0.6, 1.4);
    for (std::size_t i = 0; i < m.height; ++i) {
      for (std::size_t j = 0; j < m.width; ++j) {
        const double di = static_cast<double>(i) + 0.5 - ci;
        const double dj = static_cast<double>(j) + 0.5 - cj;
        if (di * di + dj * dj > r * r) continue;
        auto& v = bundle.mask[bundle.voxel_index(i, j, t)];
        if (v) {
          v = 0;
          ++masked;
        }
      }
    }
  }
  return masked - already;
}

}  // namespace gndc
