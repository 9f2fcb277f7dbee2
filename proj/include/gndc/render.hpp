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
#include <limits>
#include <string>
#include <vector>

#include "gndc/query.hpp"

namespace gndc {

struct FrameRenderOptions {
  std::size_t downsample = 1;
  std::vector<std::size_t> bands{0};  // one band (colormap) or three (RGB)
  std::string colormap = "viridis";   // "viridis" or "gray"
  // Display range in physical units; NaN means the stored per-band range.
  double vmin = std::numeric_limits<double>::quiet_NaN();
  double vmax = std::numeric_limits<double>::quiet_NaN();
};

struct RenderedFrame {
  std::size_t width = 0;
  std::size_t height = 0;
  double time = 0.0;
  std::vector<std::uint8_t> rgb;  // height * width * 3
};

std::size_t rendered_pixels(const CubeMeta& meta, std::size_t downsample);

// Samples pixel (min(H-1, r*k + k/2), min(W-1, c*k + k/2)) for output (r, c).
RenderedFrame render_frame(const LoadedCube& cube, double seconds, const FrameRenderOptions& opt);
std::vector<std::uint8_t> encode_png(const RenderedFrame& frame);

}  // namespace gndc
