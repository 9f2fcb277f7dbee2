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

#include "gndc/render.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "gndc/error.hpp"

namespace gndc {

namespace {

constexpr std::array<std::array<double, 3>, 5> kViridis{{
    {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

void viridis(double u, std::uint8_t* px) {
  const double pos = std::clamp(u, 0.0, 1.0) * (kViridis.size() - 1);
  const auto k = std::min(kViridis.size() - 2, static_cast<std::size_t>(pos));
  const double f = pos - static_cast<double>(k);
  for (int c = 0; c < 3; ++c) px[c] = to_byte(kViridis[k][c] * (1 - f) + kViridis[k + 1][c] * f);
}

std::size_t sample_index(std::size_t out, std::size_t k, std::size_t extent) {
  return std::min(extent - 1, out * k + k / 2);
}

}  // namespace

std::size_t rendered_pixels(const CubeMeta& meta, std::size_t downsample) {
  if (downsample == 0) fail(ErrorCode::kInvalidArgument, "downsample must be >= 1");
  return ((meta.height + downsample - 1) / downsample) * ((meta.width + downsample - 1) / downsample);
}

RenderedFrame render_frame(const LoadedCube& cube, double seconds, const FrameRenderOptions& opt) {
  const auto& meta = cube.meta();
  const std::size_t k = opt.downsample;
  rendered_pixels(meta, k);
  if (opt.bands.size() != 1 && opt.bands.size() != 3) fail(ErrorCode::kInvalidArgument, "bands must list 1 or 3 bands");
  for (auto b : opt.bands) {
    if (b >= meta.channels()) fail(ErrorCode::kIndexOutOfRange, "band index out of range");
  }
  if (opt.colormap != "viridis" && opt.colormap != "gray") fail(ErrorCode::kInvalidArgument, "unknown colormap");
  const bool fixed = std::isfinite(opt.vmin) && std::isfinite(opt.vmax);
  if (fixed && !(opt.vmax > opt.vmin)) fail(ErrorCode::kInvalidArgument, "vmax must exceed vmin");

  std::vector<double> lo, span;
  for (auto b : opt.bands) {
    const double a = fixed ? opt.vmin : cube.physical(b, 0.0);
    const double z = fixed ? opt.vmax : cube.physical(b, 1.0);
    lo.push_back(a);
    span.push_back(z - a == 0.0 ? 1.0 : z - a);
  }

  RenderedFrame f;
  f.height = (meta.height + k - 1) / k;
  f.width = (meta.width + k - 1) / k;
  f.rgb.resize(f.height * f.width * 3);
  const std::size_t C = meta.channels();
  for (std::size_t r = 0; r < f.height; ++r) {
    const std::size_t i = sample_index(r, k, meta.height);
    const auto row = cube.query_region({i, i + 1, 0, meta.width}, seconds);
    f.time = row.time;
    for (std::size_t c = 0; c < f.width; ++c) {
      const std::size_t j = sample_index(c, k, meta.width);
      std::uint8_t* px = &f.rgb[(r * f.width + c) * 3];
      if (opt.bands.size() == 3) {
        for (int b = 0; b < 3; ++b) px[b] = to_byte(255.0 * (row.values[j * C + opt.bands[b]] - lo[b]) / span[b]);
      } else {
        const double u = (row.values[j * C + opt.bands[0]] - lo[0]) / span[0];
        if (opt.colormap == "gray") {
          px[0] = px[1] = px[2] = to_byte(255.0 * u);
        } else {
          viridis(u, px);
        }
      }
    }
  }
  return f;
}

std::vector<std::uint8_t> encode_png(const RenderedFrame& frame) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(frame.width);
  img.height = static_cast<png_uint_32>(frame.height);
  img.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, frame.rgb.data(), 0, nullptr)) {
    fail(ErrorCode::kIoFailure, std::string("png sizing failed: ") + img.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, frame.rgb.data(), 0, nullptr)) {
    fail(ErrorCode::kIoFailure, std::string("png encoding failed: ") + img.message);
  }
  out.resize(size);
  return out;
}

}  // namespace gndc
