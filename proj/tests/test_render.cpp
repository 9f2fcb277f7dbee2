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

#include <png.h>

#include <cmath>

#include "doctest.h"
#include "gndc/encoder.hpp"
#include "gndc/render.hpp"
#include "gndc/synthetic.hpp"
#include "test_util.hpp"

using namespace gndc;
using gndc::testing::code_of;

namespace {

const LoadedCube& fixture() {
  static const LoadedCube cube = [] {
    auto b = seasonal_cube(24, 20, 5, 3, 6);
    Rng rng(2);
    add_cloud_discs(b, 1, 0.3, 3.0, rng);
    EncodeConfig cfg;
    cfg.train.total_steps = 200;
    cfg.field.grid2d.table_log2 = 10;
    cfg.field.grid3d.table_log2 = 10;
    return LoadedCube(build_model(b, cfg));
  }();
  return cube;
}

std::uint8_t expected_byte(double v, double lo, double hi) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(255.0 * (v - lo) / (hi - lo), 0.0, 255.0)));
}

}  // namespace

TEST_CASE("output size follows the downsample factor") {
  const auto& meta = fixture().meta();
  CHECK(rendered_pixels(meta, 1) == 480);
  CHECK(rendered_pixels(meta, 3) == 8 * 7);
  CHECK(rendered_pixels(meta, 100) == 1);
  CHECK(code_of([&] { rendered_pixels(meta, 0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("gray rendering maps query values linearly") {
  const auto& cube = fixture();
  const double t = static_cast<double>(cube.meta().timestamps[1]);
  FrameRenderOptions opt;
  opt.downsample = 3;
  opt.bands = {2};
  opt.colormap = "gray";
  opt.vmin = 0.1;
  opt.vmax = 0.7;
  const auto f = render_frame(cube, t, opt);
  REQUIRE(f.height == 8);
  REQUIRE(f.width == 7);
  CHECK(f.time == t);
  for (std::size_t r = 0; r < f.height; ++r) {
    for (std::size_t c = 0; c < f.width; ++c) {
      const std::size_t i = std::min<std::size_t>(23, r * 3 + 1), j = std::min<std::size_t>(19, c * 3 + 1);
      const auto q = cube.query_voxel(i, j, 1);
      const auto want = expected_byte(q.values[2], 0.1, 0.7);
      for (int k = 0; k < 3; ++k) REQUIRE(f.rgb[(r * f.width + c) * 3 + k] == want);
    }
  }
}

TEST_CASE("RGB composite uses each band's stored range") {
  const auto& cube = fixture();
  FrameRenderOptions opt;
  opt.bands = {2, 0, 1};
  const double t = static_cast<double>(cube.meta().timestamps[3]);
  const auto f = render_frame(cube, t, opt);
  CHECK(f.width == 20);
  const auto q = cube.query_voxel(5, 7, 3);
  for (int k = 0; k < 3; ++k) {
    const std::size_t b = opt.bands[k];
    CHECK(f.rgb[(5 * 20 + 7) * 3 + k] == expected_byte(q.values[b], cube.physical(b, 0), cube.physical(b, 1)));
  }
}

TEST_CASE("colormap end stops and argument checks") {
  const auto& cube = fixture();
  const double t = static_cast<double>(cube.meta().timestamps[0]);
  FrameRenderOptions lo;
  lo.vmin = 1e6;
  lo.vmax = 2e6;
  const auto a = render_frame(cube, t, lo);
  CHECK(a.rgb[0] == 68);
  CHECK(a.rgb[1] == 1);
  CHECK(a.rgb[2] == 84);
  FrameRenderOptions hi;
  hi.vmin = -2e6;
  hi.vmax = -1e6;
  const auto b = render_frame(cube, t, hi);
  CHECK(b.rgb[0] == 253);
  CHECK(b.rgb[1] == 231);
  CHECK(b.rgb[2] == 37);

  FrameRenderOptions bad;
  bad.bands = {0, 1};
  CHECK(code_of([&] { render_frame(cube, t, bad); }) == ErrorCode::kInvalidArgument);
  bad.bands = {3};
  CHECK(code_of([&] { render_frame(cube, t, bad); }) == ErrorCode::kIndexOutOfRange);
  bad.bands = {0};
  bad.colormap = "jet";
  CHECK(code_of([&] { render_frame(cube, t, bad); }) == ErrorCode::kInvalidArgument);
  bad.colormap = "gray";
  bad.vmin = 1;
  bad.vmax = 1;
  CHECK(code_of([&] { render_frame(cube, t, bad); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("frames between native timestamps render") {
  const auto& cube = fixture();
  const auto& ts = cube.meta().timestamps;
  const double mid = 0.5 * static_cast<double>(ts[1] + ts[2]);
  const auto f = render_frame(cube, mid, {});
  CHECK(f.time == mid);
  CHECK(render_frame(cube, static_cast<double>(ts[1]), {}).rgb != f.rgb);
}

TEST_CASE("PNG decodes back to the rendered pixels") {
  const auto& cube = fixture();
  FrameRenderOptions opt;
  opt.downsample = 2;
  opt.bands = {0, 1, 2};
  const auto f = render_frame(cube, static_cast<double>(cube.meta().timestamps[2]), opt);
  const auto png = encode_png(f);
  REQUIRE(png.size() > 8);
  CHECK(png[1] == 'P');
  CHECK(png[2] == 'N');
  CHECK(png[3] == 'G');

  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  REQUIRE(png_image_begin_read_from_memory(&img, png.data(), png.size()));
  img.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> back(PNG_IMAGE_SIZE(img));
  REQUIRE(png_image_finish_read(&img, nullptr, back.data(), 0, nullptr));
  CHECK(img.width == f.width);
  CHECK(img.height == f.height);
  CHECK(back == f.rgb);
}
