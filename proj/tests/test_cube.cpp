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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "doctest.h"
#include "gndc/bytes.hpp"
#include "gndc/cube.hpp"
#include "gndc/rng.hpp"
#include "gndc/synthetic.hpp"
#include "test_util.hpp"

using namespace gndc;
using gndc::testing::code_of;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("gndc_test_cube_" + name);
  fs::remove_all(p);
  return p;
}

CubeBundle random_cube(std::size_t H, std::size_t W, std::size_t T, std::size_t C, std::uint64_t seed) {
  Rng rng(seed);
  auto b = make_cube(H, W, T, C, [&](double, double, double, std::size_t) { return rng.uniform(-5.0, 5.0); });
  for (auto& m : b.mask) m = rng.uniform() < 0.7 ? 1 : 0;
  b.mask[0] = 1;
  b.meta.band_names.clear();
  for (std::size_t c = 0; c < C; ++c) b.meta.band_names.push_back("b" + std::to_string(c));
  b.meta.value_scale.assign(C, 0.0001);
  b.meta.value_offset.assign(C, -0.5);
  return b;
}

}  // namespace

TEST_CASE("minimal 2x2x1x1 bundle loads") {
  auto b = make_cube(2, 2, 1, 1, [](double x, double y, double, std::size_t) { return x + 10 * y; });
  const auto dir = scratch("minimal");
  save_bundle(b, dir);
  const auto back = load_bundle(dir);
  CHECK(back == b);
  CHECK(back.values.size() == 4);
  fs::remove_all(dir);
}

TEST_CASE("save/load round-trip of a random 4x4x3x2 cube is element-wise exact") {
  const auto b = random_cube(4, 4, 3, 2, 5);
  const auto dir = scratch("roundtrip");
  save_bundle(b, dir);
  const auto back = load_bundle(dir);
  REQUIRE(back.values.size() == b.values.size());
  for (std::size_t k = 0; k < b.values.size(); ++k) {
    CHECK(std::memcmp(&back.values[k], &b.values[k], sizeof(float)) == 0);
  }
  CHECK(back.mask == b.mask);
  CHECK(back.meta == b.meta);
  fs::remove_all(dir);
}

TEST_CASE("short values file is a shape mismatch") {
  auto b = make_cube(2, 2, 4, 1, [](double, double, double, std::size_t) { return 1.0; });
  const auto dir = scratch("short");
  save_bundle(b, dir);
  const auto bytes = read_file(dir / "values.f32");
  write_file(dir / "values.f32", std::span<const std::uint8_t>(bytes.data(), 15 * 4));
  CHECK(code_of([&] { load_bundle(dir); }) == ErrorCode::kShapeMismatch);
  fs::remove_all(dir);
}

TEST_CASE("bundle load errors") {
  auto b = make_cube(2, 2, 2, 1, [](double, double, double, std::size_t) { return 1.0; });
  CHECK(code_of([&] { load_bundle(scratch("absent")); }) == ErrorCode::kMissingFile);

  auto dup = b;
  dup.meta.timestamps = {100, 100};
  CHECK(code_of([&] { dup.validate(); }) == ErrorCode::kNonMonotonicTimestamps);
  const auto dir = scratch("dup");
  b.meta.timestamps = {100, 200};
  save_bundle(b, dir);
  {
    auto text = read_file(dir / "meta.json");
    std::string s(text.begin(), text.end());
    const auto pos = s.find("200");
    REQUIRE(pos != std::string::npos);
    s.replace(pos, 3, "100");
    write_file(dir / "meta.json", std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  }
  CHECK(code_of([&] { load_bundle(dir); }) == ErrorCode::kNonMonotonicTimestamps);
  fs::remove_all(dir);

  auto dark = b;
  std::fill(dark.mask.begin(), dark.mask.end(), 0);
  CHECK(code_of([&] { dark.validate(); }) == ErrorCode::kAllInvalidMask);
}

TEST_CASE("writing under a regular file is an io failure") {
  const auto file = scratch("blocker");
  { std::ofstream(file) << "x"; }
  auto b = make_cube(2, 2, 1, 1, [](double, double, double, std::size_t) { return 1.0; });
  CHECK(code_of([&] { save_bundle(b, file / "sub"); }) == ErrorCode::kIoFailure);
  fs::remove(file);
}

TEST_CASE("normalizer maps cell centres and timestamps") {
  auto b = make_cube(3, 4, 2, 1, [](double, double, double, std::size_t) { return 1.0; });
  b.meta.timestamps = {0, 100};
  const auto n = make_normalizer(b.meta);
  CHECK(n.pixel_to_x(0) == doctest::Approx(0.125));
  CHECK(n.pixel_to_x(3) == doctest::Approx(0.875));
  CHECK(n.time_to_t(50) == doctest::Approx(0.5));
  CHECK(n.time_to_t(0) == 0.0);
  CHECK(n.time_to_t(100) == 1.0);

  auto single = make_cube(2, 2, 1, 1, [](double, double, double, std::size_t) { return 1.0; });
  const auto ns = make_normalizer(single.meta);
  CHECK(ns.time_to_t(0) == 0.5);
  CHECK(ns.time_to_t(1e9) == 0.5);
}

TEST_CASE("coordinate maps invert to within 1e-9") {
  auto b = make_cube(37, 53, 5, 1, [](double, double, double, std::size_t) { return 1.0; });
  b.meta.bbox = {-180.0, -90.0, 180.0, 90.0};
  const auto n = make_normalizer(b.meta);
  for (std::size_t i = 0; i < 37; ++i) {
    CHECK(std::abs(n.y_to_pixel(n.pixel_to_y(static_cast<double>(i))) - static_cast<double>(i)) < 1e-9);
  }
  for (std::size_t j = 0; j < 53; ++j) {
    const double x = n.pixel_to_x(static_cast<double>(j));
    CHECK(std::abs(n.x_to_pixel(x) - static_cast<double>(j)) < 1e-9);
    CHECK(std::abs(n.crs_to_x(n.x_to_crs(x)) - x) < 1e-9);
  }
  for (auto ts : b.meta.timestamps) {
    const double s = static_cast<double>(ts);
    CHECK(std::abs(n.t_to_time(n.time_to_t(s)) - s) <= 1e-9 * s);
  }
  CHECK(n.y_to_crs(0.0) == 90.0);
  CHECK(n.crs_to_y(-90.0) == 1.0);
}

TEST_CASE("constant channel gets a unit clamp range") {
  auto b = make_cube(2, 2, 2, 2, [](double, double, double, std::size_t c) { return c == 0 ? 3.7 : 0.0; });
  b.values[1] = 2.0f;
  const auto n = make_normalizer(b);
  CHECK(n.value_max[0] > n.value_min[0]);
  CHECK(n.value_range(1) == doctest::Approx(2.0));
}

TEST_CASE("sampling with a single valid voxel repeats it") {
  auto b = make_cube(3, 3, 2, 1, [](double x, double, double, std::size_t) { return x; });
  std::fill(b.mask.begin(), b.mask.end(), 0);
  b.mask[b.voxel_index(1, 2, 1)] = 1;
  const auto n = make_normalizer(b);
  Rng rng(1);
  const auto batch = sample_batch(b, n, 8, rng);
  REQUIRE(batch.size() == 8);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(batch.voxels[k] == b.voxel_index(1, 2, 1));
    CHECK(batch.coords[k][0] == n.pixel_to_x(2));
    CHECK(batch.coords[k][1] == n.pixel_to_y(1));
    CHECK(batch.coords[k][2] == 1.0);
  }
}

TEST_CASE("sampling is uniform over valid voxels and never touches invalid ones") {
  auto b = random_cube(6, 6, 4, 1, 11);
  for (std::size_t v = 0; v < b.mask.size(); ++v) b.mask[v] = (v % 2) ? 1 : 0;
  const auto n = make_normalizer(b);
  Rng rng(3);
  const std::size_t draws = 100000;
  std::map<std::uint32_t, std::size_t> counts;
  Batch batch;
  VoxelSampler sampler(b, n);
  sampler.sample(rng, draws, batch);
  for (auto v : batch.voxels) {
    REQUIRE(b.mask[v] == 1);
    ++counts[v];
  }
  const double valid = static_cast<double>(b.valid_count());
  CHECK(counts.size() == b.valid_count());
  const double p = 1.0 / valid;
  const double mean = draws * p;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (const auto& [v, c] : counts) CHECK(std::abs(static_cast<double>(c) - mean) < 5 * sigma);

  Rng a(9), bb(9);
  CHECK(sample_batch(b, n, 64, a).voxels == sample_batch(b, n, 64, bb).voxels);
}

TEST_CASE("random masks never leak invalid voxels into batches") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto b = random_cube(5, 4, 3, 2, seed);
    const auto n = make_normalizer(b);
    Rng rng(seed);
    const auto batch = sample_batch(b, n, 256, rng);
    for (std::size_t k = 0; k < batch.size(); ++k) {
      REQUIRE(b.mask[batch.voxels[k]] == 1);
      for (std::size_t c = 0; c < 2; ++c) {
        const double want = n.normalize_value(c, b.values[batch.voxels[k] * 2 + c]);
        CHECK(batch.targets[k * 2 + c] == doctest::Approx(want).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("fully masked cube cannot be sampled") {
  auto b = make_cube(2, 2, 2, 1, [](double, double, double, std::size_t) { return 1.0; });
  const auto n = make_normalizer(b);
  std::fill(b.mask.begin(), b.mask.end(), 0);
  Rng rng(0);
  CHECK(code_of([&] { sample_batch(b, n, 4, rng); }) == ErrorCode::kAllInvalidMask);
}

TEST_CASE("textured cube is seeded, detailed and correlated in time") {
  const auto a = textured_cube(32, 32, 4, 2, 5);
  CHECK(a == textured_cube(32, 32, 4, 2, 5));
  CHECK(!(a == textured_cube(32, 32, 4, 2, 6)));
  CHECK(a.meta.height == 32);
  CHECK(a.meta.channels() == 2);
  double step = 0, jump = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < 32; ++i) {
    for (std::size_t j = 0; j + 1 < 32; ++j) {
      jump += std::abs(a.value(i, j + 1, 0, 0) - a.value(i, j, 0, 0));
      step += std::abs(a.value(i, j, 1, 0) - a.value(i, j, 0, 0));
      ++n;
    }
  }
  CHECK(jump / double(n) > 0.02);
  CHECK(step < jump);
}
