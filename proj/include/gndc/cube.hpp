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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gndc/rng.hpp"

namespace gndc {

struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 1.0;
  double y_max = 1.0;

  bool operator==(const BBox&) const = default;
};

struct CubeMeta {
  std::string crs;
  BBox bbox;
  std::vector<std::int64_t> timestamps;  // seconds since epoch
  std::vector<std::string> band_names;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> value_scale;
  std::vector<double> value_offset;

  std::size_t frames() const { return timestamps.size(); }
  std::size_t channels() const { return band_names.size(); }
  std::size_t pixels() const { return height * width; }
  std::size_t voxels() const { return height * width * frames(); }
  std::size_t samples() const { return voxels() * channels(); }

  // Throws on any broken invariant.
  void validate() const;

  bool operator==(const CubeMeta&) const = default;
};

// Dense H x W x T x C values plus the H x W x T validity mask, both row-major.
struct CubeBundle {
  CubeMeta meta;
  std::vector<float> values;
  std::vector<std::uint8_t> mask;

  std::size_t voxel_index(std::size_t i, std::size_t j, std::size_t t) const {
    return (i * meta.width + j) * meta.frames() + t;
  }
  std::size_t value_index(std::size_t i, std::size_t j, std::size_t t,
                          std::size_t c) const {
    return voxel_index(i, j, t) * meta.channels() + c;
  }
  float value(std::size_t i, std::size_t j, std::size_t t, std::size_t c) const {
    return values[value_index(i, j, t, c)];
  }
  bool valid(std::size_t i, std::size_t j, std::size_t t) const {
    return mask[voxel_index(i, j, t)] != 0;
  }
  std::size_t valid_count() const;

  void validate() const;

  bool operator==(const CubeBundle&) const = default;
};

// Affine maps between pixel/CRS/time coordinates and the unit cube the field
// is defined on, plus the per-channel clamp range for value normalization.
// Pixel centres sit at (j + 0.5) / W and (i + 0.5) / H; row 0 is the bbox top
// (y_max), so normalized y grows with the row index.
struct NormalizationSpec {
  std::size_t height = 1;
  std::size_t width = 1;
  BBox bbox;
  std::int64_t t_first = 0;
  std::int64_t t_last = 0;
  bool single_frame = true;
  std::vector<double> value_min;
  std::vector<double> value_max;

  double pixel_to_x(double j) const { return (j + 0.5) / static_cast<double>(width); }
  double pixel_to_y(double i) const { return (i + 0.5) / static_cast<double>(height); }
  double x_to_pixel(double x) const { return x * static_cast<double>(width) - 0.5; }
  double y_to_pixel(double y) const { return y * static_cast<double>(height) - 0.5; }

  double crs_to_x(double cx) const { return (cx - bbox.x_min) / (bbox.x_max - bbox.x_min); }
  double crs_to_y(double cy) const { return (bbox.y_max - cy) / (bbox.y_max - bbox.y_min); }
  double x_to_crs(double x) const { return bbox.x_min + x * (bbox.x_max - bbox.x_min); }
  double y_to_crs(double y) const { return bbox.y_max - y * (bbox.y_max - bbox.y_min); }

  double time_to_t(double seconds) const;
  double t_to_time(double t) const;

  double normalize_value(std::size_t c, double v) const {
    return (v - value_min[c]) / (value_max[c] - value_min[c]);
  }
  double denormalize_value(std::size_t c, double v) const {
    return value_min[c] + v * (value_max[c] - value_min[c]);
  }
  double value_range(std::size_t c) const { return value_max[c] - value_min[c]; }

  bool operator==(const NormalizationSpec&) const = default;
};

using Coord = std::array<double, 3>;  // normalized (x, y, t)

// Training samples: coords[k] with targets[k * channels .. (k+1) * channels).
struct Batch {
  std::size_t channels = 0;
  std::vector<Coord> coords;
  std::vector<float> targets;
  std::vector<std::uint32_t> voxels;  // source voxel of each sample

  std::size_t size() const { return coords.size(); }
  void clear() {
    coords.clear();
    targets.clear();
    voxels.clear();
  }
};

// Clamp range is min/max over valid values; a constant channel gets a unit
// range so the mapping stays invertible.
NormalizationSpec make_normalizer(const CubeMeta& meta);
NormalizationSpec make_normalizer(const CubeBundle& bundle);

CubeBundle load_bundle(const std::filesystem::path& dir);
void save_bundle(const CubeBundle& bundle, const std::filesystem::path& dir);

// Uniform draws over valid voxels. Build once per bundle; cheap to copy.
class VoxelSampler {
 public:
  VoxelSampler(const CubeBundle& bundle, const NormalizationSpec& norm);

  std::size_t valid_count() const { return valid_.size(); }
  std::span<const std::uint32_t> valid_voxels() const { return valid_; }

  // Replaces out with batch_size samples; targets are normalized to [0, 1].
  void sample(Rng& rng, std::size_t batch_size, Batch& out) const;
  // Replaces out with the given voxels, in order.
  void gather(std::span<const std::uint32_t> voxels, Batch& out) const;
  void append(std::uint32_t voxel, Batch& out) const;

 private:
  const CubeBundle* bundle_;
  const NormalizationSpec* norm_;
  std::vector<std::uint32_t> valid_;
};

Batch sample_batch(const CubeBundle& bundle,
                                 const NormalizationSpec& norm,
                                 std::size_t batch_size, Rng& rng);

// Normalized time of frame t under norm.
double frame_time(const NormalizationSpec& norm, const CubeMeta& meta, std::size_t t);

}  // namespace gndc
