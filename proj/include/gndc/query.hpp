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
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gndc/cube.hpp"
#include "gndc/format.hpp"

namespace gndc {

enum class Provenance : std::uint8_t {
  kObserved = 0,       // grid-aligned query at a valid voxel, residual applied
  kReconstructed = 1,  // masked voxel, off-grid coordinate/time, or no mask stored
};

const char* provenance_name(Provenance p);

struct QueryResult {
  double time = 0.0;            // seconds since epoch actually evaluated
  std::vector<double> values;   // physical units, one per band
  std::vector<Provenance> flags;  // one per band
};

// Half-open pixel window [i0, i1) x [j0, j1).
struct PixelWindow {
  std::size_t i0 = 0, i1 = 0, j0 = 0, j1 = 0;
  std::size_t rows() const { return i1 - i0; }
  std::size_t cols() const { return j1 - j0; }
  std::size_t pixels() const { return rows() * cols(); }
};

struct RegionResult {
  PixelWindow window;
  std::size_t channels = 0;
  double time = 0.0;
  std::vector<double> values;        // (row, col, channel) row-major
  std::vector<Provenance> flags;     // (row, col, channel)
};

class LoadedCube {
 public:
  explicit LoadedCube(GndcModel model);
  static std::shared_ptr<const LoadedCube> open(const std::filesystem::path& path);

  const CubeMeta& meta() const { return meta_; }
  const NormalizationSpec& norm() const { return norm_; }
  const FieldConfig& field_config() const { return field_; }
  bool has_mask() const { return !mask_bits_.empty(); }
  bool has_residuals() const { return residuals_.has_value(); }
  std::size_t residual_count() const { return residuals_ ? residuals_->size() : 0; }

  // Bytes held by parameters; and by parameters plus decoded correction layer.
  std::size_t parameter_bytes() const;
  std::size_t resident_bytes() const;

  // Raw field output (normalized units) at normalized coordinates.
  void evaluate(std::span<const Coord> coords, std::span<float> out) const;
  // d(field)/dt in normalized units per unit normalized time.
  void evaluate_time_partial(std::span<const Coord> coords, std::span<float> out) const;

  bool valid(std::size_t i, std::size_t j, std::size_t t) const;
  // Index of a native timestamp equal to seconds, if any.
  std::optional<std::size_t> frame_at(double seconds) const;

  QueryResult query_point(double x, double y, double seconds) const;
  QueryResult query_voxel(std::size_t i, std::size_t j, std::size_t t) const;

  RegionResult query_region(const PixelWindow& w, double seconds) const;
  RegionResult query_region_frame(const PixelWindow& w, std::size_t t) const;

  // Native timestamps.
  std::vector<QueryResult> query_timeseries(double x, double y) const;
  // n instants evenly spaced over [first, last] (n == 1 gives first).
  std::vector<QueryResult> query_timeseries(double x, double y, std::size_t n) const;

  // d v / d t in physical units per unit normalized time, (row, col, channel).
  RegionResult query_derivative(const PixelWindow& w, double seconds) const;

  double physical(std::size_t c, double normalized) const;

 private:
  void check_window(const PixelWindow& w) const;
  RegionResult region_impl(const PixelWindow& w, double t_norm, std::optional<std::size_t> frame,
                           double seconds) const;

  CubeMeta meta_;
  NormalizationSpec norm_;
  FieldConfig field_;
  StoredParams params_;
  std::vector<std::uint64_t> mask_bits_;
  std::optional<ResidualPackage> residuals_;
};

std::string query_result_json(const LoadedCube& cube, const QueryResult& r);
std::string timeseries_json(const LoadedCube& cube, double x, double y, const std::vector<QueryResult>& rs);
std::string region_json(const LoadedCube& cube, const RegionResult& r);
std::string derivative_json(const LoadedCube& cube, const RegionResult& r);
std::string meta_json(const LoadedCube& cube, const std::filesystem::path& path);

struct LatencyStats {
  std::string name;
  std::size_t runs = 0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  std::size_t frames_read = 0;  // per query, baseline only
};

struct BenchReport {
  std::vector<LatencyStats> rows;
  std::size_t parameter_bytes = 0;
  std::size_t resident_bytes = 0;
  std::uint64_t payload_bytes = 0;
  std::uint64_t file_bytes = 0;
  std::size_t region_pixels = 0;
};

struct BenchConfig {
  std::size_t runs = 50;
  std::size_t region_size = 64;  // square window edge, clipped to the cube
  std::uint64_t seed = 1;
};

// Single-pixel full time series and a regional subset, against the neural
// path and a frame-per-file raster baseline written under scratch_dir.
BenchReport bench_queries(const std::filesystem::path& model_path, const CubeBundle& source,
                          const std::filesystem::path& scratch_dir, const BenchConfig& cfg);
std::string bench_json(const BenchReport& r);
std::string bench_table(const BenchReport& r);

}  // namespace gndc
