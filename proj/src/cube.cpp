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

#include "gndc/cube.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json_io.hpp"
#include "gndc/bytes.hpp"
#include "gndc/error.hpp"

namespace gndc {

using nlohmann::json;

void CubeMeta::validate() const {
  if (height < 1 || width < 1) fail(ErrorCode::kShapeMismatch, "height and width must be >= 1");
  if (timestamps.empty()) fail(ErrorCode::kShapeMismatch, "at least one timestamp required");
  if (band_names.empty()) fail(ErrorCode::kShapeMismatch, "at least one band required");
  for (std::size_t k = 1; k < timestamps.size(); ++k) {
    if (timestamps[k] <= timestamps[k - 1]) {
      fail(ErrorCode::kNonMonotonicTimestamps,
           "timestamps not strictly increasing at index " + std::to_string(k));
    }
  }
  if (value_scale.size() != band_names.size() || value_offset.size() != band_names.size()) {
    fail(ErrorCode::kShapeMismatch, "scale/offset length must equal band count");
  }
  if (!(bbox.x_min < bbox.x_max) || !(bbox.y_min < bbox.y_max)) {
    fail(ErrorCode::kInvalidArgument, "degenerate bbox");
  }
  if (voxels() > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::kShapeMismatch, "cube too large (voxel count exceeds 2^32)");
  }
}

std::size_t CubeBundle::valid_count() const {
  return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto m) { return m != 0; }));
}

void CubeBundle::validate() const {
  meta.validate();
  if (values.size() != meta.samples()) {
    fail(ErrorCode::kShapeMismatch, "values: expected " + std::to_string(meta.samples()) +
                                        " floats, got " + std::to_string(values.size()));
  }
  if (mask.size() != meta.voxels()) {
    fail(ErrorCode::kShapeMismatch, "mask: expected " + std::to_string(meta.voxels()) +
                                        " bytes, got " + std::to_string(mask.size()));
  }
  const std::size_t channels = meta.channels();
  std::size_t valid = 0;
  for (std::size_t v = 0; v < mask.size(); ++v) {
    if (mask[v] > 1) fail(ErrorCode::kInvalidArgument, "mask bytes must be 0 or 1");
    if (mask[v] == 0) continue;
    ++valid;
    for (std::size_t c = 0; c < channels; ++c) {
      if (!std::isfinite(values[v * channels + c])) {
        fail(ErrorCode::kInvalidArgument, "non-finite value at valid voxel " + std::to_string(v));
      }
    }
  }
  if (valid == 0) fail(ErrorCode::kAllInvalidMask, "mask has no valid voxel");
}

double NormalizationSpec::time_to_t(double seconds) const {
  if (single_frame) return 0.5;
  return (seconds - static_cast<double>(t_first)) /
         (static_cast<double>(t_last) - static_cast<double>(t_first));
}

double NormalizationSpec::t_to_time(double t) const {
  if (single_frame) return static_cast<double>(t_first);
  return static_cast<double>(t_first) +
         t * (static_cast<double>(t_last) - static_cast<double>(t_first));
}

NormalizationSpec make_normalizer(const CubeMeta& meta) {
  meta.validate();
  NormalizationSpec n;
  n.height = meta.height;
  n.width = meta.width;
  n.bbox = meta.bbox;
  n.t_first = meta.timestamps.front();
  n.t_last = meta.timestamps.back();
  n.single_frame = meta.frames() == 1;
  n.value_min.assign(meta.channels(), 0.0);
  n.value_max.assign(meta.channels(), 1.0);
  return n;
}

NormalizationSpec make_normalizer(const CubeBundle& bundle) {
  NormalizationSpec n = make_normalizer(bundle.meta);
  const std::size_t channels = bundle.meta.channels();
  std::vector<double> lo(channels, std::numeric_limits<double>::infinity());
  std::vector<double> hi(channels, -std::numeric_limits<double>::infinity());
  for (std::size_t v = 0; v < bundle.mask.size(); ++v) {
    if (!bundle.mask[v]) continue;
    for (std::size_t c = 0; c < channels; ++c) {
      const double x = bundle.values[v * channels + c];
      lo[c] = std::min(lo[c], x);
      hi[c] = std::max(hi[c], x);
    }
  }
  for (std::size_t c = 0; c < channels; ++c) {
    if (!std::isfinite(lo[c])) fail(ErrorCode::kAllInvalidMask, "mask has no valid voxel");
    n.value_min[c] = lo[c];
    n.value_max[c] = hi[c] > lo[c] ? hi[c] : lo[c] + 1.0;
  }
  return n;
}

double frame_time(const NormalizationSpec& norm, const CubeMeta& meta, std::size_t t) {
  return norm.time_to_t(static_cast<double>(meta.timestamps[t]));
}

CubeBundle load_bundle(const std::filesystem::path& dir) {
  const auto meta_path = dir / "meta.json";
  const auto values_path = dir / "values.f32";
  const auto mask_path = dir / "mask.u8";
  for (const auto& p : {meta_path, values_path, mask_path}) {
    if (!std::filesystem::is_regular_file(p)) fail(ErrorCode::kMissingFile, "missing " + p.string());
  }

  CubeBundle b;
  {
    std::ifstream in(meta_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      fail(ErrorCode::kInvalidArgument, std::string("meta.json: ") + e.what());
    }
    b.meta = meta_from_json(j);
  }
  b.meta.validate();

  const auto raw = read_file(values_path);
  if (raw.size() != b.meta.samples() * sizeof(float)) {
    fail(ErrorCode::kShapeMismatch, "values.f32 holds " + std::to_string(raw.size() / 4) +
                                        " floats, meta declares " + std::to_string(b.meta.samples()));
  }
  b.values.resize(b.meta.samples());
  for (std::size_t k = 0; k < b.values.size(); ++k) {
    b.values[k] = std::bit_cast<float>(load_u32_le(raw.data() + 4 * k));
  }

  b.mask = read_file(mask_path);
  if (b.mask.size() != b.meta.voxels()) {
    fail(ErrorCode::kShapeMismatch, "mask.u8 holds " + std::to_string(b.mask.size()) +
                                        " bytes, meta declares " + std::to_string(b.meta.voxels()));
  }
  b.validate();
  return b;
}

void save_bundle(const CubeBundle& bundle, const std::filesystem::path& dir) {
  bundle.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIoFailure, "cannot create " + dir.string() + ": " + ec.message());

  const std::string text = meta_to_json(bundle.meta).dump(2) + "\n";
  write_file(dir / "meta.json",
             std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));

  std::vector<std::uint8_t> raw(bundle.values.size() * 4);
  for (std::size_t k = 0; k < bundle.values.size(); ++k) {
    store_u32_le(raw.data() + 4 * k, std::bit_cast<std::uint32_t>(bundle.values[k]));
  }
  write_file(dir / "values.f32", raw);
  write_file(dir / "mask.u8", bundle.mask);
}

VoxelSampler::VoxelSampler(const CubeBundle& bundle, const NormalizationSpec& norm)
    : bundle_(&bundle), norm_(&norm) {
  valid_.reserve(bundle.mask.size());
  for (std::size_t v = 0; v < bundle.mask.size(); ++v) {
    if (bundle.mask[v]) valid_.push_back(static_cast<std::uint32_t>(v));
  }
}

void VoxelSampler::append(std::uint32_t voxel, Batch& out) const {
  const auto& meta = bundle_->meta;
  const std::size_t frames = meta.frames();
  const std::size_t channels = meta.channels();
  const std::size_t t = voxel % frames;
  const std::size_t pixel = voxel / frames;
  const std::size_t j = pixel % meta.width;
  const std::size_t i = pixel / meta.width;
  out.coords.push_back({norm_->pixel_to_x(static_cast<double>(j)),
                        norm_->pixel_to_y(static_cast<double>(i)), frame_time(*norm_, meta, t)});
  for (std::size_t c = 0; c < channels; ++c) {
    const double v = bundle_->values[static_cast<std::size_t>(voxel) * channels + c];
    out.targets.push_back(static_cast<float>(norm_->normalize_value(c, v)));
  }
  out.voxels.push_back(voxel);
}

void VoxelSampler::sample(Rng& rng, std::size_t batch_size, Batch& out) const {
  if (valid_.empty()) fail(ErrorCode::kAllInvalidMask, "no valid voxel to sample");
  out.clear();
  out.channels = bundle_->meta.channels();
  for (std::size_t k = 0; k < batch_size; ++k) {
    append(valid_[rng.below(valid_.size())], out);
  }
}

void VoxelSampler::gather(std::span<const std::uint32_t> voxels, Batch& out) const {
  out.clear();
  out.channels = bundle_->meta.channels();
  for (auto v : voxels) append(v, out);
}

Batch sample_batch(const CubeBundle& bundle, const NormalizationSpec& norm,
                   std::size_t batch_size, Rng& rng) {
  if (batch_size < 1) fail(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  VoxelSampler sampler(bundle, norm);
  Batch batch;
  sampler.sample(rng, batch_size, batch);
  return batch;
}

}  // namespace gndc
