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

#include "gndc/residual.hpp"

#include <algorithm>
#include <cmath>

#include "gndc/bytes.hpp"
#include "gndc/codec.hpp"
#include "gndc/error.hpp"

namespace gndc {

void ResidualConfig::validate() const {
  if (!(quant_step > 0.0) || !std::isfinite(quant_step)) {
    fail(ErrorCode::kInvalidArgument, "residual quant_step must be > 0");
  }
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    fail(ErrorCode::kInvalidArgument, "residual threshold must be >= 0");
  }
}

std::optional<std::int64_t> ResidualPackage::find(std::uint64_t index) const {
  const auto it = std::lower_bound(indices.begin(), indices.end(), index);
  if (it == indices.end() || *it != index) return std::nullopt;
  return codes[static_cast<std::size_t>(it - indices.begin())];
}

void ResidualPackage::validate() const {
  if (indices.size() != codes.size()) fail(ErrorCode::kInconsistentParts, "residual index/code count mismatch");
  if (!(quant_step > 0.0) || !(threshold >= 0.0)) {
    fail(ErrorCode::kInconsistentParts, "residual package has an invalid quantization step");
  }
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= total) fail(ErrorCode::kInconsistentParts, "residual index out of range");
    if (k > 0 && indices[k] <= indices[k - 1]) {
      fail(ErrorCode::kInconsistentParts, "residual indices must be strictly ascending");
    }
  }
}

template <typename Real, typename Table>
ResidualPackage compute_residuals(const CubeBundle& bundle, const BasicFieldParams<Real, Table>& params,
                                  const NormalizationSpec& norm, const ResidualConfig& cfg) {
  cfg.validate();
  const auto& m = bundle.meta;
  const std::size_t channels = m.channels();
  if (static_cast<std::size_t>(params.config.out_channels) != channels) {
    fail(ErrorCode::kInconsistentParts, "field channel count does not match the cube");
  }
  ResidualPackage pkg;
  pkg.total = m.samples();
  pkg.quant_step = cfg.quant_step;
  pkg.threshold = cfg.threshold;

  VoxelSampler sampler(bundle, norm);
  const auto valid = sampler.valid_voxels();
  Batch batch;
  std::vector<Real> pred;
  constexpr std::size_t kChunk = 4096;
  for (std::size_t start = 0; start < valid.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, valid.size() - start);
    sampler.gather(valid.subspan(start, n), batch);
    pred.resize(n * channels);
    forward(params, std::span<const Coord>(batch.coords), std::span<Real>(pred));
    for (std::size_t k = 0; k < n; ++k) {
      const std::uint64_t voxel = valid[start + k];
      for (std::size_t c = 0; c < channels; ++c) {
        const std::uint64_t idx = voxel * channels + c;
        const double v = norm.normalize_value(c, static_cast<double>(bundle.values[idx]));
        const double r = v - static_cast<double>(pred[k * channels + c]);
        if (!(std::abs(r) > cfg.threshold)) continue;
        pkg.indices.push_back(idx);
        pkg.codes.push_back(static_cast<std::int64_t>(std::llround(r / cfg.quant_step)));
      }
    }
  }
  return pkg;
}

template ResidualPackage compute_residuals<float, float>(const CubeBundle&, const FieldParams&,
                                                         const NormalizationSpec&, const ResidualConfig&);
template ResidualPackage compute_residuals<double, double>(const CubeBundle&, const FieldParamsF64&,
                                                           const NormalizationSpec&, const ResidualConfig&);
template ResidualPackage compute_residuals<float, Half>(const CubeBundle&, const CompactFieldParams&,
                                                        const NormalizationSpec&, const ResidualConfig&);

template <typename T>
void apply_residuals(std::span<T> prediction, const ResidualPackage& pkg, std::uint64_t offset) {
  if (offset > pkg.total || prediction.size() > pkg.total - offset) {
    fail(ErrorCode::kIndexOutOfRange, "residual section exceeds the package index space");
  }
  const std::uint64_t end = offset + prediction.size();
  auto it = std::lower_bound(pkg.indices.begin(), pkg.indices.end(), offset);
  for (; it != pkg.indices.end() && *it < end; ++it) {
    const auto k = static_cast<std::size_t>(it - pkg.indices.begin());
    T& p = prediction[static_cast<std::size_t>(*it - offset)];
    p = static_cast<T>(static_cast<double>(p) + pkg.quant_step * static_cast<double>(pkg.codes[k]));
  }
}

template void apply_residuals<float>(std::span<float>, const ResidualPackage&, std::uint64_t);
template void apply_residuals<double>(std::span<double>, const ResidualPackage&, std::uint64_t);

std::vector<std::uint8_t> serialize_residuals(const ResidualPackage& pkg) {
  pkg.validate();
  std::vector<std::int64_t> deltas(pkg.indices.size());
  std::uint64_t prev = 0;
  for (std::size_t k = 0; k < pkg.indices.size(); ++k) {
    deltas[k] = static_cast<std::int64_t>(pkg.indices[k] - prev);
    prev = pkg.indices[k];
  }
  ByteWriter w;
  w.u64(pkg.total);
  w.f64(pkg.quant_step);
  w.f64(pkg.threshold);
  w.raw(entropy_encode(deltas));
  w.raw(entropy_encode(pkg.codes));
  return std::move(w.bytes());
}

ResidualPackage deserialize_residuals(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  ResidualPackage pkg;
  pkg.total = r.u64();
  pkg.quant_step = r.f64();
  pkg.threshold = r.f64();
  if (!r.ok()) fail(ErrorCode::kCorruptStream, "residual header truncated");
  auto rest = data.subspan(r.pos());
  const StreamInfo first = peek_stream(rest);
  const auto deltas = entropy_decode(rest.first(first.total_size));
  rest = rest.subspan(first.total_size);
  pkg.codes = entropy_decode(rest);
  if (deltas.size() != pkg.codes.size()) fail(ErrorCode::kCorruptStream, "residual index/code count mismatch");
  pkg.indices.resize(deltas.size());
  std::uint64_t acc = 0;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (deltas[k] < (k == 0 ? 0 : 1)) fail(ErrorCode::kCorruptStream, "residual indices not ascending");
    const auto d = static_cast<std::uint64_t>(deltas[k]);
    if (d > pkg.total || acc > pkg.total - d) fail(ErrorCode::kCorruptStream, "residual index out of range");
    acc += d;
    pkg.indices[k] = acc;
  }
  if (!pkg.indices.empty() && pkg.indices.back() >= pkg.total) {
    fail(ErrorCode::kCorruptStream, "residual index out of range");
  }
  if (!(pkg.quant_step > 0.0) || !std::isfinite(pkg.quant_step) || !(pkg.threshold >= 0.0)) {
    fail(ErrorCode::kCorruptStream, "residual quantization parameters invalid");
  }
  return pkg;
}

}  // namespace gndc
