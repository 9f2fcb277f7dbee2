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

#include <cstring>
#include <string>
#include <vector>

#include "gndc/cube.hpp"
#include "gndc/field.hpp"
#include "gndc/format.hpp"
#include "gndc/residual.hpp"
#include "gndc/rng.hpp"

namespace gndc::testing {

// Random shapes, random tensors, optional mask and residuals. Nothing trained.
inline GndcModel random_model(std::uint64_t seed, bool half, bool correction) {
  Rng rng(seed);
  const auto pick = [&](std::size_t lo, std::size_t hi) { return lo + rng.below(hi - lo + 1); };
  GndcModel m;
  auto& meta = m.meta;
  meta.crs = rng.uniform() < 0.5 ? "EPSG:4326" : "EPSG:32633";
  meta.height = pick(1, 9);
  meta.width = pick(1, 9);
  const std::size_t T = pick(1, 5), C = pick(1, 3);
  std::int64_t ts = 1500000000 + static_cast<std::int64_t>(rng.below(1000000));
  for (std::size_t t = 0; t < T; ++t) {
    meta.timestamps.push_back(ts);
    ts += 1 + static_cast<std::int64_t>(rng.below(864000));
  }
  for (std::size_t c = 0; c < C; ++c) {
    meta.band_names.push_back("band_" + std::to_string(c));
    meta.value_scale.push_back(rng.uniform(0.5, 2.0));
    meta.value_offset.push_back(rng.uniform(-1.0, 1.0));
  }
  meta.bbox = {rng.uniform(-10, 0), rng.uniform(-10, 0), rng.uniform(1, 10), rng.uniform(1, 10)};
  m.norm = make_normalizer(meta);
  m.norm.value_min.clear();
  m.norm.value_max.clear();
  for (std::size_t c = 0; c < C; ++c) {
    const double lo = rng.uniform(-5, 5);
    m.norm.value_min.push_back(lo);
    m.norm.value_max.push_back(lo + rng.uniform(0.1, 10));
  }

  FieldConfig f;
  f.grid2d = {2, static_cast<int>(pick(1, 4)), static_cast<int>(pick(1, 3)), static_cast<int>(pick(4, 9)),
              static_cast<int>(pick(2, 6)), 1.5};
  f.grid3d = {3, static_cast<int>(pick(1, 3)), static_cast<int>(pick(1, 3)), static_cast<int>(pick(4, 9)),
              static_cast<int>(pick(2, 5)), 1.4};
  f.spatial_scale = rng.uniform(0.1, 1.0);
  f.hidden_width = static_cast<int>(pick(2, 16));
  f.hidden_layers = static_cast<int>(pick(1, 3));
  f.out_channels = static_cast<int>(C);
  m.field = f;
  auto p = init_field<float>(f, seed);
  for (auto& t : p.table2d) for (auto& v : t) v = static_cast<float>(rng.uniform(-1, 1));
  for (auto& t : p.table3d) for (auto& v : t) v = static_cast<float>(rng.uniform(-1, 1));
  for (auto& b : p.biases) for (auto& v : b) v = static_cast<float>(rng.normal());
  if (half) {
    m.params = compact_params(p);
  } else {
    m.params = p;
  }

  m.residual_config.threshold = rng.uniform(0, 0.05);
  m.residual_config.quant_step = rng.uniform(1e-4, 1e-2);
  m.training = {pick(1, 5000), pick(1, 4096), rng.next_u64() >> 12, 1e-2, rng.uniform(), rng.uniform(0, 60)};
  if (correction) {
    std::vector<std::uint8_t> mask(meta.voxels());
    for (auto& b : mask) b = rng.uniform() < 0.8 ? 1 : 0;
    m.mask = mask;
    ResidualPackage pkg;
    pkg.total = meta.samples();
    pkg.quant_step = m.residual_config.quant_step;
    pkg.threshold = m.residual_config.threshold;
    for (std::uint64_t k = 0; k < pkg.total; ++k) {
      if (rng.uniform() < 0.2) {
        pkg.indices.push_back(k);
        pkg.codes.push_back(static_cast<std::int64_t>(rng.below(200)) - 100);
      }
    }
    m.residuals = pkg;
  } else {
    m.residual_config.enabled = false;
  }
  return m;
}

template <typename Real, typename Table>
bool tensors_identical(const BasicFieldParams<Real, Table>& a, const BasicFieldParams<Real, Table>& b) {
  bool same = a.config == b.config;
  auto cmp = [&](const auto& x, const auto& y) {
    if (x.size() != y.size()) {
      same = false;
      return;
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (x[k].size() != y[k].size() ||
          std::memcmp(x[k].data(), y[k].data(), x[k].size() * sizeof(x[k][0])) != 0) {
        same = false;
      }
    }
  };
  cmp(a.table2d, b.table2d);
  cmp(a.table3d, b.table3d);
  cmp(a.weights, b.weights);
  cmp(a.biases, b.biases);
  return same;
}

inline bool models_identical(const GndcModel& a, const GndcModel& b) {
  if (!(a.meta == b.meta) || !(a.norm == b.norm) || !(a.field == b.field) || !(a.training == b.training)) return false;
  if (a.mask != b.mask || a.residuals != b.residuals) return false;
  if (a.residual_config.threshold != b.residual_config.threshold ||
      a.residual_config.quant_step != b.residual_config.quant_step ||
      a.residual_config.enabled != b.residual_config.enabled) {
    return false;
  }
  if (a.params.index() != b.params.index()) return false;
  if (const auto* pa = std::get_if<FieldParams>(&a.params)) return tensors_identical(*pa, std::get<FieldParams>(b.params));
  return tensors_identical(std::get<CompactFieldParams>(a.params), std::get<CompactFieldParams>(b.params));
}

}  // namespace gndc::testing
