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
#include <optional>
#include <span>
#include <vector>

#include "gndc/cube.hpp"
#include "gndc/field.hpp"

namespace gndc {

struct ResidualConfig {
  double threshold = 0.02;   // tau, normalized units
  double quant_step = 0.005;  // q
  bool enabled = true;

  void validate() const;
};

// Quantized residuals at linear index ((i*W + j)*T + t)*C + c, sorted
// strictly ascending. Values are in normalized units: r ~= q * code.
struct ResidualPackage {
  std::uint64_t total = 0;  // H*W*T*C
  double quant_step = 0.005;
  double threshold = 0.02;
  std::vector<std::uint64_t> indices;
  std::vector<std::int64_t> codes;

  std::size_t size() const { return indices.size(); }
  std::optional<std::int64_t> find(std::uint64_t index) const;
  // Throws InconsistentParts on broken invariants.
  void validate() const;
  bool operator==(const ResidualPackage&) const = default;
};

// r = v - v_hat at valid voxels (double precision), stored iff |r| > tau.
template <typename Real, typename Table>
ResidualPackage compute_residuals(const CubeBundle& bundle, const BasicFieldParams<Real, Table>& params,
                                  const NormalizationSpec& norm, const ResidualConfig& cfg);

// prediction covers linear indices [offset, offset + prediction.size()).
// Entries outside that range are skipped.
template <typename T>
void apply_residuals(std::span<T> prediction, const ResidualPackage& pkg, std::uint64_t offset);

// u64 total | f64 q | f64 tau | stream(delta indices) | stream(codes)
std::vector<std::uint8_t> serialize_residuals(const ResidualPackage& pkg);
ResidualPackage deserialize_residuals(std::span<const std::uint8_t> data);

}  // namespace gndc
