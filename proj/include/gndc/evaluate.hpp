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

#include <string>
#include <string_view>
#include <vector>

#include "gndc/baselines.hpp"
#include "gndc/query.hpp"

namespace gndc {

struct BandFidelity {
  std::string band;
  Metrics field;      // network output only, physical units
  Metrics corrected;  // with the correction layer applied
};

// Scored over every valid voxel of the reference bundle.
struct FidelityReport {
  std::vector<BandFidelity> bands;
  Metrics field_normalized;  // all bands pooled, normalized units
  Metrics corrected_normalized;
  double max_abs_error_corrected = 0.0;  // physical units, worst band
};

FidelityReport evaluate_model(const LoadedCube& cube, const CubeBundle& reference);
std::string fidelity_json(const FidelityReport& r);
std::string fidelity_table(const FidelityReport& r);

struct MaskRestoreConfig {
  std::size_t target = 0;
  GapSpec gaps;
  FieldConfig field;
  TrainConfig train;
};

// {"target": t, "seed": n, "tiers": [{"label", "count", "min_diameter",
// "max_diameter"}], "field": {...}, "train": {...}}. Missing target picks the
// middle frame; missing tiers picks small/medium/large discs scaled to the frame.
MaskRestoreConfig parse_mask_restore_config(std::string_view json_text, const CubeMeta& meta);
std::string mask_restore_json(const MaskRestoreReport& r);

}  // namespace gndc
