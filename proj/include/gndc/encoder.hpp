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

#include <filesystem>
#include <string>
#include <string_view>

#include "gndc/cube.hpp"
#include "gndc/field.hpp"
#include "gndc/format.hpp"
#include "gndc/residual.hpp"
#include "gndc/trainer.hpp"

namespace gndc {

struct EncodeConfig {
  FieldConfig field;
  TrainConfig train;
  ResidualConfig residual;
  bool store_mask = true;
  bool half_tables = true;
};

// {"field": {...}, "train": {...}, "residual": {...}, "store_mask": bool,
//  "table_dtype": "f16" | "f32"}; every key optional, unknown keys rejected.
EncodeConfig parse_encode_config(std::string_view json_text);
std::string encode_config_json(const EncodeConfig& cfg);

struct EncodeReport {
  TrainReport train;
  std::size_t residual_count = 0;
  std::uint64_t file_bytes = 0;
  std::uint64_t payload_bytes = 0;
  std::uint64_t source_bytes = 0;  // H*W*T*C float32
  double compression_ratio = 0.0;
};

// Trains, rounds tables to storage precision, then computes residuals against
// the stored-precision model so decoding reproduces them exactly.
GndcModel build_model(const CubeBundle& bundle, const EncodeConfig& cfg, EncodeReport* report = nullptr,
                      const TrainProgress& progress = {});

// Packages already-trained float params.
GndcModel package_model(const CubeBundle& bundle, const FieldParams& params, const NormalizationSpec& norm,
                        const EncodeConfig& cfg, const TrainReport& train_report);

EncodeReport encode_to_file(const CubeBundle& bundle, const EncodeConfig& cfg, const std::filesystem::path& out,
                            const TrainProgress& progress = {});

std::string encode_report_json(const EncodeReport& r);
std::string loss_trace_csv(const TrainReport& r);

}  // namespace gndc
