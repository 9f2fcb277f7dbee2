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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gndc/cube.hpp"
#include "gndc/field.hpp"
#include "gndc/residual.hpp"

namespace gndc {

// .gndc layout (little-endian):
//   magic "GNDC\0\1\0\0" | u32 header_len | canonical JSON header |
//   u32 section_count | section_count x {char name[16], u64 offset,
//   u64 length, u32 dtype, u32 crc32} | u32 crc32 of all preceding bytes |
//   zero padding | sections, each 8-byte aligned and zero padded between.
// The file ends exactly at the end of the last section.
inline constexpr std::array<std::uint8_t, 8> kGndcMagic = {'G', 'N', 'D', 'C', 0, 1, 0, 0};
inline constexpr std::uint32_t kGndcVersion = 1;

enum class SectionDtype : std::uint32_t {
  kBytes = 0,
  kF32 = 1,
  kF16 = 2,
  kCodedStream = 3,
  // 16..31 reserved for quantized payloads.
};

struct SectionEntry {
  std::string name;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
  SectionDtype dtype = SectionDtype::kBytes;
  std::uint32_t crc = 0;
};

struct TrainingInfo {
  std::uint64_t steps = 0;
  std::uint64_t batch_size = 0;
  std::uint64_t seed = 0;
  double learning_rate = 0.0;
  double final_loss = 0.0;
  double seconds = 0.0;
  bool operator==(const TrainingInfo&) const = default;
};

using StoredParams = std::variant<FieldParams, CompactFieldParams>;  // f32 or f16 tables

struct GndcModel {
  CubeMeta meta;
  NormalizationSpec norm;
  FieldConfig field;
  ResidualConfig residual_config;
  TrainingInfo training;
  StoredParams params;
  std::optional<std::vector<std::uint8_t>> mask;  // H*W*T entries of 0/1
  std::optional<ResidualPackage> residuals;

  bool half_tables() const { return std::holds_alternative<CompactFieldParams>(params); }
  // Throws InconsistentParts when configs, tensors and optional parts disagree.
  void check_consistency() const;
};

// Header and section table only; payload bytes are never read.
struct GndcHeader {
  CubeMeta meta;
  NormalizationSpec norm;
  FieldConfig field;
  ResidualConfig residual_config;
  TrainingInfo training;
  bool half_tables = true;
  bool has_mask = false;
  bool has_residuals = false;
  std::uint64_t residual_count = 0;
  std::uint64_t parameter_count = 0;
  std::vector<SectionEntry> sections;
  std::uint64_t file_size = 0;
  std::string header_json;

  std::uint64_t payload_bytes() const;  // neural tensor sections
};

std::vector<std::uint8_t> serialize_gndc(const GndcModel& model);
GndcModel parse_gndc(std::span<const std::uint8_t> bytes);
GndcHeader parse_gndc_header(std::span<const std::uint8_t> prefix, std::uint64_t file_size);

void write_gndc(const GndcModel& model, const std::filesystem::path& path);
GndcModel read_gndc(const std::filesystem::path& path);
GndcHeader read_gndc_header(const std::filesystem::path& path);

struct InspectSummary {
  GndcHeader header;
  std::uint64_t source_bytes = 0;  // H*W*T*C float32 samples
  double compression_ratio = 0.0;  // source_bytes / file_size
};

InspectSummary inspect(const std::filesystem::path& path);
std::string inspect_json(const InspectSummary& s);
std::string inspect_text(const InspectSummary& s);

}  // namespace gndc
