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
#include <span>
#include <string>
#include <vector>

#include "gndc/cube.hpp"
#include "gndc/field.hpp"
#include "gndc/trainer.hpp"

namespace gndc {

struct Metrics {
  double r2 = 0.0;  // NaN when the truth has zero variance
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t count = 0;
};

// R^2 = 1 - SS_res / SS_tot. Throws LengthMismatch, ZeroVariance.
Metrics r2_rmse_mae(std::span<const double> pred, std::span<const double> truth);
// Same, but a zero-variance truth yields r2 = NaN instead of throwing.
Metrics error_metrics(std::span<const double> pred, std::span<const double> truth);

struct GapTier {
  std::string label;
  std::size_t count = 0;
  double min_diameter = 1.0;  // pixels
  double max_diameter = 1.0;
};

struct GapSpec {
  std::vector<GapTier> tiers;
  std::uint64_t seed = 0;
};

struct Gap {
  double ci = 0.0;  // centre in pixel units (row)
  double cj = 0.0;
  double diameter = 0.0;
  std::size_t tier = 0;
};

struct GapRecord {
  std::size_t frame = 0;
  std::vector<Gap> gaps;
  std::vector<int> tier_of_pixel;  // H*W; -1 outside every gap, else the largest covering tier
  std::vector<float> original;     // H*W*C values of the target frame before masking
  std::vector<std::uint8_t> original_mask;  // H*W

  std::size_t gap_pixels() const;
};

// Pixel (i, j) is inside a gap when its centre lies within diameter / 2.
bool inside_gap(const Gap& g, std::size_t i, std::size_t j);

// Places circles fully inside the frame and clears the mask under them on
// frame target only. Throws FrameTooSmall.
CubeBundle simulate_gaps(const CubeBundle& bundle, std::size_t target, const GapSpec& spec, GapRecord* record);

// Linear interpolation between the nearest valid frames around t; constant
// extension when only one side exists. Throws NoValidFrames.
std::vector<double> linear_interp_reconstruct(const CubeBundle& bundle, std::size_t i, std::size_t j,
                                              std::size_t t);

// Sinusoidal-activation coordinate MLP (x, y) -> R^C for one frame.
struct SirenConfig {
  int hidden_width = 32;
  int hidden_layers = 2;
  double omega0 = 30.0;
  std::size_t steps = 2000;
  std::size_t batch_size = 1024;  // 0 = full frame
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;

  std::size_t parameter_count(std::size_t channels) const;
  // Largest width with parameter_count <= budget (at least 1).
  static SirenConfig for_budget(std::size_t budget, std::size_t channels, int hidden_layers = 2);
};

struct SirenModel {
  SirenConfig config;
  std::size_t channels = 1;
  std::vector<std::vector<double>> weights;  // input-major, like the field MLP
  std::vector<std::vector<double>> biases;

  std::size_t parameter_count() const;
  // (x, y) in [0, 1]^2; out has `channels` entries.
  void forward(double x, double y, std::span<double> out) const;
};

struct PerFrameFit {
  SirenModel model;
  Metrics metrics;              // physical units
  std::vector<double> predicted;  // H*W*C physical values
};

// frame holds H*W*C physical values; fitted in normalized [0, 1] per channel.
PerFrameFit perframe_inr_baseline(std::span<const float> frame, std::size_t height, std::size_t width,
                                  std::size_t channels, const SirenConfig& cfg);

struct Int16Baseline {
  std::uint64_t bytes = 0;
  double max_abs_error = 0.0;             // worst over channels, physical units
  std::vector<double> max_error_per_band;
  std::vector<double> step_per_band;       // (max - min) / 65535
};

// Per-channel affine quantization to int16, then the in-repo byte coder.
Int16Baseline int16_lossless_baseline(const CubeBundle& bundle);

struct MetricsRow {
  std::string label;
  std::size_t pixels = 0;
  std::vector<Metrics> neural_per_band;
  std::vector<Metrics> linear_per_band;
  Metrics neural;  // band means
  Metrics linear;
};

struct MaskRestoreReport {
  std::vector<MetricsRow> rows;  // one per tier, then "all_gaps", then "outside"
  TrainReport train;
  GapRecord record;

  const MetricsRow* row(const std::string& label) const;
};

MaskRestoreReport mask_and_restore(const CubeBundle& bundle, std::size_t target, const FieldConfig& field_cfg,
                                   const TrainConfig& train_cfg, const GapSpec& spec);

std::string mask_restore_csv(const MaskRestoreReport& r);
std::string mask_restore_table(const MaskRestoreReport& r);

}  // namespace gndc
