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
#include <functional>
#include <utility>
#include <vector>

#include "gndc/cube.hpp"
#include "gndc/field.hpp"

namespace gndc {

struct TrainConfig {
  std::size_t batch_size = 1024;
  std::size_t total_steps = 2000;
  double learning_rate = 1e-2;
  double lr_decay = 0.5;                        // applied at each milestone
  std::vector<double> milestones = {0.6, 0.8};  // fractions of total_steps
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.99;
  double adam_eps = 1e-10;
  double weight_decay = 0.0;  // MLP weights only
  std::uint64_t rng_seed = 0;
  std::size_t loss_log_interval = 100;

  void validate() const;
  double learning_rate_at(std::size_t step) const;  // step is 0-based
};

struct LossPoint {
  std::size_t step = 0;
  double loss = 0.0;
};

struct TrainReport {
  std::vector<LossPoint> trace;  // masked loss on a fixed monitor set
  double final_loss = 0.0;       // masked loss over every valid voxel
  double seconds = 0.0;
  std::size_t steps = 0;
};

struct TrainResult {
  FieldParams params;
  NormalizationSpec norm;
  TrainReport report;
};

// Mean squared L2 error over the batch (normalized targets).
template <typename Real, typename Table>
double masked_loss(const BasicFieldParams<Real, Table>& params, const Batch& batch);

// Masked objective over the whole cube: sum of M * ||v_hat - v||^2 over the
// valid voxel count.
double full_masked_loss(const FieldParams& params, const CubeBundle& bundle,
                        const NormalizationSpec& norm);

template <typename Real>
struct AdamState {
  FieldGradients<Real> m;
  FieldGradients<Real> v;
  std::size_t step = 0;

  static AdamState create(const FieldConfig& config);
};

// Bias-corrected adaptive-moment update with explicit learning rate.
// weight_decay adds wd * w to MLP weight gradients only.
template <typename Real>
void adam_step(BasicFieldParams<Real>& params, const FieldGradients<Real>& grads,
               AdamState<Real>& state, double learning_rate, const TrainConfig& config);

using TrainProgress = std::function<void(std::size_t step, double loss)>;

// The field's out_channels is set to the bundle's channel count.
TrainResult train(const CubeBundle& bundle, FieldConfig field_cfg, const TrainConfig& train_cfg,
                  const TrainProgress& progress = {});

// Continue optimizing existing params (used by tests and baselines).
TrainReport train_into(FieldParams& params, const CubeBundle& bundle, const NormalizationSpec& norm,
                       const TrainConfig& train_cfg, const TrainProgress& progress = {});

}  // namespace gndc
