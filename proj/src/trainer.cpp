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

#include "gndc/trainer.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "gndc/error.hpp"

namespace gndc {

void TrainConfig::validate() const {
  if (batch_size < 1) fail(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  if (total_steps < 1) fail(ErrorCode::kInvalidArgument, "total_steps must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    fail(ErrorCode::kInvalidArgument, "learning_rate must be finite and >= 0");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) fail(ErrorCode::kInvalidArgument, "adam_eps must be > 0");
  if (!(weight_decay >= 0.0)) fail(ErrorCode::kInvalidArgument, "weight_decay must be >= 0");
  if (loss_log_interval < 1) fail(ErrorCode::kInvalidArgument, "loss_log_interval must be >= 1");
}

double TrainConfig::learning_rate_at(std::size_t step) const {
  double lr = learning_rate;
  for (double m : milestones) {
    const auto at = static_cast<std::size_t>(std::llround(m * static_cast<double>(total_steps)));
    if (step >= at) lr *= lr_decay;
  }
  return lr;
}

template <typename Real, typename Table>
double masked_loss(const BasicFieldParams<Real, Table>& params, const Batch& batch) {
  if (batch.size() == 0) fail(ErrorCode::kEmptyBatch, "masked_loss on an empty batch");
  const std::size_t channels = static_cast<std::size_t>(params.config.out_channels);
  if (batch.channels != channels) fail(ErrorCode::kInvalidArgument, "batch channel count mismatch");
  const auto pred = forward(params, std::span<const Coord>(batch.coords));
  double sum = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double d = static_cast<double>(pred[k]) - static_cast<double>(batch.targets[k]);
    sum += d * d;
  }
  return sum / static_cast<double>(batch.size());
}

template double masked_loss<float, float>(const BasicFieldParams<float>&, const Batch&);
template double masked_loss<double, double>(const BasicFieldParams<double>&, const Batch&);
template double masked_loss<float, Half>(const CompactFieldParams&, const Batch&);

double full_masked_loss(const FieldParams& params, const CubeBundle& bundle,
                        const NormalizationSpec& norm) {
  VoxelSampler sampler(bundle, norm);
  if (sampler.valid_count() == 0) fail(ErrorCode::kAllInvalidMask, "no valid voxel");
  Batch batch;
  double sum = 0.0;
  const auto valid = sampler.valid_voxels();
  constexpr std::size_t kChunk = 4096;
  for (std::size_t start = 0; start < valid.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, valid.size() - start);
    sampler.gather(valid.subspan(start, n), batch);
    sum += masked_loss(params, batch) * static_cast<double>(n);
  }
  return sum / static_cast<double>(valid.size());
}

template <typename Real>
AdamState<Real> AdamState<Real>::create(const FieldConfig& config) {
  AdamState s;
  s.m = FieldGradients<Real>::zeros(config);
  s.v = FieldGradients<Real>::zeros(config);
  return s;
}

template <typename Real>
void adam_step(BasicFieldParams<Real>& params, const FieldGradients<Real>& grads,
               AdamState<Real>& state, double learning_rate, const TrainConfig& config) {
  state.step += 1;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const Real c1 = static_cast<Real>(1.0 - std::pow(b1, static_cast<double>(state.step)));
  const Real c2 = static_cast<Real>(1.0 - std::pow(b2, static_cast<double>(state.step)));
  const Real rb1 = static_cast<Real>(b1);
  const Real rb2 = static_cast<Real>(b2);
  const Real lr = static_cast<Real>(learning_rate);
  const Real eps = static_cast<Real>(config.adam_eps);
  const Real wd = static_cast<Real>(config.weight_decay);

  auto update = [&](std::span<Real> p, std::span<const Real> g, std::span<Real> m,
                    std::span<Real> v, bool decay) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      Real gk = g[k];
      if (decay) gk += wd * p[k];
      m[k] = rb1 * m[k] + (Real{1} - rb1) * gk;
      v[k] = rb2 * v[k] + (Real{1} - rb2) * gk * gk;
      const Real mhat = m[k] / c1;
      const Real vhat = v[k] / c2;
      p[k] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  };
  for (std::size_t l = 0; l < params.table2d.size(); ++l) {
    update(params.table2d[l], grads.table2d[l], state.m.table2d[l], state.v.table2d[l], false);
  }
  for (std::size_t l = 0; l < params.table3d.size(); ++l) {
    update(params.table3d[l], grads.table3d[l], state.m.table3d[l], state.v.table3d[l], false);
  }
  for (std::size_t k = 0; k < params.weights.size(); ++k) {
    update(params.weights[k], grads.weights[k], state.m.weights[k], state.v.weights[k],
           config.weight_decay > 0.0);
    update(params.biases[k], grads.biases[k], state.m.biases[k], state.v.biases[k], false);
  }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(FieldParams&, const FieldGradients<float>&, AdamState<float>&,
                               double, const TrainConfig&);
template void adam_step<double>(FieldParamsF64&, const FieldGradients<double>&,
                                AdamState<double>&, double, const TrainConfig&);

namespace {

std::vector<std::uint32_t> monitor_voxels(std::span<const std::uint32_t> valid) {
  constexpr std::size_t kMonitor = 4096;
  if (valid.size() <= kMonitor) return {valid.begin(), valid.end()};
  std::vector<std::uint32_t> out;
  out.reserve(kMonitor);
  for (std::size_t k = 0; k < kMonitor; ++k) out.push_back(valid[k * valid.size() / kMonitor]);
  return out;
}

}  // namespace

TrainReport train_into(FieldParams& params, const CubeBundle& bundle, const NormalizationSpec& norm,
                       const TrainConfig& cfg, const TrainProgress& progress) {
  cfg.validate();
  params.check_shapes();
  if (static_cast<std::size_t>(params.config.out_channels) != bundle.meta.channels()) {
    fail(ErrorCode::kInvalidArgument, "field out_channels does not match bundle channels");
  }
  const auto started = std::chrono::steady_clock::now();

  VoxelSampler sampler(bundle, norm);
  if (sampler.valid_count() == 0) fail(ErrorCode::kAllInvalidMask, "no valid voxel to train on");

  Batch monitor;
  sampler.gather(monitor_voxels(sampler.valid_voxels()), monitor);

  Rng rng(cfg.rng_seed);
  Batch batch;
  auto grads = FieldGradients<float>::zeros(params.config);
  auto adam = AdamState<float>::create(params.config);
  const std::size_t channels = bundle.meta.channels();

  TrainReport report;
  for (std::size_t step = 0; step < cfg.total_steps; ++step) {
    if (step % cfg.loss_log_interval == 0) {
      const double l = masked_loss(params, monitor);
      report.trace.push_back({step, l});
      if (progress) progress(step, l);
    }

    sampler.sample(rng, cfg.batch_size, batch);
    zero_gradients(grads);
    double sum = 0.0;
    const float scale = 2.0f / static_cast<float>(batch.size());
    backward_fused<float>(
        params, batch.coords,
        [&](std::size_t k, std::span<const float> pred, std::span<float> up) {
          for (std::size_t c = 0; c < channels; ++c) {
            const float d = pred[c] - batch.targets[k * channels + c];
            sum += static_cast<double>(d) * static_cast<double>(d);
            up[c] = scale * d;
          }
        },
        grads);
    const double batch_loss = sum / static_cast<double>(batch.size());
    if (!std::isfinite(batch_loss)) {
      fail(ErrorCode::kNonFiniteLoss, "loss became non-finite at step " + std::to_string(step));
    }
    adam_step(params, grads, adam, cfg.learning_rate_at(step), cfg);
  }
  const double last = masked_loss(params, monitor);
  if (!std::isfinite(last)) {
    fail(ErrorCode::kNonFiniteLoss, "loss became non-finite at step " + std::to_string(cfg.total_steps));
  }
  report.trace.push_back({cfg.total_steps, last});
  report.final_loss = full_masked_loss(params, bundle, norm);
  report.steps = cfg.total_steps;
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

TrainResult train(const CubeBundle& bundle, FieldConfig field_cfg, const TrainConfig& train_cfg,
                  const TrainProgress& progress) {
  bundle.validate();
  train_cfg.validate();
  field_cfg.out_channels = static_cast<int>(bundle.meta.channels());
  field_cfg.validate();
  TrainResult result;
  result.norm = make_normalizer(bundle);
  result.params = init_field<float>(field_cfg, train_cfg.rng_seed ^ 0x9e3779b97f4a7c15ull);
  result.report = train_into(result.params, bundle, result.norm, train_cfg, progress);
  return result;
}

}  // namespace gndc
