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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gndc/cube.hpp"
#include "gndc/half.hpp"

namespace gndc {

// One level of a multiresolution grid. Coarse levels whose (N+1)^d vertices
// fit the table are stored densely (row-major, axis 0 most significant) with
// exactly (N+1)^d rows; finer levels hash into 2^table_log2 rows.
struct GridLevel {
  std::uint32_t resolution = 0;
  std::uint32_t rows = 0;
  bool dense = false;
};

struct HashGridConfig {
  int dims = 2;
  int levels = 8;
  int features = 2;
  int table_log2 = 15;
  int base_resolution = 16;
  double growth = 1.5;

  std::uint32_t resolution(int level) const;
  std::vector<GridLevel> layout() const;
  std::size_t output_width() const { return static_cast<std::size_t>(levels * features); }
  std::size_t parameter_count() const;
  void validate() const;

  bool operator==(const HashGridConfig&) const = default;
};

struct FieldConfig {
  HashGridConfig grid2d{2, 8, 2, 15, 16, 1.5};
  HashGridConfig grid3d{3, 6, 2, 13, 8, 1.4};
  double spatial_scale = 0.25;
  int hidden_width = 64;
  int hidden_layers = 2;
  int out_channels = 1;

  std::size_t embedding_width() const {
    return grid2d.output_width() + grid3d.output_width();
  }
  std::size_t layer_count() const { return static_cast<std::size_t>(hidden_layers) + 1; }
  std::size_t layer_in(std::size_t layer) const;
  std::size_t layer_out(std::size_t layer) const;
  std::size_t max_width() const;
  std::size_t parameter_count() const;
  void validate() const;

  bool operator==(const FieldConfig&) const = default;
};

// Vertex -> table row. Dense levels use row-major indexing; hashed levels XOR
// per-axis products with multipliers (1, 2654435761, 805459861) and mask to
// the power-of-two table size.
std::uint32_t spatial_hash(std::span<const std::uint32_t> vertex, std::uint32_t table_size);
std::uint32_t hash_index(std::span<const std::uint32_t> vertex, const GridLevel& level);

enum class TensorKind { kTable2d, kTable3d, kWeight, kBias };

// Field parameters. Tables hold rows x features per level; MLP weights for
// layer k are stored input-major: weights[k][i * out + o] is W(o, i).
// Table may differ from Real to keep read-only tables in half precision.
template <typename Real, typename Table = Real>
struct BasicFieldParams {
  FieldConfig config;
  std::vector<GridLevel> levels2d;
  std::vector<GridLevel> levels3d;
  std::vector<std::vector<Table>> table2d;
  std::vector<std::vector<Table>> table3d;
  std::vector<std::vector<Real>> weights;
  std::vector<std::vector<Real>> biases;

  // Allocates zeroed tensors shaped for config.
  static BasicFieldParams zeros(const FieldConfig& config);

  std::size_t parameter_count() const;
  // Throws InconsistentParts when tensor shapes disagree with config.
  void check_shapes() const;
};

using FieldParams = BasicFieldParams<float>;
using FieldParamsF64 = BasicFieldParams<double>;
using CompactFieldParams = BasicFieldParams<float, Half>;

// Default initialization: tables U[-1e-4, 1e-4], weights Glorot-uniform,
// biases zero.
template <typename Real>
BasicFieldParams<Real> init_field(const FieldConfig& config, std::uint64_t seed);

template <typename To, typename From>
BasicFieldParams<To> convert_params(const BasicFieldParams<From>& p);

CompactFieldParams compact_params(const FieldParams& p);
FieldParams expand_params(const CompactFieldParams& p);

// Gradients share the layout of the parameters.
template <typename Real>
using FieldGradients = BasicFieldParams<Real>;

template <typename Real>
void zero_gradients(FieldGradients<Real>& g);

// Visits every tensor (tables first, then weights/biases per layer).
template <typename Real, typename Table, typename Fn>
void for_each_tensor(BasicFieldParams<Real, Table>& p, Fn&& fn) {
  for (std::size_t l = 0; l < p.table2d.size(); ++l) fn(TensorKind::kTable2d, l, std::span<Table>(p.table2d[l]));
  for (std::size_t l = 0; l < p.table3d.size(); ++l) fn(TensorKind::kTable3d, l, std::span<Table>(p.table3d[l]));
  for (std::size_t k = 0; k < p.weights.size(); ++k) {
    fn(TensorKind::kWeight, k, std::span<Real>(p.weights[k]));
    fn(TensorKind::kBias, k, std::span<Real>(p.biases[k]));
  }
}

template <typename Real, typename Table, typename Fn>
void for_each_tensor(const BasicFieldParams<Real, Table>& p, Fn&& fn) {
  for (std::size_t l = 0; l < p.table2d.size(); ++l) fn(TensorKind::kTable2d, l, std::span<const Table>(p.table2d[l]));
  for (std::size_t l = 0; l < p.table3d.size(); ++l) fn(TensorKind::kTable3d, l, std::span<const Table>(p.table3d[l]));
  for (std::size_t k = 0; k < p.weights.size(); ++k) {
    fn(TensorKind::kWeight, k, std::span<const Real>(p.weights[k]));
    fn(TensorKind::kBias, k, std::span<const Real>(p.biases[k]));
  }
}

// Bilinear lookup in the 2D grid at clamped (x, y); out has grid2d width.
template <typename Real, typename Table>
void encode2d(const BasicFieldParams<Real, Table>& p, double x, double y, std::span<Real> out);

// Trilinear lookup in the 3D grid at (s*x, s*y, t); out has grid3d width.
template <typename Real, typename Table>
void encode3d(const BasicFieldParams<Real, Table>& p, double x, double y, double t,
              std::span<Real> out);

// Full embedding [f_xy; f_T].
template <typename Real, typename Table>
void encode(const BasicFieldParams<Real, Table>& p, const Coord& c, std::span<Real> out);

// MLP: ReLU hidden layers, linear output. out has out_channels entries.
template <typename Real, typename Table>
void decode(const BasicFieldParams<Real, Table>& p, std::span<const Real> embedding,
            std::span<Real> out);

// out[k * C + c] for each coord. Every element is computed by the same
// per-sample routine in the same order, so batch and single-sample results
// are bit-identical.
template <typename Real, typename Table>
void forward(const BasicFieldParams<Real, Table>& p, std::span<const Coord> coords,
             std::span<Real> out);

template <typename Real, typename Table>
std::vector<Real> forward(const BasicFieldParams<Real, Table>& p, std::span<const Coord> coords);

// Accumulates into grads the gradient of sum_k <upstream_k, v_hat_k>.
template <typename Real>
void backward(const BasicFieldParams<Real>& p, std::span<const Coord> coords,
              std::span<const Real> upstream, FieldGradients<Real>& grads);

// Fused single pass: for each sample, compute the prediction, let
// upstream_fn fill dL/dv_hat from it, and accumulate gradients.
// upstream_fn(k, prediction, upstream_out).
template <typename Real>
using UpstreamFn = std::function<void(std::size_t, std::span<const Real>, std::span<Real>)>;

template <typename Real>
void backward_fused(const BasicFieldParams<Real>& p, std::span<const Coord> coords,
                    const UpstreamFn<Real>& upstream_fn, FieldGradients<Real>& grads);

// d v_hat / d t (normalized time), out[k * C + c]. One-sided at cell
// boundaries of the 3D grid (the cell to the right is used, except at t = 1).
template <typename Real, typename Table>
void time_partial(const BasicFieldParams<Real, Table>& p, std::span<const Coord> coords,
                  std::span<Real> out);

// True when t sits exactly on a temporal cell boundary at some 3D level.
bool on_temporal_boundary(const FieldConfig& config, double t);

}  // namespace gndc
