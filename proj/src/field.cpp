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

#include "gndc/field.hpp"

#include <algorithm>
#include <cmath>

#include "gndc/error.hpp"
#include "gndc/rng.hpp"

namespace gndc {

// ---------------------------------------------------------------------------
// Configuration

std::uint32_t HashGridConfig::resolution(int level) const {
  const double n = static_cast<double>(base_resolution) * std::pow(growth, level);
  return static_cast<std::uint32_t>(std::floor(n + 1e-9));
}

std::vector<GridLevel> HashGridConfig::layout() const {
  std::vector<GridLevel> out;
  out.reserve(static_cast<std::size_t>(levels));
  const std::uint64_t table = std::uint64_t{1} << table_log2;
  for (int l = 0; l < levels; ++l) {
    GridLevel lv;
    lv.resolution = resolution(l);
    std::uint64_t dense_rows = 1;
    for (int d = 0; d < dims; ++d) {
      dense_rows *= static_cast<std::uint64_t>(lv.resolution) + 1;
      if (dense_rows > table) break;
    }
    lv.dense = dense_rows <= table;
    lv.rows = static_cast<std::uint32_t>(lv.dense ? dense_rows : table);
    out.push_back(lv);
  }
  return out;
}

std::size_t HashGridConfig::parameter_count() const {
  std::size_t n = 0;
  for (const auto& lv : layout()) n += static_cast<std::size_t>(lv.rows) * static_cast<std::size_t>(features);
  return n;
}

void HashGridConfig::validate() const {
  if (dims != 2 && dims != 3) fail(ErrorCode::kInvalidArgument, "grid dims must be 2 or 3");
  if (levels < 1 || features < 1 || base_resolution < 1) {
    fail(ErrorCode::kInvalidArgument, "grid levels, features and base resolution must be positive");
  }
  if (table_log2 < 3 || table_log2 > 30) {
    fail(ErrorCode::kInvalidArgument, "table_log2 must be in [3, 30]");
  }
  if (!(growth > 1.0) || !std::isfinite(growth)) {
    fail(ErrorCode::kInvalidArgument, "grid growth factor must be > 1");
  }
  if (resolution(levels - 1) > (1u << 24)) {
    fail(ErrorCode::kInvalidArgument, "finest grid resolution too large");
  }
}

std::size_t FieldConfig::layer_in(std::size_t layer) const {
  return layer == 0 ? embedding_width() : static_cast<std::size_t>(hidden_width);
}

std::size_t FieldConfig::layer_out(std::size_t layer) const {
  return layer + 1 == layer_count() ? static_cast<std::size_t>(out_channels)
                                    : static_cast<std::size_t>(hidden_width);
}

std::size_t FieldConfig::max_width() const {
  std::size_t w = embedding_width();
  for (std::size_t k = 0; k < layer_count(); ++k) w = std::max(w, layer_out(k));
  return w;
}

std::size_t FieldConfig::parameter_count() const {
  std::size_t n = grid2d.parameter_count() + grid3d.parameter_count();
  for (std::size_t k = 0; k < layer_count(); ++k) n += layer_out(k) * (layer_in(k) + 1);
  return n;
}

void FieldConfig::validate() const {
  grid2d.validate();
  grid3d.validate();
  if (grid2d.dims != 2) fail(ErrorCode::kInvalidArgument, "grid2d.dims must be 2");
  if (grid3d.dims != 3) fail(ErrorCode::kInvalidArgument, "grid3d.dims must be 3");
  if (!(spatial_scale > 0.0 && spatial_scale <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "spatial_scale must lie in (0, 1]");
  }
  if (hidden_layers < 0) fail(ErrorCode::kInvalidArgument, "hidden_layers must be >= 0");
  if (hidden_layers > 0 && hidden_width < 1) fail(ErrorCode::kInvalidArgument, "hidden_width must be >= 1");
  if (out_channels < 1) fail(ErrorCode::kInvalidArgument, "out_channels must be >= 1");
}

// ---------------------------------------------------------------------------
// Hashing

std::uint32_t spatial_hash(std::span<const std::uint32_t> vertex, std::uint32_t table_size) {
  static constexpr std::uint32_t kPrimes[3] = {1u, 2654435761u, 805459861u};
  std::uint32_t h = 0;
  for (std::size_t d = 0; d < vertex.size(); ++d) h ^= vertex[d] * kPrimes[d];
  return h & (table_size - 1u);
}

std::uint32_t hash_index(std::span<const std::uint32_t> vertex, const GridLevel& level) {
  if (!level.dense) return spatial_hash(vertex, level.rows);
  const std::uint32_t stride = level.resolution + 1;
  std::uint32_t idx = 0;
  for (auto v : vertex) idx = idx * stride + v;
  return idx;
}

// ---------------------------------------------------------------------------
// Parameter containers

template <typename Real, typename Table>
BasicFieldParams<Real, Table> BasicFieldParams<Real, Table>::zeros(const FieldConfig& config) {
  config.validate();
  BasicFieldParams p;
  p.config = config;
  p.levels2d = config.grid2d.layout();
  p.levels3d = config.grid3d.layout();
  for (const auto& lv : p.levels2d) {
    p.table2d.emplace_back(static_cast<std::size_t>(lv.rows) * config.grid2d.features, Table{});
  }
  for (const auto& lv : p.levels3d) {
    p.table3d.emplace_back(static_cast<std::size_t>(lv.rows) * config.grid3d.features, Table{});
  }
  for (std::size_t k = 0; k < config.layer_count(); ++k) {
    p.weights.emplace_back(config.layer_in(k) * config.layer_out(k), Real{});
    p.biases.emplace_back(config.layer_out(k), Real{});
  }
  return p;
}

template <typename Real, typename Table>
std::size_t BasicFieldParams<Real, Table>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : table2d) n += t.size();
  for (const auto& t : table3d) n += t.size();
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

template <typename Real, typename Table>
void BasicFieldParams<Real, Table>::check_shapes() const {
  config.validate();
  const auto l2 = config.grid2d.layout();
  const auto l3 = config.grid3d.layout();
  auto bad = [](const std::string& what) { fail(ErrorCode::kInconsistentParts, what); };
  if (table2d.size() != l2.size() || table3d.size() != l3.size()) bad("grid level count mismatch");
  for (std::size_t l = 0; l < l2.size(); ++l) {
    if (table2d[l].size() != static_cast<std::size_t>(l2[l].rows) * config.grid2d.features) {
      bad("2D table size mismatch at level " + std::to_string(l));
    }
  }
  for (std::size_t l = 0; l < l3.size(); ++l) {
    if (table3d[l].size() != static_cast<std::size_t>(l3[l].rows) * config.grid3d.features) {
      bad("3D table size mismatch at level " + std::to_string(l));
    }
  }
  if (weights.size() != config.layer_count() || biases.size() != config.layer_count()) {
    bad("MLP layer count mismatch");
  }
  for (std::size_t k = 0; k < config.layer_count(); ++k) {
    if (weights[k].size() != config.layer_in(k) * config.layer_out(k)) {
      bad("MLP weight size mismatch at layer " + std::to_string(k));
    }
    if (biases[k].size() != config.layer_out(k)) bad("MLP bias size mismatch at layer " + std::to_string(k));
  }
}

template <typename Real>
BasicFieldParams<Real> init_field(const FieldConfig& config, std::uint64_t seed) {
  auto p = BasicFieldParams<Real>::zeros(config);
  Rng rng(seed);
  for (auto& t : p.table2d) {
    for (auto& v : t) v = static_cast<Real>(rng.uniform(-1e-4, 1e-4));
  }
  for (auto& t : p.table3d) {
    for (auto& v : t) v = static_cast<Real>(rng.uniform(-1e-4, 1e-4));
  }
  for (std::size_t k = 0; k < config.layer_count(); ++k) {
    const double fan_in = static_cast<double>(config.layer_in(k));
    const double fan_out = static_cast<double>(config.layer_out(k));
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& w : p.weights[k]) w = static_cast<Real>(rng.uniform(-bound, bound));
  }
  return p;
}

template <typename To, typename From>
BasicFieldParams<To> convert_params(const BasicFieldParams<From>& p) {
  auto out = BasicFieldParams<To>::zeros(p.config);
  auto copy = [](const auto& src, auto& dst) {
    for (std::size_t k = 0; k < src.size(); ++k) {
      std::transform(src[k].begin(), src[k].end(), dst[k].begin(),
                     [](From v) { return static_cast<To>(v); });
    }
  };
  copy(p.table2d, out.table2d);
  copy(p.table3d, out.table3d);
  copy(p.weights, out.weights);
  copy(p.biases, out.biases);
  return out;
}

CompactFieldParams compact_params(const FieldParams& p) {
  auto out = CompactFieldParams::zeros(p.config);
  for (std::size_t l = 0; l < p.table2d.size(); ++l) {
    std::transform(p.table2d[l].begin(), p.table2d[l].end(), out.table2d[l].begin(), float_to_half);
  }
  for (std::size_t l = 0; l < p.table3d.size(); ++l) {
    std::transform(p.table3d[l].begin(), p.table3d[l].end(), out.table3d[l].begin(), float_to_half);
  }
  out.weights = p.weights;
  out.biases = p.biases;
  return out;
}

FieldParams expand_params(const CompactFieldParams& p) {
  auto out = FieldParams::zeros(p.config);
  for (std::size_t l = 0; l < p.table2d.size(); ++l) {
    std::transform(p.table2d[l].begin(), p.table2d[l].end(), out.table2d[l].begin(), half_to_float);
  }
  for (std::size_t l = 0; l < p.table3d.size(); ++l) {
    std::transform(p.table3d[l].begin(), p.table3d[l].end(), out.table3d[l].begin(), half_to_float);
  }
  out.weights = p.weights;
  out.biases = p.biases;
  return out;
}

template <typename Real>
void zero_gradients(FieldGradients<Real>& g) {
  for_each_tensor(g, [](TensorKind, std::size_t, std::span<Real> t) {
    std::fill(t.begin(), t.end(), Real{0});
  });
}

// ---------------------------------------------------------------------------
// Evaluation kernels

namespace {

inline double clamp01(double v) {
  if (!(v > 0.0)) return 0.0;  // also maps NaN to 0
  return v < 1.0 ? v : 1.0;
}

// Corner rows and interpolation weights for one level. With dlast != nullptr
// also returns d(weight)/d(pos[D-1]).
template <int D, typename Real>
inline void locate(const GridLevel& lv, const double* pos, std::uint32_t* rows, Real* weights,
                   Real* dlast) {
  const double n = static_cast<double>(lv.resolution);
  std::uint32_t cell[D];
  double frac[D];
  for (int d = 0; d < D; ++d) {
    const double p = pos[d] * n;
    auto c = static_cast<std::uint32_t>(p);
    if (c >= lv.resolution) c = lv.resolution - 1;
    cell[d] = c;
    frac[d] = p - static_cast<double>(c);
  }
  for (int corner = 0; corner < (1 << D); ++corner) {
    std::uint32_t v[D];
    double w = 1.0;
    double w_other = 1.0;  // product over all axes but the last
    for (int d = 0; d < D; ++d) {
      const int bit = (corner >> (D - 1 - d)) & 1;
      v[d] = cell[d] + static_cast<std::uint32_t>(bit);
      const double wd = bit ? frac[d] : 1.0 - frac[d];
      w *= wd;
      if (d + 1 < D) w_other *= wd;
    }
    rows[corner] = hash_index(std::span<const std::uint32_t>(v, D), lv);
    weights[corner] = static_cast<Real>(w);
    if (dlast) {
      const int bit = corner & 1;
      dlast[corner] = static_cast<Real>(bit ? w_other * n : -w_other * n);
    }
  }
}

template <int D, typename Real, typename Table>
inline void interpolate(const std::vector<GridLevel>& levels,
                        const std::vector<std::vector<Table>>& tables, int features,
                        const double* pos, Real* out, std::uint32_t* rec_rows, Real* rec_w,
                        Real* dout) {
  constexpr int kCorners = 1 << D;
  std::uint32_t rows[kCorners];
  Real w[kCorners];
  Real dw[kCorners];
  for (std::size_t l = 0; l < levels.size(); ++l) {
    locate<D, Real>(levels[l], pos, rows, w, dout ? dw : nullptr);
    const Table* table = tables[l].data();
    Real* o = out + l * static_cast<std::size_t>(features);
    Real* od = dout ? dout + l * static_cast<std::size_t>(features) : nullptr;
    for (int f = 0; f < features; ++f) {
      Real acc = 0;
      Real dacc = 0;
      for (int c = 0; c < kCorners; ++c) {
        const Real v = static_cast<Real>(load_value(table[static_cast<std::size_t>(rows[c]) * features + f]));
        acc += w[c] * v;
        if (od) dacc += dw[c] * v;
      }
      o[f] = acc;
      if (od) od[f] = dacc;
    }
    if (rec_rows) {
      for (int c = 0; c < kCorners; ++c) {
        rec_rows[l * kCorners + c] = rows[c];
        rec_w[l * kCorners + c] = w[c];
      }
    }
  }
}

template <typename Real>
struct Workspace {
  std::vector<Real> acts;                // concatenated layer activations
  std::vector<std::size_t> act_offset;   // start of each activation vector
  std::vector<std::uint32_t> rows2d, rows3d;
  std::vector<Real> w2d, w3d;
  std::vector<Real> delta, delta_prev, dacts;

  explicit Workspace(const FieldConfig& cfg) {
    std::size_t off = 0;
    act_offset.push_back(0);
    off += cfg.embedding_width();
    for (std::size_t k = 0; k < cfg.layer_count(); ++k) {
      act_offset.push_back(off);
      off += cfg.layer_out(k);
    }
    acts.assign(off, Real{0});
    dacts.assign(off, Real{0});
    rows2d.resize(static_cast<std::size_t>(cfg.grid2d.levels) * 4);
    rows3d.resize(static_cast<std::size_t>(cfg.grid3d.levels) * 8);
    w2d.resize(rows2d.size());
    w3d.resize(rows3d.size());
    delta.resize(cfg.max_width());
    delta_prev.resize(cfg.max_width());
  }

  Real* act(std::size_t k) { return acts.data() + act_offset[k]; }
  Real* dact(std::size_t k) { return dacts.data() + act_offset[k]; }
};

template <typename Real, typename Table>
inline void embed(const BasicFieldParams<Real, Table>& p, const Coord& c, Real* out,
                  std::type_identity_t<Workspace<Real>>* rec, std::type_identity_t<Real>* dout_dt) {
  const double x = clamp01(c[0]);
  const double y = clamp01(c[1]);
  const double t_raw = c[2];
  const double t = clamp01(t_raw);
  const double s = p.config.spatial_scale;
  const double pos2[2] = {x, y};
  const double pos3[3] = {s * x, s * y, t};
  const std::size_t w2 = p.config.grid2d.output_width();

  interpolate<2, Real, Table>(p.levels2d, p.table2d, p.config.grid2d.features, pos2, out,
                              rec ? rec->rows2d.data() : nullptr, rec ? rec->w2d.data() : nullptr,
                              nullptr);
  Real* d3 = nullptr;
  if (dout_dt) {
    std::fill(dout_dt, dout_dt + w2, Real{0});
    d3 = dout_dt + w2;
  }
  interpolate<3, Real, Table>(p.levels3d, p.table3d, p.config.grid3d.features, pos3, out + w2,
                              rec ? rec->rows3d.data() : nullptr, rec ? rec->w3d.data() : nullptr,
                              d3);
  if (d3 && (t_raw < 0.0 || t_raw > 1.0)) {
    // Clamped: the field is constant in t outside the domain.
    std::fill(d3, d3 + p.config.grid3d.output_width(), Real{0});
  }
}

// Runs the MLP on ws.act(0); result lands in ws.act(layer_count).
template <typename Real, typename Table>
inline void run_mlp(const BasicFieldParams<Real, Table>& p, Workspace<Real>& ws) {
  const auto& cfg = p.config;
  const std::size_t layers = cfg.layer_count();
  for (std::size_t k = 0; k < layers; ++k) {
    const std::size_t in = cfg.layer_in(k);
    const std::size_t out = cfg.layer_out(k);
    const Real* x = ws.act(k);
    Real* z = ws.act(k + 1);
    const Real* w = p.weights[k].data();
    const Real* b = p.biases[k].data();
    for (std::size_t o = 0; o < out; ++o) z[o] = b[o];
    for (std::size_t i = 0; i < in; ++i) {
      const Real xi = x[i];
      if (xi == Real{0}) continue;
      const Real* wr = w + i * out;
      for (std::size_t o = 0; o < out; ++o) z[o] += wr[o] * xi;
    }
    if (k + 1 < layers) {
      for (std::size_t o = 0; o < out; ++o) z[o] = z[o] > Real{0} ? z[o] : Real{0};
    }
  }
}

template <typename Real, typename Table>
inline void eval_one(const BasicFieldParams<Real, Table>& p, const Coord& c, Workspace<Real>& ws,
                     Real* out, bool record) {
  embed(p, c, ws.act(0), record ? &ws : nullptr, nullptr);
  run_mlp(p, ws);
  const Real* y = ws.act(p.config.layer_count());
  std::copy(y, y + p.config.out_channels, out);
}

// Backpropagates ws.delta (dL/dv_hat) through the sample recorded in ws.
template <typename Real>
inline void backprop_one(const BasicFieldParams<Real>& p, Workspace<Real>& ws,
                         FieldGradients<Real>& g) {
  const auto& cfg = p.config;
  const std::size_t layers = cfg.layer_count();
  Real* delta = ws.delta.data();
  Real* prev = ws.delta_prev.data();
  for (std::size_t k = layers; k-- > 0;) {
    const std::size_t in = cfg.layer_in(k);
    const std::size_t out = cfg.layer_out(k);
    const Real* x = ws.act(k);
    const Real* w = p.weights[k].data();
    Real* gw = g.weights[k].data();
    Real* gb = g.biases[k].data();
    for (std::size_t o = 0; o < out; ++o) gb[o] += delta[o];
    for (std::size_t i = 0; i < in; ++i) {
      const Real xi = x[i];
      if (xi != Real{0}) {
        Real* gr = gw + i * out;
        for (std::size_t o = 0; o < out; ++o) gr[o] += xi * delta[o];
      }
      // Hidden inputs are ReLU outputs: zero means inactive, no gradient.
      if (k > 0 && !(xi > Real{0})) {
        prev[i] = 0;
        continue;
      }
      const Real* wr = w + i * out;
      Real acc = 0;
      for (std::size_t o = 0; o < out; ++o) acc += wr[o] * delta[o];
      prev[i] = acc;
    }
    std::swap(delta, prev);
  }
  // delta now holds dL/d(embedding).
  const int f2 = cfg.grid2d.features;
  for (std::size_t l = 0; l < p.levels2d.size(); ++l) {
    Real* table = g.table2d[l].data();
    const Real* d = delta + l * f2;
    for (int c = 0; c < 4; ++c) {
      const std::uint32_t row = ws.rows2d[l * 4 + c];
      const Real w = ws.w2d[l * 4 + c];
      for (int f = 0; f < f2; ++f) table[static_cast<std::size_t>(row) * f2 + f] += w * d[f];
    }
  }
  const int f3 = cfg.grid3d.features;
  const Real* d3 = delta + cfg.grid2d.output_width();
  for (std::size_t l = 0; l < p.levels3d.size(); ++l) {
    Real* table = g.table3d[l].data();
    const Real* d = d3 + l * f3;
    for (int c = 0; c < 8; ++c) {
      const std::uint32_t row = ws.rows3d[l * 8 + c];
      const Real w = ws.w3d[l * 8 + c];
      for (int f = 0; f < f3; ++f) table[static_cast<std::size_t>(row) * f3 + f] += w * d[f];
    }
  }
}

}  // namespace

template <typename Real, typename Table>
void encode2d(const BasicFieldParams<Real, Table>& p, double x, double y, std::span<Real> out) {
  const double pos[2] = {clamp01(x), clamp01(y)};
  interpolate<2, Real, Table>(p.levels2d, p.table2d, p.config.grid2d.features, pos, out.data(),
                              nullptr, nullptr, nullptr);
}

template <typename Real, typename Table>
void encode3d(const BasicFieldParams<Real, Table>& p, double x, double y, double t,
              std::span<Real> out) {
  const double s = p.config.spatial_scale;
  const double pos[3] = {s * clamp01(x), s * clamp01(y), clamp01(t)};
  interpolate<3, Real, Table>(p.levels3d, p.table3d, p.config.grid3d.features, pos, out.data(),
                              nullptr, nullptr, nullptr);
}

template <typename Real, typename Table>
void encode(const BasicFieldParams<Real, Table>& p, const Coord& c, std::span<Real> out) {
  embed(p, c, out.data(), nullptr, nullptr);
}

template <typename Real, typename Table>
void decode(const BasicFieldParams<Real, Table>& p, std::span<const Real> embedding,
            std::span<Real> out) {
  Workspace<Real> ws(p.config);
  std::copy(embedding.begin(), embedding.end(), ws.act(0));
  run_mlp(p, ws);
  const Real* y = ws.act(p.config.layer_count());
  std::copy(y, y + p.config.out_channels, out.begin());
}

template <typename Real, typename Table>
void forward(const BasicFieldParams<Real, Table>& p, std::span<const Coord> coords,
             std::span<Real> out) {
  Workspace<Real> ws(p.config);
  const std::size_t channels = static_cast<std::size_t>(p.config.out_channels);
  for (std::size_t k = 0; k < coords.size(); ++k) {
    eval_one(p, coords[k], ws, out.data() + k * channels, false);
  }
}

template <typename Real, typename Table>
std::vector<Real> forward(const BasicFieldParams<Real, Table>& p, std::span<const Coord> coords) {
  std::vector<Real> out(coords.size() * static_cast<std::size_t>(p.config.out_channels));
  forward(p, coords, std::span<Real>(out));
  return out;
}

template <typename Real>
void backward_fused(const BasicFieldParams<Real>& p, std::span<const Coord> coords,
                    const UpstreamFn<Real>& upstream_fn, FieldGradients<Real>& grads) {
  Workspace<Real> ws(p.config);
  const std::size_t channels = static_cast<std::size_t>(p.config.out_channels);
  std::vector<Real> pred(channels);
  for (std::size_t k = 0; k < coords.size(); ++k) {
    eval_one(p, coords[k], ws, pred.data(), true);
    upstream_fn(k, std::span<const Real>(pred), std::span<Real>(ws.delta.data(), channels));
    backprop_one(p, ws, grads);
  }
}

template <typename Real>
void backward(const BasicFieldParams<Real>& p, std::span<const Coord> coords,
              std::span<const Real> upstream, FieldGradients<Real>& grads) {
  const std::size_t channels = static_cast<std::size_t>(p.config.out_channels);
  backward_fused<Real>(
      p, coords,
      [&](std::size_t k, std::span<const Real>, std::span<Real> up) {
        std::copy_n(upstream.begin() + static_cast<std::ptrdiff_t>(k * channels), channels, up.begin());
      },
      grads);
}

template <typename Real, typename Table>
void time_partial(const BasicFieldParams<Real, Table>& p, std::span<const Coord> coords,
                  std::span<Real> out) {
  Workspace<Real> ws(p.config);
  const auto& cfg = p.config;
  const std::size_t layers = cfg.layer_count();
  const std::size_t channels = static_cast<std::size_t>(cfg.out_channels);
  for (std::size_t s = 0; s < coords.size(); ++s) {
    embed(p, coords[s], ws.act(0), nullptr, ws.dact(0));
    run_mlp(p, ws);
    for (std::size_t k = 0; k < layers; ++k) {
      const std::size_t in = cfg.layer_in(k);
      const std::size_t n_out = cfg.layer_out(k);
      const Real* dx = ws.dact(k);
      Real* dz = ws.dact(k + 1);
      const Real* w = p.weights[k].data();
      for (std::size_t o = 0; o < n_out; ++o) dz[o] = 0;
      for (std::size_t i = 0; i < in; ++i) {
        const Real di = dx[i];
        if (di == Real{0}) continue;
        const Real* wr = w + i * n_out;
        for (std::size_t o = 0; o < n_out; ++o) dz[o] += wr[o] * di;
      }
      if (k + 1 < layers) {
        const Real* h = ws.act(k + 1);
        for (std::size_t o = 0; o < n_out; ++o) {
          if (!(h[o] > Real{0})) dz[o] = 0;
        }
      }
    }
    const Real* d = ws.dact(layers);
    std::copy(d, d + channels, out.data() + s * channels);
  }
}

bool on_temporal_boundary(const FieldConfig& config, double t) {
  if (t <= 0.0 || t >= 1.0) return false;
  for (const auto& lv : config.grid3d.layout()) {
    const double p = t * static_cast<double>(lv.resolution);
    if (p == std::floor(p)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Explicit instantiations

#define GNDC_INSTANTIATE_EVAL(R, T)                                                            \
  template struct BasicFieldParams<R, T>;                                                      \
  template void encode2d<R, T>(const BasicFieldParams<R, T>&, double, double, std::span<R>);   \
  template void encode3d<R, T>(const BasicFieldParams<R, T>&, double, double, double,          \
                               std::span<R>);                                                  \
  template void encode<R, T>(const BasicFieldParams<R, T>&, const Coord&, std::span<R>);       \
  template void decode<R, T>(const BasicFieldParams<R, T>&, std::span<const R>, std::span<R>); \
  template void forward<R, T>(const BasicFieldParams<R, T>&, std::span<const Coord>,           \
                              std::span<R>);                                                   \
  template std::vector<R> forward<R, T>(const BasicFieldParams<R, T>&, std::span<const Coord>); \
  template void time_partial<R, T>(const BasicFieldParams<R, T>&, std::span<const Coord>,      \
                                   std::span<R>);

GNDC_INSTANTIATE_EVAL(float, float)
GNDC_INSTANTIATE_EVAL(double, double)
GNDC_INSTANTIATE_EVAL(float, Half)

#define GNDC_INSTANTIATE_TRAIN(R)                                                              \
  template BasicFieldParams<R> init_field<R>(const FieldConfig&, std::uint64_t);               \
  template void zero_gradients<R>(FieldGradients<R>&);                                         \
  template void backward<R>(const BasicFieldParams<R>&, std::span<const Coord>,                \
                            std::span<const R>, FieldGradients<R>&);                           \
  template void backward_fused<R>(const BasicFieldParams<R>&, std::span<const Coord>,          \
                                  const UpstreamFn<R>&, FieldGradients<R>&);

GNDC_INSTANTIATE_TRAIN(float)
GNDC_INSTANTIATE_TRAIN(double)

template BasicFieldParams<double> convert_params<double, float>(const BasicFieldParams<float>&);
template BasicFieldParams<float> convert_params<float, double>(const BasicFieldParams<double>&);

}  // namespace gndc
