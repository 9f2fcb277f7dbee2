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

#include "gndc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "gndc/bytes.hpp"
#include "gndc/codec.hpp"
#include "gndc/error.hpp"
#include "gndc/rng.hpp"

namespace gndc {

namespace {

Metrics compute_metrics(std::span<const double> pred, std::span<const double> truth, bool throw_on_flat) {
  if (pred.size() != truth.size()) fail(ErrorCode::kLengthMismatch, "prediction and truth lengths differ");
  Metrics m;
  m.count = truth.size();
  if (truth.empty()) {
    if (throw_on_flat) fail(ErrorCode::kZeroVariance, "R^2 undefined for empty input");
    m.r2 = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  const double n = static_cast<double>(truth.size());
  const double mean = std::accumulate(truth.begin(), truth.end(), 0.0) / n;
  double ss_res = 0.0, ss_tot = 0.0, abs_sum = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const double e = pred[k] - truth[k];
    ss_res += e * e;
    abs_sum += std::abs(e);
    const double d = truth[k] - mean;
    ss_tot += d * d;
  }
  m.rmse = std::sqrt(ss_res / n);
  m.mae = abs_sum / n;
  if (truth.size() < 2 || !(ss_tot > 0.0)) {
    if (throw_on_flat) fail(ErrorCode::kZeroVariance, "R^2 undefined: truth has zero variance");
    m.r2 = std::numeric_limits<double>::quiet_NaN();
  } else {
    m.r2 = 1.0 - ss_res / ss_tot;
  }
  return m;
}

Metrics band_mean(const std::vector<Metrics>& per_band) {
  Metrics m;
  if (per_band.empty()) return m;
  for (const auto& b : per_band) {
    m.r2 += b.r2;
    m.rmse += b.rmse;
    m.mae += b.mae;
    m.count += b.count;
  }
  const double n = static_cast<double>(per_band.size());
  m.r2 /= n;
  m.rmse /= n;
  m.mae /= n;
  return m;
}

}  // namespace

Metrics r2_rmse_mae(std::span<const double> pred, std::span<const double> truth) {
  return compute_metrics(pred, truth, true);
}

Metrics error_metrics(std::span<const double> pred, std::span<const double> truth) {
  return compute_metrics(pred, truth, false);
}

// ---------------------------------------------------------------------------
// Gaps

std::size_t GapRecord::gap_pixels() const {
  return static_cast<std::size_t>(std::count_if(tier_of_pixel.begin(), tier_of_pixel.end(), [](int t) { return t >= 0; }));
}

bool inside_gap(const Gap& g, std::size_t i, std::size_t j) {
  const double di = static_cast<double>(i) + 0.5 - g.ci;
  const double dj = static_cast<double>(j) + 0.5 - g.cj;
  const double r = 0.5 * g.diameter;
  return di * di + dj * dj <= r * r;
}

CubeBundle simulate_gaps(const CubeBundle& bundle, std::size_t target, const GapSpec& spec, GapRecord* record) {
  const auto& m = bundle.meta;
  if (target >= m.frames()) fail(ErrorCode::kIndexOutOfRange, "target frame out of range");
  const double H = static_cast<double>(m.height);
  const double W = static_cast<double>(m.width);
  Rng rng(spec.seed);
  GapRecord rec;
  rec.frame = target;
  for (std::size_t k = 0; k < spec.tiers.size(); ++k) {
    const auto& tier = spec.tiers[k];
    if (!(tier.min_diameter > 0.0) || tier.max_diameter < tier.min_diameter) {
      fail(ErrorCode::kInvalidArgument, "gap diameters must be positive and ordered");
    }
    if (tier.count > 0 && tier.max_diameter > std::min(H, W)) {
      fail(ErrorCode::kFrameTooSmall, "gap diameter exceeds the frame size");
    }
    for (std::size_t n = 0; n < tier.count; ++n) {
      Gap g;
      g.tier = k;
      g.diameter = rng.uniform(tier.min_diameter, tier.max_diameter);
      const double r = 0.5 * g.diameter;
      g.ci = rng.uniform(r, H - r);
      g.cj = rng.uniform(r, W - r);
      rec.gaps.push_back(g);
    }
  }

  CubeBundle out = bundle;
  rec.tier_of_pixel.assign(m.pixels(), -1);
  rec.original.resize(m.pixels() * m.channels());
  rec.original_mask.resize(m.pixels());
  for (std::size_t i = 0; i < m.height; ++i) {
    for (std::size_t j = 0; j < m.width; ++j) {
      const std::size_t p = i * m.width + j;
      rec.original_mask[p] = bundle.mask[bundle.voxel_index(i, j, target)];
      for (std::size_t c = 0; c < m.channels(); ++c) rec.original[p * m.channels() + c] = bundle.value(i, j, target, c);
      int tier = -1;
      double widest = -1.0;
      for (const auto& g : rec.gaps) {
        if (inside_gap(g, i, j) && g.diameter > widest) {
          widest = g.diameter;
          tier = static_cast<int>(g.tier);
        }
      }
      if (tier >= 0) {
        rec.tier_of_pixel[p] = tier;
        out.mask[out.voxel_index(i, j, target)] = 0;
      }
    }
  }
  if (record) *record = std::move(rec);
  return out;
}

std::vector<double> linear_interp_reconstruct(const CubeBundle& bundle, std::size_t i, std::size_t j,
                                              std::size_t t) {
  const auto& m = bundle.meta;
  if (i >= m.height || j >= m.width || t >= m.frames()) fail(ErrorCode::kIndexOutOfRange, "voxel out of range");
  const std::size_t C = m.channels();
  std::vector<double> out(C);
  if (bundle.valid(i, j, t)) {
    for (std::size_t c = 0; c < C; ++c) out[c] = bundle.value(i, j, t, c);
    return out;
  }
  std::ptrdiff_t before = -1, after = -1;
  for (std::ptrdiff_t k = static_cast<std::ptrdiff_t>(t) - 1; k >= 0; --k) {
    if (bundle.valid(i, j, static_cast<std::size_t>(k))) {
      before = k;
      break;
    }
  }
  for (std::size_t k = t + 1; k < m.frames(); ++k) {
    if (bundle.valid(i, j, k)) {
      after = static_cast<std::ptrdiff_t>(k);
      break;
    }
  }
  if (before < 0 && after < 0) fail(ErrorCode::kNoValidFrames, "pixel has no valid frame");
  for (std::size_t c = 0; c < C; ++c) {
    if (before < 0) {
      out[c] = bundle.value(i, j, static_cast<std::size_t>(after), c);
    } else if (after < 0) {
      out[c] = bundle.value(i, j, static_cast<std::size_t>(before), c);
    } else {
      const auto tb = static_cast<double>(m.timestamps[static_cast<std::size_t>(before)]);
      const auto ta = static_cast<double>(m.timestamps[static_cast<std::size_t>(after)]);
      const double w = (static_cast<double>(m.timestamps[t]) - tb) / (ta - tb);
      const double vb = bundle.value(i, j, static_cast<std::size_t>(before), c);
      const double va = bundle.value(i, j, static_cast<std::size_t>(after), c);
      out[c] = vb + w * (va - vb);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Per-frame sinusoidal coordinate network

std::size_t SirenConfig::parameter_count(std::size_t channels) const {
  const auto w = static_cast<std::size_t>(hidden_width);
  const auto l = static_cast<std::size_t>(hidden_layers);
  if (l == 0) return 2 * channels + channels;
  return 2 * w + w + (l - 1) * (w * w + w) + w * channels + channels;
}

SirenConfig SirenConfig::for_budget(std::size_t budget, std::size_t channels, int hidden_layers) {
  SirenConfig cfg;
  cfg.hidden_layers = hidden_layers;
  cfg.hidden_width = 1;
  while (true) {
    SirenConfig next = cfg;
    next.hidden_width = cfg.hidden_width + 1;
    if (next.parameter_count(channels) > budget) break;
    cfg = next;
  }
  return cfg;
}

std::size_t SirenModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) n += weights[k].size() + biases[k].size();
  return n;
}

namespace {

struct SirenShape {
  std::vector<std::size_t> widths;  // input, hidden..., output
};

SirenShape siren_shape(const SirenConfig& cfg, std::size_t channels) {
  SirenShape s;
  s.widths.push_back(2);
  for (int l = 0; l < cfg.hidden_layers; ++l) s.widths.push_back(static_cast<std::size_t>(cfg.hidden_width));
  s.widths.push_back(channels);
  return s;
}

// Activations per layer for one sample; acts[0] is the input.
void siren_forward(const SirenModel& m, const SirenShape& s, double x, double y,
                   std::vector<std::vector<double>>& acts, std::vector<std::vector<double>>& pre) {
  const double w0 = m.config.omega0;
  acts[0][0] = 2.0 * x - 1.0;
  acts[0][1] = 2.0 * y - 1.0;
  const std::size_t layers = m.weights.size();
  for (std::size_t k = 0; k < layers; ++k) {
    const std::size_t in = s.widths[k], out = s.widths[k + 1];
    auto& z = pre[k];
    std::copy(m.biases[k].begin(), m.biases[k].end(), z.begin());
    for (std::size_t i = 0; i < in; ++i) {
      const double xi = acts[k][i];
      const double* wr = m.weights[k].data() + i * out;
      for (std::size_t o = 0; o < out; ++o) z[o] += wr[o] * xi;
    }
    auto& h = acts[k + 1];
    if (k + 1 < layers) {
      for (std::size_t o = 0; o < out; ++o) h[o] = std::sin(w0 * z[o]);
    } else {
      std::copy(z.begin(), z.end(), h.begin());
    }
  }
}

}  // namespace

void SirenModel::forward(double x, double y, std::span<double> out) const {
  const auto s = siren_shape(config, channels);
  std::vector<std::vector<double>> acts, pre;
  for (auto w : s.widths) acts.emplace_back(w, 0.0);
  for (std::size_t k = 1; k < s.widths.size(); ++k) pre.emplace_back(s.widths[k], 0.0);
  siren_forward(*this, s, x, y, acts, pre);
  std::copy(acts.back().begin(), acts.back().end(), out.begin());
}

PerFrameFit perframe_inr_baseline(std::span<const float> frame, std::size_t height, std::size_t width,
                                  std::size_t channels, const SirenConfig& cfg) {
  if (frame.size() != height * width * channels) fail(ErrorCode::kShapeMismatch, "frame size mismatch");
  if (cfg.hidden_layers < 1 || cfg.hidden_width < 1) fail(ErrorCode::kInvalidArgument, "SIREN needs a hidden layer");
  const std::size_t pixels = height * width;

  std::vector<double> lo(channels, std::numeric_limits<double>::infinity());
  std::vector<double> hi(channels, -std::numeric_limits<double>::infinity());
  for (std::size_t p = 0; p < pixels; ++p) {
    for (std::size_t c = 0; c < channels; ++c) {
      lo[c] = std::min(lo[c], static_cast<double>(frame[p * channels + c]));
      hi[c] = std::max(hi[c], static_cast<double>(frame[p * channels + c]));
    }
  }
  for (std::size_t c = 0; c < channels; ++c) {
    if (!(hi[c] > lo[c])) hi[c] = lo[c] + 1.0;
  }
  std::vector<double> target(frame.size());
  for (std::size_t k = 0; k < frame.size(); ++k) {
    const std::size_t c = k % channels;
    target[k] = (static_cast<double>(frame[k]) - lo[c]) / (hi[c] - lo[c]);
  }

  SirenModel m;
  m.config = cfg;
  m.channels = channels;
  const auto s = siren_shape(cfg, channels);
  const std::size_t layers = s.widths.size() - 1;
  Rng rng(cfg.seed);
  for (std::size_t k = 0; k < layers; ++k) {
    const std::size_t in = s.widths[k], out = s.widths[k + 1];
    const double bound = k == 0 ? 1.0 / static_cast<double>(in) : std::sqrt(6.0 / static_cast<double>(in)) / cfg.omega0;
    std::vector<double> w(in * out);
    for (auto& v : w) v = rng.uniform(-bound, bound);
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(out, 0.0);
  }

  std::vector<std::vector<double>> acts, pre, delta;
  for (auto w : s.widths) {
    acts.emplace_back(w, 0.0);
    delta.emplace_back(w, 0.0);
  }
  for (std::size_t k = 1; k < s.widths.size(); ++k) pre.emplace_back(s.widths[k], 0.0);
  auto gw = m.weights, gb = m.biases;
  auto mw = m.weights, vw = m.weights, mb = m.biases, vb = m.biases;
  for (auto* set : {&mw, &vw}) for (auto& t : *set) std::fill(t.begin(), t.end(), 0.0);
  for (auto* set : {&mb, &vb}) for (auto& t : *set) std::fill(t.begin(), t.end(), 0.0);

  const std::size_t batch = cfg.batch_size == 0 ? pixels : std::min(cfg.batch_size, pixels);
  auto coord = [&](std::size_t p, double& x, double& y) {
    x = (static_cast<double>(p % width) + 0.5) / static_cast<double>(width);
    y = (static_cast<double>(p / width) + 0.5) / static_cast<double>(height);
  };
  const double w0 = cfg.omega0;
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    for (auto& t : gw) std::fill(t.begin(), t.end(), 0.0);
    for (auto& t : gb) std::fill(t.begin(), t.end(), 0.0);
    for (std::size_t n = 0; n < batch; ++n) {
      const std::size_t p = batch == pixels ? n : static_cast<std::size_t>(rng.below(pixels));
      double x, y;
      coord(p, x, y);
      siren_forward(m, s, x, y, acts, pre);
      for (std::size_t c = 0; c < channels; ++c) {
        delta[layers][c] = 2.0 * (acts[layers][c] - target[p * channels + c]) / static_cast<double>(batch);
      }
      for (std::size_t k = layers; k-- > 0;) {
        const std::size_t in = s.widths[k], out = s.widths[k + 1];
        auto& dz = delta[k + 1];
        if (k + 1 < layers) {
          for (std::size_t o = 0; o < out; ++o) dz[o] *= w0 * std::cos(w0 * pre[k][o]);
        }
        for (std::size_t o = 0; o < out; ++o) gb[k][o] += dz[o];
        for (std::size_t i = 0; i < in; ++i) {
          const double xi = acts[k][i];
          double* g = gw[k].data() + i * out;
          const double* wr = m.weights[k].data() + i * out;
          double acc = 0.0;
          for (std::size_t o = 0; o < out; ++o) {
            g[o] += dz[o] * xi;
            acc += wr[o] * dz[o];
          }
          delta[k][i] = acc;
        }
      }
    }
    const double t = static_cast<double>(step + 1);
    const double c1 = 1.0 - std::pow(b1, t), c2 = 1.0 - std::pow(b2, t);
    auto update = [&](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& mm,
                      std::vector<double>& vv) {
      for (std::size_t k = 0; k < p.size(); ++k) {
        mm[k] = b1 * mm[k] + (1 - b1) * g[k];
        vv[k] = b2 * vv[k] + (1 - b2) * g[k] * g[k];
        p[k] -= cfg.learning_rate * (mm[k] / c1) / (std::sqrt(vv[k] / c2) + eps);
      }
    };
    for (std::size_t k = 0; k < layers; ++k) {
      update(m.weights[k], gw[k], mw[k], vw[k]);
      update(m.biases[k], gb[k], mb[k], vb[k]);
    }
  }

  PerFrameFit fit;
  fit.predicted.resize(frame.size());
  for (std::size_t p = 0; p < pixels; ++p) {
    double x, y;
    coord(p, x, y);
    siren_forward(m, s, x, y, acts, pre);
    for (std::size_t c = 0; c < channels; ++c) {
      fit.predicted[p * channels + c] = lo[c] + acts[layers][c] * (hi[c] - lo[c]);
    }
  }
  std::vector<double> truth(frame.begin(), frame.end());
  fit.metrics = error_metrics(fit.predicted, truth);
  fit.model = std::move(m);
  return fit;
}

// ---------------------------------------------------------------------------
// Int16 + lossless coding

Int16Baseline int16_lossless_baseline(const CubeBundle& bundle) {
  const auto& m = bundle.meta;
  const std::size_t C = m.channels();
  std::vector<double> lo(C, std::numeric_limits<double>::infinity());
  std::vector<double> hi(C, -std::numeric_limits<double>::infinity());
  for (std::size_t v = 0; v < m.voxels(); ++v) {
    if (!bundle.mask[v]) continue;
    for (std::size_t c = 0; c < C; ++c) {
      lo[c] = std::min(lo[c], static_cast<double>(bundle.values[v * C + c]));
      hi[c] = std::max(hi[c], static_cast<double>(bundle.values[v * C + c]));
    }
  }
  Int16Baseline out;
  out.max_error_per_band.assign(C, 0.0);
  out.step_per_band.assign(C, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    if (!(hi[c] >= lo[c])) lo[c] = hi[c] = 0.0;
    out.step_per_band[c] = (hi[c] - lo[c]) / 65535.0;
  }
  ByteWriter header;
  for (std::size_t c = 0; c < C; ++c) {
    header.f64(lo[c]);
    header.f64(hi[c]);
  }
  std::vector<std::uint8_t> raw(m.samples() * 2, 0);
  for (std::size_t v = 0; v < m.voxels(); ++v) {
    if (!bundle.mask[v]) continue;
    for (std::size_t c = 0; c < C; ++c) {
      const double x = bundle.values[v * C + c];
      const double step = out.step_per_band[c];
      const auto q = step > 0.0 ? static_cast<std::uint16_t>(std::clamp(std::llround((x - lo[c]) / step), 0LL, 65535LL))
                                : std::uint16_t{0};
      raw[2 * (v * C + c)] = static_cast<std::uint8_t>(q);
      raw[2 * (v * C + c) + 1] = static_cast<std::uint8_t>(q >> 8);
      const double back = lo[c] + static_cast<double>(q) * step;
      out.max_error_per_band[c] = std::max(out.max_error_per_band[c], std::abs(back - x));
    }
  }
  const auto stream = compress_bytes(raw, m.samples());
  out.bytes = header.size() + stream.size();
  for (double e : out.max_error_per_band) out.max_abs_error = std::max(out.max_abs_error, e);
  return out;
}

// ---------------------------------------------------------------------------
// Mask-and-restore

const MetricsRow* MaskRestoreReport::row(const std::string& label) const {
  for (const auto& r : rows) {
    if (r.label == label) return &r;
  }
  return nullptr;
}

MaskRestoreReport mask_and_restore(const CubeBundle& bundle, std::size_t target, const FieldConfig& field_cfg,
                                   const TrainConfig& train_cfg, const GapSpec& spec) {
  MaskRestoreReport report;
  const CubeBundle masked = simulate_gaps(bundle, target, spec, &report.record);
  const auto trained = train(masked, field_cfg, train_cfg);
  report.train = trained.report;

  const auto& m = bundle.meta;
  const std::size_t H = m.height, W = m.width, C = m.channels();
  const double tn = frame_time(trained.norm, m, target);
  std::vector<Coord> coords(H * W);
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t j = 0; j < W; ++j) {
      coords[i * W + j] = {trained.norm.pixel_to_x(static_cast<double>(j)),
                           trained.norm.pixel_to_y(static_cast<double>(i)), tn};
    }
  }
  const auto pred = forward(trained.params, std::span<const Coord>(coords));

  const auto& rec = report.record;
  auto build_row = [&](const std::string& label, auto&& member) {
    MetricsRow row;
    row.label = label;
    std::vector<std::vector<double>> np(C), lp(C), tr(C);
    for (std::size_t i = 0; i < H; ++i) {
      for (std::size_t j = 0; j < W; ++j) {
        const std::size_t p = i * W + j;
        if (!rec.original_mask[p] || !member(rec.tier_of_pixel[p])) continue;
        ++row.pixels;
        const auto lin = linear_interp_reconstruct(masked, i, j, target);
        for (std::size_t c = 0; c < C; ++c) {
          np[c].push_back(trained.norm.denormalize_value(c, static_cast<double>(pred[p * C + c])));
          lp[c].push_back(lin[c]);
          tr[c].push_back(rec.original[p * C + c]);
        }
      }
    }
    for (std::size_t c = 0; c < C; ++c) {
      row.neural_per_band.push_back(error_metrics(np[c], tr[c]));
      row.linear_per_band.push_back(error_metrics(lp[c], tr[c]));
    }
    row.neural = band_mean(row.neural_per_band);
    row.linear = band_mean(row.linear_per_band);
    return row;
  };
  for (std::size_t k = 0; k < spec.tiers.size(); ++k) {
    const std::string label = spec.tiers[k].label.empty() ? "tier" + std::to_string(k) : spec.tiers[k].label;
    report.rows.push_back(build_row(label, [k](int t) { return t == static_cast<int>(k); }));
  }
  report.rows.push_back(build_row("all_gaps", [](int t) { return t >= 0; }));
  report.rows.push_back(build_row("outside", [](int t) { return t < 0; }));
  return report;
}

std::string mask_restore_csv(const MaskRestoreReport& r) {
  std::ostringstream o;
  o.precision(8);
  o << "region,pixels,neural_r2,neural_rmse,neural_mae,linear_r2,linear_rmse,linear_mae\n";
  for (const auto& row : r.rows) {
    o << row.label << "," << row.pixels << "," << row.neural.r2 << "," << row.neural.rmse << "," << row.neural.mae
      << "," << row.linear.r2 << "," << row.linear.rmse << "," << row.linear.mae << "\n";
  }
  return o.str();
}

std::string mask_restore_table(const MaskRestoreReport& r) {
  std::ostringstream o;
  o << std::left << std::setw(10) << "region" << std::right << std::setw(8) << "pixels" << std::setw(12) << "neural R2"
    << std::setw(13) << "neural RMSE" << std::setw(12) << "linear R2" << std::setw(13) << "linear RMSE" << "\n";
  o << std::fixed << std::setprecision(4);
  for (const auto& row : r.rows) {
    o << std::left << std::setw(10) << row.label << std::right << std::setw(8) << row.pixels << std::setw(12)
      << row.neural.r2 << std::setw(13) << row.neural.rmse << std::setw(12) << row.linear.r2 << std::setw(13)
      << row.linear.rmse << "\n";
  }
  return o.str();
}

}  // namespace gndc
