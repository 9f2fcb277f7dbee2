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

#include "gndc/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gndc/error.hpp"
#include "json_io.hpp"

namespace gndc {

using nlohmann::json;

FidelityReport evaluate_model(const LoadedCube& cube, const CubeBundle& reference) {
  const auto& meta = cube.meta();
  const auto& ref = reference.meta;
  if (ref.height != meta.height || ref.width != meta.width || ref.channels() != meta.channels() ||
      ref.timestamps != meta.timestamps) {
    fail(ErrorCode::kShapeMismatch, "reference bundle does not match the model grid");
  }
  const std::size_t C = meta.channels(), H = meta.height, W = meta.width, T = meta.frames();
  const auto& norm = cube.norm();
  std::vector<std::vector<double>> truth(C), field(C), corrected(C);
  std::vector<double> tn, fn, cn;
  const PixelWindow all{0, H, 0, W};
  std::vector<Coord> coords(H * W);
  std::vector<float> raw(H * W * C);
  for (std::size_t t = 0; t < T; ++t) {
    const double tt = frame_time(norm, meta, t);
    for (std::size_t i = 0; i < H; ++i) {
      for (std::size_t j = 0; j < W; ++j) coords[i * W + j] = {norm.pixel_to_x(double(j)), norm.pixel_to_y(double(i)), tt};
    }
    cube.evaluate(coords, raw);
    const auto fixed = cube.query_region_frame(all, t);
    for (std::size_t p = 0; p < H * W; ++p) {
      if (!reference.valid(p / W, p % W, t)) continue;
      for (std::size_t c = 0; c < C; ++c) {
        const double v = reference.value(p / W, p % W, t, c);
        const double f = cube.physical(c, double(raw[p * C + c]));
        const double k = fixed.values[p * C + c];
        truth[c].push_back(v);
        field[c].push_back(f);
        corrected[c].push_back(k);
        tn.push_back(norm.normalize_value(c, v));
        fn.push_back(double(raw[p * C + c]));
        cn.push_back(norm.normalize_value(c, k));
      }
    }
  }
  if (tn.empty()) fail(ErrorCode::kAllInvalidMask, "reference bundle has no valid voxels");

  FidelityReport r;
  for (std::size_t c = 0; c < C; ++c) {
    BandFidelity b;
    b.band = meta.band_names[c];
    b.field = error_metrics(field[c], truth[c]);
    b.corrected = error_metrics(corrected[c], truth[c]);
    for (std::size_t k = 0; k < truth[c].size(); ++k) {
      r.max_abs_error_corrected = std::max(r.max_abs_error_corrected, std::abs(corrected[c][k] - truth[c][k]));
    }
    r.bands.push_back(std::move(b));
  }
  r.field_normalized = error_metrics(fn, tn);
  r.corrected_normalized = error_metrics(cn, tn);
  return r;
}

namespace {

json metrics_json(const Metrics& m) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"r2", num(m.r2)}, {"rmse", num(m.rmse)}, {"mae", num(m.mae)}, {"count", m.count}};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(5);
  if (std::isfinite(v)) {
    os << v;
  } else {
    os << "n/a";
  }
  return os.str();
}

}  // namespace

std::string fidelity_json(const FidelityReport& r) {
  json j;
  json bands = json::array();
  for (const auto& b : r.bands) {
    bands.push_back({{"band", b.band}, {"field", metrics_json(b.field)}, {"corrected", metrics_json(b.corrected)}});
  }
  j["bands"] = bands;
  j["field_normalized"] = metrics_json(r.field_normalized);
  j["corrected_normalized"] = metrics_json(r.corrected_normalized);
  j["max_abs_error_corrected"] = r.max_abs_error_corrected;
  return j.dump();
}

std::string fidelity_table(const FidelityReport& r) {
  std::ostringstream os;
  os << "band            field_r2    field_rmse  corr_r2     corr_rmse\n";
  auto line = [&](const std::string& name, const Metrics& f, const Metrics& c) {
    os << name;
    for (std::size_t k = name.size(); k < 16; ++k) os << ' ';
    for (double v : {f.r2, f.rmse, c.r2, c.rmse}) {
      const auto s = fmt(v);
      os << s;
      for (std::size_t k = s.size(); k < 12; ++k) os << ' ';
    }
    os << '\n';
  };
  for (const auto& b : r.bands) line(b.band, b.field, b.corrected);
  line("(normalized)", r.field_normalized, r.corrected_normalized);
  os << "max |error| after correction: " << fmt(r.max_abs_error_corrected) << '\n';
  return os.str();
}

MaskRestoreConfig parse_mask_restore_config(std::string_view json_text, const CubeMeta& meta) {
  json j;
  try {
    j = json_text.empty() ? json::object() : json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("mask-restore config is not JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "mask-restore config must be an object");
  require_keys(j, {"target", "seed", "tiers", "field", "train"}, "mask-restore config");
  for (const char* key : {"target", "seed"}) {
    if (j.contains(key) && !j[key].is_number_unsigned()) {
      fail(ErrorCode::kInvalidArgument, std::string("mask-restore ") + key + " must be a non-negative integer");
    }
  }
  MaskRestoreConfig cfg;
  try {
    cfg.target = j.value("target", meta.frames() / 2);
    cfg.gaps.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("tiers")) {
      for (const auto& t : j["tiers"]) {
        require_keys(t, {"label", "count", "min_diameter", "max_diameter"}, "gap tier");
        GapTier g;
        g.label = t.value("label", "tier" + std::to_string(cfg.gaps.tiers.size()));
        g.count = t.at("count").get<std::size_t>();
        g.min_diameter = t.at("min_diameter").get<double>();
        g.max_diameter = t.value("max_diameter", g.min_diameter);
        cfg.gaps.tiers.push_back(g);
      }
    } else {
      const double edge = static_cast<double>(std::min(meta.height, meta.width));
      cfg.gaps.tiers = {{"small", 8, edge / 32, edge / 16},
                        {"medium", 3, edge / 10, edge / 7},
                        {"large", 1, edge / 4, edge / 3}};
    }
    if (j.contains("field")) cfg.field = field_from_json(j["field"], cfg.field);
    if (j.contains("train")) cfg.train = train_from_json(j["train"], cfg.train);
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad mask-restore config: ") + e.what());
  }
  if (cfg.target >= meta.frames()) fail(ErrorCode::kIndexOutOfRange, "target frame out of range");
  return cfg;
}

std::string mask_restore_json(const MaskRestoreReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json nb = json::array(), lb = json::array();
    for (const auto& m : row.neural_per_band) nb.push_back(metrics_json(m));
    for (const auto& m : row.linear_per_band) lb.push_back(metrics_json(m));
    rows.push_back({{"region", row.label},
                    {"pixels", row.pixels},
                    {"neural", metrics_json(row.neural)},
                    {"linear", metrics_json(row.linear)},
                    {"neural_per_band", nb},
                    {"linear_per_band", lb}});
  }
  json gaps = json::array();
  for (const auto& g : r.record.gaps) {
    gaps.push_back({{"ci", g.ci}, {"cj", g.cj}, {"diameter", g.diameter}, {"tier", g.tier}});
  }
  return json{{"target", r.record.frame},
              {"rows", rows},
              {"gaps", gaps},
              {"final_loss", r.train.final_loss},
              {"steps", r.train.steps}}
      .dump();
}

}  // namespace gndc
