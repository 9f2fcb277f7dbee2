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

#include "json_io.hpp"

#include <type_traits>

#include "gndc/error.hpp"

namespace gndc {

using nlohmann::json;

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out, const std::string& context) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    if (!it->is_number_integer() || (std::is_unsigned_v<T> && !it->is_number_unsigned())) {
      fail(ErrorCode::kInvalidArgument, context + "." + key + " must be a " +
                                            (std::is_unsigned_v<T> ? "non-negative " : "") + "integer");
    }
  }
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::kInvalidArgument, context + "." + key + " has the wrong type");
  }
}

void require_object(const json& j, const std::string& context) {
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, context + " must be a JSON object");
}

}  // namespace

void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& context) {
  require_object(j, context);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail(ErrorCode::kInvalidArgument, "unknown key '" + key + "' in " + context);
  }
}

json meta_to_json(const CubeMeta& m) {
  json j;
  j["crs"] = m.crs;
  j["bbox"] = {m.bbox.x_min, m.bbox.y_min, m.bbox.x_max, m.bbox.y_max};
  j["timestamps"] = m.timestamps;
  j["band_names"] = m.band_names;
  j["height"] = m.height;
  j["width"] = m.width;
  j["scale"] = m.value_scale;
  j["offset"] = m.value_offset;
  return j;
}

CubeMeta meta_from_json(const json& j) {
  CubeMeta m;
  try {
    m.crs = j.at("crs").get<std::string>();
    const auto& b = j.at("bbox");
    if (!b.is_array() || b.size() != 4) {
      fail(ErrorCode::kInvalidArgument, "meta.json: bbox must have 4 numbers");
    }
    m.bbox = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    m.timestamps = j.at("timestamps").get<std::vector<std::int64_t>>();
    m.band_names = j.at("band_names").get<std::vector<std::string>>();
    m.height = j.at("height").get<std::size_t>();
    m.width = j.at("width").get<std::size_t>();
    const auto channels = m.band_names.size();
    m.value_scale = j.contains("scale") ? j["scale"].get<std::vector<double>>()
                                        : std::vector<double>(channels, 1.0);
    m.value_offset = j.contains("offset") ? j["offset"].get<std::vector<double>>()
                                          : std::vector<double>(channels, 0.0);
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("meta.json: ") + e.what());
  }
  return m;
}

json grid_to_json(const HashGridConfig& g) {
  return {{"levels", g.levels},
          {"features", g.features},
          {"table_log2", g.table_log2},
          {"base_resolution", g.base_resolution},
          {"growth", g.growth}};
}

HashGridConfig grid_from_json(const json& j, HashGridConfig base) {
  const std::string ctx = "grid config";
  require_keys(j, {"levels", "features", "table_log2", "base_resolution", "growth"}, ctx);
  read_opt(j, "levels", base.levels, ctx);
  read_opt(j, "features", base.features, ctx);
  read_opt(j, "table_log2", base.table_log2, ctx);
  read_opt(j, "base_resolution", base.base_resolution, ctx);
  read_opt(j, "growth", base.growth, ctx);
  return base;
}

json field_to_json(const FieldConfig& c) {
  return {{"grid2d", grid_to_json(c.grid2d)},
          {"grid3d", grid_to_json(c.grid3d)},
          {"spatial_scale", c.spatial_scale},
          {"hidden_width", c.hidden_width},
          {"hidden_layers", c.hidden_layers},
          {"out_channels", c.out_channels}};
}

FieldConfig field_from_json(const json& j, FieldConfig base) {
  const std::string ctx = "field config";
  require_keys(j, {"grid2d", "grid3d", "spatial_scale", "hidden_width", "hidden_layers", "out_channels"}, ctx);
  if (j.contains("grid2d")) base.grid2d = grid_from_json(j["grid2d"], base.grid2d);
  if (j.contains("grid3d")) base.grid3d = grid_from_json(j["grid3d"], base.grid3d);
  read_opt(j, "spatial_scale", base.spatial_scale, ctx);
  read_opt(j, "hidden_width", base.hidden_width, ctx);
  read_opt(j, "hidden_layers", base.hidden_layers, ctx);
  read_opt(j, "out_channels", base.out_channels, ctx);
  return base;
}

json train_to_json(const TrainConfig& c) {
  return {{"batch_size", c.batch_size},
          {"total_steps", c.total_steps},
          {"learning_rate", c.learning_rate},
          {"lr_decay", c.lr_decay},
          {"milestones", c.milestones},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_eps", c.adam_eps},
          {"weight_decay", c.weight_decay},
          {"rng_seed", c.rng_seed},
          {"loss_log_interval", c.loss_log_interval}};
}

TrainConfig train_from_json(const json& j, TrainConfig base) {
  const std::string ctx = "train config";
  require_keys(j, {"batch_size", "total_steps", "learning_rate", "lr_decay", "milestones", "adam_beta1",
                   "adam_beta2", "adam_eps", "weight_decay", "rng_seed", "loss_log_interval"},
               ctx);
  read_opt(j, "batch_size", base.batch_size, ctx);
  read_opt(j, "total_steps", base.total_steps, ctx);
  read_opt(j, "learning_rate", base.learning_rate, ctx);
  read_opt(j, "lr_decay", base.lr_decay, ctx);
  read_opt(j, "milestones", base.milestones, ctx);
  read_opt(j, "adam_beta1", base.adam_beta1, ctx);
  read_opt(j, "adam_beta2", base.adam_beta2, ctx);
  read_opt(j, "adam_eps", base.adam_eps, ctx);
  read_opt(j, "weight_decay", base.weight_decay, ctx);
  read_opt(j, "rng_seed", base.rng_seed, ctx);
  read_opt(j, "loss_log_interval", base.loss_log_interval, ctx);
  return base;
}

json residual_to_json(const ResidualConfig& c) {
  return {{"threshold", c.threshold}, {"quant_step", c.quant_step}, {"enabled", c.enabled}};
}

ResidualConfig residual_from_json(const json& j, ResidualConfig base) {
  const std::string ctx = "residual config";
  require_keys(j, {"threshold", "quant_step", "enabled"}, ctx);
  read_opt(j, "threshold", base.threshold, ctx);
  read_opt(j, "quant_step", base.quant_step, ctx);
  read_opt(j, "enabled", base.enabled, ctx);
  return base;
}

}  // namespace gndc
