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

#include "gndc/encoder.hpp"

#include <sstream>

#include "gndc/bytes.hpp"
#include "gndc/error.hpp"
#include "json_io.hpp"

namespace gndc {

using nlohmann::json;

EncodeConfig parse_encode_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("config is not valid JSON: ") + e.what());
  }
  require_keys(j, {"field", "train", "residual", "store_mask", "table_dtype"}, "encode config");
  EncodeConfig cfg;
  if (j.contains("field")) cfg.field = field_from_json(j["field"], cfg.field);
  if (j.contains("train")) cfg.train = train_from_json(j["train"], cfg.train);
  if (j.contains("residual")) cfg.residual = residual_from_json(j["residual"], cfg.residual);
  if (j.contains("store_mask")) {
    if (!j["store_mask"].is_boolean()) fail(ErrorCode::kInvalidArgument, "store_mask must be a boolean");
    cfg.store_mask = j["store_mask"].get<bool>();
  }
  if (j.contains("table_dtype")) {
    const auto& d = j["table_dtype"];
    if (!d.is_string() || (d != "f16" && d != "f32")) {
      fail(ErrorCode::kInvalidArgument, "table_dtype must be \"f16\" or \"f32\"");
    }
    cfg.half_tables = d == "f16";
  }
  cfg.field.validate();
  cfg.train.validate();
  cfg.residual.validate();
  return cfg;
}

std::string encode_config_json(const EncodeConfig& cfg) {
  json j;
  j["field"] = field_to_json(cfg.field);
  j["train"] = train_to_json(cfg.train);
  j["residual"] = residual_to_json(cfg.residual);
  j["store_mask"] = cfg.store_mask;
  j["table_dtype"] = cfg.half_tables ? "f16" : "f32";
  return j.dump(2);
}

GndcModel package_model(const CubeBundle& bundle, const FieldParams& params, const NormalizationSpec& norm,
                        const EncodeConfig& cfg, const TrainReport& train_report) {
  GndcModel m;
  m.meta = bundle.meta;
  m.norm = norm;
  m.field = params.config;
  m.residual_config = cfg.residual;
  m.training = {train_report.steps, cfg.train.batch_size, cfg.train.rng_seed, cfg.train.learning_rate,
                train_report.final_loss, train_report.seconds};
  if (cfg.half_tables) {
    auto compact = compact_params(params);
    if (cfg.residual.enabled) m.residuals = compute_residuals(bundle, compact, norm, cfg.residual);
    m.params = std::move(compact);
  } else {
    if (cfg.residual.enabled) m.residuals = compute_residuals(bundle, params, norm, cfg.residual);
    m.params = params;
  }
  if (cfg.store_mask) m.mask = bundle.mask;
  return m;
}

GndcModel build_model(const CubeBundle& bundle, const EncodeConfig& cfg, EncodeReport* report,
                      const TrainProgress& progress) {
  auto trained = train(bundle, cfg.field, cfg.train, progress);
  GndcModel m = package_model(bundle, trained.params, trained.norm, cfg, trained.report);
  if (report) {
    report->train = trained.report;
    report->residual_count = m.residuals ? m.residuals->size() : 0;
    report->source_bytes = bundle.meta.samples() * 4;
  }
  return m;
}

EncodeReport encode_to_file(const CubeBundle& bundle, const EncodeConfig& cfg, const std::filesystem::path& out,
                            const TrainProgress& progress) {
  EncodeReport r;
  const GndcModel m = build_model(bundle, cfg, &r, progress);
  const auto bytes = serialize_gndc(m);
  write_file(out, bytes);
  const auto header = parse_gndc_header(bytes, bytes.size());
  r.file_bytes = bytes.size();
  r.payload_bytes = header.payload_bytes();
  r.compression_ratio = static_cast<double>(r.source_bytes) / static_cast<double>(r.file_bytes);
  return r;
}

std::string encode_report_json(const EncodeReport& r) {
  json j;
  j["final_loss"] = r.train.final_loss;
  j["steps"] = r.train.steps;
  j["train_seconds"] = r.train.seconds;
  j["residual_count"] = r.residual_count;
  j["file_bytes"] = r.file_bytes;
  j["payload_bytes"] = r.payload_bytes;
  j["source_bytes"] = r.source_bytes;
  j["compression_ratio"] = r.compression_ratio;
  json trace = json::array();
  for (const auto& p : r.train.trace) trace.push_back({p.step, p.loss});
  j["loss_trace"] = trace;
  return j.dump();
}

std::string loss_trace_csv(const TrainReport& r) {
  std::ostringstream o;
  o.precision(10);
  o << "step,loss\n";
  for (const auto& p : r.trace) o << p.step << "," << p.loss << "\n";
  return o.str();
}

}  // namespace gndc
