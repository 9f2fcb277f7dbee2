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

#include <cmath>

#include "doctest.h"
#include "gndc/encoder.hpp"
#include "gndc/evaluate.hpp"
#include "gndc/synthetic.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace gndc;
using gndc::testing::code_of;

TEST_CASE("fidelity counts valid voxels and reflects the correction layer") {
  auto b = seasonal_cube(16, 16, 4, 2, 1);
  Rng rng(3);
  add_cloud_discs(b, 2, 0.25, 3.0, rng);
  EncodeConfig cfg;
  cfg.train.total_steps = 150;
  cfg.field.grid2d.table_log2 = 10;
  cfg.field.grid3d.table_log2 = 10;
  cfg.residual.threshold = 0.0;
  cfg.residual.quant_step = 1e-3;
  const LoadedCube cube(build_model(b, cfg));
  const auto r = evaluate_model(cube, b);
  REQUIRE(r.bands.size() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(r.bands[c].field.count == b.valid_count());
    CHECK(r.bands[c].corrected.rmse <= r.bands[c].field.rmse);
    CHECK(r.bands[c].corrected.r2 > 0.9999);
  }
  CHECK(r.field_normalized.count == 2 * b.valid_count());
  double worst_range = 0;
  for (std::size_t c = 0; c < 2; ++c) worst_range = std::max(worst_range, cube.norm().value_range(c));
  CHECK(r.max_abs_error_corrected <= 0.5e-3 * worst_range * (1 + 1e-5) + 1e-6);

  const auto j = nlohmann::json::parse(fidelity_json(r));
  CHECK(j.at("bands").size() == 2);
  CHECK(j.at("field_normalized").at("count") == 2 * b.valid_count());
  CHECK(fidelity_table(r).find("b1") != std::string::npos);

  auto other = seasonal_cube(16, 15, 4, 2, 1);
  CHECK(code_of([&] { evaluate_model(cube, other); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("mask-restore config defaults and validation") {
  const auto meta = seasonal_cube(64, 48, 12, 2, 0).meta;
  const auto d = parse_mask_restore_config("", meta);
  CHECK(d.target == 6);
  REQUIRE(d.gaps.tiers.size() == 3);
  CHECK(d.gaps.tiers[2].label == "large");
  CHECK(d.gaps.tiers[2].max_diameter <= 48);
  CHECK(d.gaps.tiers[0].min_diameter > 0);

  const auto c = parse_mask_restore_config(
      R"({"target": 2, "seed": 5, "tiers": [{"label": "x", "count": 2, "min_diameter": 3}],
          "train": {"total_steps": 10}})",
      meta);
  CHECK(c.target == 2);
  CHECK(c.gaps.seed == 5);
  REQUIRE(c.gaps.tiers.size() == 1);
  CHECK(c.gaps.tiers[0].max_diameter == 3);
  CHECK(c.train.total_steps == 10);

  CHECK(code_of([&] { parse_mask_restore_config(R"({"targets": 1})", meta); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { parse_mask_restore_config(R"({"target": 12})", meta); }) == ErrorCode::kIndexOutOfRange);
  CHECK(code_of([&] { parse_mask_restore_config("[1", meta); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { parse_mask_restore_config(R"({"target": -1})", meta); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { parse_mask_restore_config(R"({"tiers": [{"count": 1}]})", meta); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("mask-restore JSON lists every region row") {
  const auto b = seasonal_cube(20, 20, 5, 1, 4);
  const auto cfg = parse_mask_restore_config(
      R"({"tiers": [{"label": "a", "count": 2, "min_diameter": 2, "max_diameter": 3},
                    {"label": "b", "count": 1, "min_diameter": 6}],
          "train": {"total_steps": 50, "batch_size": 256}})",
      b.meta);
  const auto r = mask_and_restore(b, cfg.target, cfg.field, cfg.train, cfg.gaps);
  const auto j = nlohmann::json::parse(mask_restore_json(r));
  CHECK(j.at("target") == 2);
  REQUIRE(j.at("rows").size() == 4);
  CHECK(j["rows"][0]["region"] == "a");
  CHECK(j["rows"][3]["region"] == "outside");
  CHECK(j.at("gaps").size() == 3);
  CHECK(j.at("steps") == 50);
}
