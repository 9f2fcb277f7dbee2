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

#include <initializer_list>
#include <string>

#include "json.hpp"

#include "gndc/cube.hpp"
#include "gndc/field.hpp"
#include "gndc/residual.hpp"
#include "gndc/trainer.hpp"

namespace gndc {

nlohmann::json meta_to_json(const CubeMeta& m);
CubeMeta meta_from_json(const nlohmann::json& j);

// Config readers start from `base` and override the keys present; unknown
// keys are rejected with InvalidArgument.
nlohmann::json grid_to_json(const HashGridConfig& g);
HashGridConfig grid_from_json(const nlohmann::json& j, HashGridConfig base);
nlohmann::json field_to_json(const FieldConfig& c);
FieldConfig field_from_json(const nlohmann::json& j, FieldConfig base = {});
nlohmann::json train_to_json(const TrainConfig& c);
TrainConfig train_from_json(const nlohmann::json& j, TrainConfig base = {});
nlohmann::json residual_to_json(const ResidualConfig& c);
ResidualConfig residual_from_json(const nlohmann::json& j, ResidualConfig base = {});

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                  const std::string& context);

}  // namespace gndc
