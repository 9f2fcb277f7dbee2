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

#include <filesystem>
#include <string>

#include "gndc/gndc.h"

namespace gndc_test {

// Small clouded seasonal bundle and a model trained on it, written once per process.
struct ApiFixture {
  std::filesystem::path dir;
  std::filesystem::path bundle_dir;
  std::filesystem::path model_path;
  gndc_bundle* bundle = nullptr;
  gndc_model* model = nullptr;

  static const ApiFixture& get();
};

inline std::string take(char* p) {
  std::string s(p);
  gndc_free(p);
  return s;
}

inline const ApiFixture& ApiFixture::get() {
  static const ApiFixture f = [] {
    ApiFixture a;
    a.dir = std::filesystem::temp_directory_path() / "gndc_api_fixture";
    std::filesystem::remove_all(a.dir);
    std::filesystem::create_directories(a.dir);
    a.bundle_dir = a.dir / "bundle";
    a.model_path = a.dir / "m.gndc";
    gndc_bundle_synthetic("seasonal", gndc_shape{20, 16, 6, 2}, 9, &a.bundle);
    gndc_bundle_add_clouds(a.bundle, 2, 0.3, 3.0, 1);
    gndc_bundle_save(a.bundle, a.bundle_dir.c_str());
    const char* cfg =
        R"({"train": {"total_steps": 200, "batch_size": 512},
            "field": {"grid2d": {"table_log2": 10}, "grid3d": {"table_log2": 10}}})";
    gndc_encode(a.bundle, cfg, a.model_path.c_str(), nullptr);
    gndc_model_open(a.model_path.c_str(), &a.model);
    return a;
  }();
  return f;
}

}  // namespace gndc_test
