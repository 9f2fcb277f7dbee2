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
#include <memory>
#include <string>
#include <vector>

#include "gndc/gndc.h"

namespace httplib {
class Server;
}

namespace gndc_tools {

struct ServiceConfig {
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::string model;
  std::size_t max_concurrent = 8;
  std::size_t max_region_pixels = 1 << 20;
  std::vector<std::string> cors_origins{"*"};
};

// JSON file (may be empty path) then non-empty GNDC_PORT / GNDC_MODEL overrides.
// Throws std::invalid_argument on a bad file, key or value.
ServiceConfig load_service_config(const std::string& path);
void validate(const ServiceConfig& cfg);

class QueryService {
 public:
  // Opens the model; throws std::runtime_error when it cannot be loaded.
  explicit QueryService(ServiceConfig cfg);
  ~QueryService();
  QueryService(const QueryService&) = delete;
  QueryService& operator=(const QueryService&) = delete;

  // Blocks until stop(). Port 0 binds an ephemeral port.
  bool listen();
  // Binds now and returns the port; call listen_after_bind() to serve.
  int bind();
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

  const ServiceConfig& config() const { return cfg_; }

 private:
  void routes();

  ServiceConfig cfg_;
  gndc_model* model_ = nullptr;
  gndc_shape shape_{};
  double first_time_ = 0.0;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace gndc_tools
