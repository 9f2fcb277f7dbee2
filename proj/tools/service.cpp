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

#include "service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "httplib.h"
#include "json.hpp"

namespace gndc_tools {

using nlohmann::json;

namespace {

struct HttpError {
  int status;
  std::string message;
};

int http_status(gndc_status s) {
  switch (s) {
    case GNDC_INVALID_ARGUMENT:
    case GNDC_INDEX_OUT_OF_RANGE:
    case GNDC_WINDOW_OUT_OF_BOUNDS:
    case GNDC_LENGTH_MISMATCH:
      return 400;
    default:
      return 500;
  }
}

void check(gndc_status s) {
  if (s != GNDC_OK) throw HttpError{http_status(s), std::string(gndc_status_string(s)) + ": " + gndc_last_error()};
}

std::string take(char* p) {
  std::string s(p);
  gndc_free(p);
  return s;
}

std::string param(const httplib::Request& req, const std::string& key) {
  if (!req.has_param(key)) throw HttpError{400, "missing parameter '" + key + "'"};
  return req.get_param_value(key);
}

double number(const std::string& text, const std::string& key) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v)) {
    throw HttpError{400, "parameter '" + key + "' is not a finite number"};
  }
  return v;
}

std::size_t count(const std::string& text, const std::string& key) {
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw HttpError{400, "parameter '" + key + "' is not a non-negative integer"};
  }
  return v;
}

double time_of(const std::string& text) {
  double s = 0.0;
  if (gndc_time_parse(text.c_str(), &s) != GNDC_OK) throw HttpError{400, "bad time '" + text + "'"};
  return s;
}

double time_param(const httplib::Request& req) { return time_of(param(req, "t")); }

void json_reply(httplib::Response& res, const std::string& body) { res.set_content(body, "application/json"); }

}  // namespace

ServiceConfig load_service_config(const std::string& path) {
  ServiceConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read service config '" + path + "'");
    json j;
    try {
      j = json::parse(in);
      if (!j.is_object()) throw std::invalid_argument("service config must be a JSON object");
      for (const auto& [k, v] : j.items()) {
        if ((k == "max_concurrent" || k == "max_region_pixels") && !v.is_number_unsigned()) {
          throw std::invalid_argument(k + " must be a non-negative integer");
        }
        if (k == "bind") {
          cfg.bind = v.get<std::string>();
        } else if (k == "port") {
          cfg.port = v.get<int>();
        } else if (k == "model") {
          cfg.model = v.get<std::string>();
        } else if (k == "max_concurrent") {
          cfg.max_concurrent = v.get<std::size_t>();
        } else if (k == "max_region_pixels") {
          cfg.max_region_pixels = v.get<std::size_t>();
        } else if (k == "cors_origins") {
          cfg.cors_origins = v.get<std::vector<std::string>>();
        } else {
          throw std::invalid_argument("unknown service config key '" + k + "'");
        }
      }
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("bad service config: ") + e.what());
    }
  }
  if (const char* p = std::getenv("GNDC_PORT"); p != nullptr && *p != '\0') {
    int port = 0;
    const std::string s(p);
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), port);
    if (ec != std::errc() || end != s.data() + s.size()) throw std::invalid_argument("GNDC_PORT is not an integer");
    cfg.port = port;
  }
  if (const char* m = std::getenv("GNDC_MODEL"); m != nullptr && *m != '\0') cfg.model = m;
  return cfg;
}

void validate(const ServiceConfig& cfg) {
  if (cfg.port < 0 || cfg.port > 65535) throw std::invalid_argument("port out of range");
  if (cfg.max_region_pixels < 1) throw std::invalid_argument("max_region_pixels must be >= 1");
  if (cfg.max_concurrent < 1) throw std::invalid_argument("max_concurrent must be >= 1");
  if (cfg.model.empty()) throw std::invalid_argument("no model path configured");
}

QueryService::QueryService(ServiceConfig cfg) : cfg_(std::move(cfg)), server_(std::make_unique<httplib::Server>()) {
  validate(cfg_);
  if (gndc_model_open(cfg_.model.c_str(), &model_) != GNDC_OK) {
    throw std::runtime_error("cannot load model '" + cfg_.model + "': " + gndc_last_error());
  }
  gndc_model_shape(model_, &shape_);
  char* meta = nullptr;
  gndc_model_meta_json(model_, &meta);
  first_time_ = time_of(json::parse(take(meta)).at("timestamps").at(0).get<std::string>());
  const std::size_t threads = cfg_.max_concurrent;
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  server_->set_payload_max_length(1 << 20);
  routes();
}

QueryService::~QueryService() {
  stop();
  gndc_model_close(model_);
}

bool QueryService::listen() {
  if (cfg_.port == 0) {
    bind();
    return listen_after_bind();
  }
  return server_->listen(cfg_.bind, cfg_.port);
}

int QueryService::bind() {
  const int port = cfg_.port == 0 ? server_->bind_to_any_port(cfg_.bind) : (server_->bind_to_port(cfg_.bind, cfg_.port) ? cfg_.port : -1);
  if (port < 0) throw std::runtime_error("cannot bind " + cfg_.bind + ":" + std::to_string(cfg_.port));
  cfg_.port = port;
  return port;
}

bool QueryService::listen_after_bind() { return server_->listen_after_bind(); }

void QueryService::stop() {
  if (server_) server_->stop();
}

void QueryService::wait_until_ready() const { server_->wait_until_ready(); }

void QueryService::routes() {
  auto& s = *server_;
  const auto origins = cfg_.cors_origins;
  s.set_post_routing_handler([origins](const httplib::Request& req, httplib::Response& res) {
    const auto origin = req.get_header_value("Origin");
    const bool any = std::find(origins.begin(), origins.end(), "*") != origins.end();
    if (any) {
      res.set_header("Access-Control-Allow-Origin", "*");
    } else if (!origin.empty() && std::find(origins.begin(), origins.end(), origin) != origins.end()) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    }
  });
  s.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    int status = 500;
    std::string message = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const HttpError& e) {
      status = e.status;
      message = e.message;
    } catch (const json::exception& e) {
      status = 400;
      message = std::string("malformed JSON: ") + e.what();
    } catch (const std::exception& e) {
      message = e.what();
    }
    res.status = status;
    json_reply(res, json{{"error", message}, {"status", status}}.dump());
  });
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) json_reply(res, json{{"error", httplib::status_message(res.status)}, {"status", res.status}}.dump());
  });

  const auto limit = cfg_.max_region_pixels;
  auto window_guard = [limit](std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1) {
    if (i1 <= i0 || j1 <= j0) throw HttpError{400, "window is empty"};
    if ((i1 - i0) * (j1 - j0) > limit) {
      throw HttpError{413, "window has " + std::to_string((i1 - i0) * (j1 - j0)) + " pixels, limit is " +
                               std::to_string(limit)};
    }
  };

  s.Get("/meta", [this](const httplib::Request&, httplib::Response& res) {
    char* out = nullptr;
    check(gndc_model_meta_json(model_, &out));
    json_reply(res, take(out));
  });

  s.Get("/query", [this](const httplib::Request& req, httplib::Response& res) {
    const double x = number(param(req, "x"), "x"), y = number(param(req, "y"), "y");
    char* out = nullptr;
    check(gndc_query_point_json(model_, x, y, time_param(req), &out));
    json_reply(res, take(out));
  });

  s.Get("/timeseries", [this](const httplib::Request& req, httplib::Response& res) {
    const double x = number(param(req, "x"), "x"), y = number(param(req, "y"), "y");
    const std::size_t n = req.has_param("n") ? count(req.get_param_value("n"), "n") : 0;
    if (n > 100000) throw HttpError{413, "n is above 100000"};
    char* out = nullptr;
    check(gndc_query_timeseries_json(model_, x, y, n, &out));
    json_reply(res, take(out));
  });

  s.Post("/region", [this, window_guard](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    if (!body.is_object() || !body.contains("window") || !body.contains("t")) {
      throw HttpError{400, "body needs 'window' and 't'"};
    }
    const auto& w = body.at("window");
    const auto i0 = w.at("i0").get<std::size_t>(), i1 = w.at("i1").get<std::size_t>();
    const auto j0 = w.at("j0").get<std::size_t>(), j1 = w.at("j1").get<std::size_t>();
    window_guard(i0, i1, j0, j1);
    const auto& t = body.at("t");
    const double secs = t.is_number() ? t.get<double>() : time_of(t.get<std::string>());
    char* out = nullptr;
    check(gndc_query_region_json(model_, i0, i1, j0, j1, secs, &out));
    json_reply(res, take(out));
  });

  s.Get("/derivative", [this, window_guard](const httplib::Request& req, httplib::Response& res) {
    std::size_t i0 = 0, i1 = shape_.height, j0 = 0, j1 = shape_.width;
    if (req.has_param("x") || req.has_param("y")) {
      throw HttpError{400, "derivative takes a pixel window i0, i1, j0, j1"};
    }
    if (req.has_param("i0")) i0 = count(req.get_param_value("i0"), "i0");
    if (req.has_param("i1")) i1 = count(req.get_param_value("i1"), "i1");
    if (req.has_param("j0")) j0 = count(req.get_param_value("j0"), "j0");
    if (req.has_param("j1")) j1 = count(req.get_param_value("j1"), "j1");
    window_guard(i0, i1, j0, j1);
    char* out = nullptr;
    check(gndc_query_derivative_json(model_, i0, i1, j0, j1, time_param(req), &out));
    json_reply(res, take(out));
  });

  s.Get("/frame", [this, limit](const httplib::Request& req, httplib::Response& res) {
    auto opt = gndc_render_defaults();
    if (req.has_param("downsample")) opt.downsample = count(req.get_param_value("downsample"), "downsample");
    if (opt.downsample == 0) throw HttpError{400, "downsample must be >= 1"};
    if (req.has_param("bands")) {
      std::stringstream ss(req.get_param_value("bands"));
      std::string item;
      opt.band_count = 0;
      while (std::getline(ss, item, ',')) {
        if (opt.band_count == 3) throw HttpError{400, "bands lists more than 3 entries"};
        opt.bands[opt.band_count++] = count(item, "bands");
      }
    }
    std::string cmap;
    if (req.has_param("colormap")) {
      cmap = req.get_param_value("colormap");
      opt.colormap = cmap.c_str();
    }
    if (req.has_param("vmin")) opt.vmin = number(req.get_param_value("vmin"), "vmin");
    if (req.has_param("vmax")) opt.vmax = number(req.get_param_value("vmax"), "vmax");
    std::size_t pixels = 0;
    check(gndc_render_pixels(model_, opt.downsample, &pixels));
    if (pixels > limit) {
      throw HttpError{413, "frame has " + std::to_string(pixels) + " pixels, limit is " + std::to_string(limit)};
    }
    double secs = 0.0;
    if (req.has_param("t")) {
      secs = time_param(req);
    } else {
      secs = first_time_;
    }
    std::uint8_t* png = nullptr;
    std::size_t len = 0;
    check(gndc_render_png(model_, secs, &opt, &png, &len));
    std::string body(reinterpret_cast<const char*>(png), len);
    gndc_free(png);
    res.set_content(std::move(body), "image/png");
  });
}

}  // namespace gndc_tools
