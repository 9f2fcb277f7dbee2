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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>
#include <vector>

#include "api_fixture.hpp"
#include "cli_runner.hpp"
#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "service.hpp"

using gndc_test::ApiFixture;
using gndc_test::run_cli;
using gndc_test::take;
using gndc_tools::QueryService;
using gndc_tools::ServiceConfig;
using nlohmann::json;

namespace {

struct Running {
  std::unique_ptr<QueryService> svc;
  std::thread thread;
  int port = 0;

  explicit Running(ServiceConfig cfg) : svc(std::make_unique<QueryService>(std::move(cfg))) {
    port = svc->bind();
    thread = std::thread([this] { svc->listen_after_bind(); });
    svc->wait_until_ready();
  }
  ~Running() {
    svc->stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(120);
    return c;
  }
};

ServiceConfig base_config() {
  ServiceConfig cfg;
  cfg.port = 0;
  cfg.model = ApiFixture::get().model_path.string();
  cfg.max_concurrent = 8;
  cfg.max_region_pixels = 64;
  return cfg;
}

Running& shared() {
  static Running r(base_config());
  return r;
}

std::size_t resident_kb() {
  std::ifstream in("/proc/self/statm");
  std::size_t size = 0, resident = 0;
  in >> size >> resident;
  return resident * 4;
}

const std::string kTime = "2020-01-11T00:00:00Z";

}  // namespace

TEST_CASE("/meta matches inspect") {
  auto c = shared().client();
  const auto res = c.Get("/meta");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type") == "application/json");
  char* text = nullptr;
  REQUIRE(gndc_inspect(ApiFixture::get().model_path.c_str(), 1, &text) == GNDC_OK);
  CHECK(res->body == take(text));
  const auto cli = run_cli("inspect --json --model " + ApiFixture::get().model_path.string());
  CHECK(cli.exit_code == 0);
  CHECK(cli.out == res->body + "\n");
}

TEST_CASE("/query equals the CLI and C API byte for byte") {
  auto c = shared().client();
  const auto& f = ApiFixture::get();
  for (const auto& [x, y] : std::vector<std::pair<std::string, std::string>>{
           {"0.34375", "0.625"}, {"0.1", "0.9"}, {"0.96875", "0.025"}}) {
    const auto res = c.Get("/query?x=" + x + "&y=" + y + "&t=" + kTime);
    REQUIRE(res);
    CHECK(res->status == 200);
    double t = 0;
    gndc_time_parse(kTime.c_str(), &t);
    char* text = nullptr;
    REQUIRE(gndc_query_point_json(f.model, std::stod(x), std::stod(y), t, &text) == GNDC_OK);
    CHECK(res->body == take(text));
    const auto cli = run_cli("query --json --model " + f.model_path.string() + " --x " + x + " --y " + y +
                             " --time " + kTime);
    REQUIRE(cli.exit_code == 0);
    CHECK(cli.out == res->body + "\n");
  }
}

TEST_CASE("/timeseries, /region and /derivative match the CLI") {
  auto c = shared().client();
  const auto model = ApiFixture::get().model_path.string();

  auto res = c.Get("/timeseries?x=0.25&y=0.5");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(run_cli("timeseries --json --model " + model + " --x 0.25 --y 0.5").out == res->body + "\n");
  res = c.Get("/timeseries?x=0.25&y=0.5&n=9");
  CHECK(json::parse(res->body).at("times").size() == 9);
  CHECK(run_cli("timeseries --json --model " + model + " --x 0.25 --y 0.5 --n 9").out == res->body + "\n");

  const json body = {{"window", {{"i0", 2}, {"i1", 6}, {"j0", 3}, {"j1", 8}}}, {"t", kTime}};
  res = c.Post("/region", body.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(run_cli("region --json --model " + model + " --i0 2 --i1 6 --j0 3 --j1 8 --time " + kTime).out ==
        res->body + "\n");
  const auto j = json::parse(res->body);
  CHECK(j.at("values").size() == 4 * 5 * 2);

  res = c.Get("/derivative?i0=0&i1=3&j0=1&j1=4&t=" + kTime);
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(run_cli("derivative --json --model " + model + " --i0 0 --i1 3 --j0 1 --j1 4 --time " + kTime).out ==
        res->body + "\n");
}

TEST_CASE("malformed requests get 400, oversized ones 413") {
  auto c = shared().client();
  auto status = [&](const httplib::Result& r) { return r ? r->status : -1; };
  CHECK(status(c.Get("/query?x=0.5&y=0.5")) == 400);
  CHECK(status(c.Get("/query?x=abc&y=0.5&t=" + kTime)) == 400);
  CHECK(status(c.Get("/query?x=0.5&y=0.5&t=tomorrow")) == 400);
  CHECK(status(c.Get("/timeseries?x=0.5")) == 400);
  CHECK(status(c.Get("/timeseries?x=0.5&y=0.5&n=-3")) == 400);
  CHECK(status(c.Post("/region", "{not json", "application/json")) == 400);
  CHECK(status(c.Post("/region", R"({"t": "2020-01-11"})", "application/json")) == 400);
  CHECK(status(c.Post("/region", R"({"window": {"i0": 0, "i1": 2, "j0": 0}, "t": "2020-01-11"})",
                      "application/json")) == 400);
  CHECK(status(c.Post("/region", R"({"window": {"i0": 18, "i1": 22, "j0": 0, "j1": 2}, "t": "2020-01-11"})",
                      "application/json")) == 400);
  const auto big = c.Post("/region", R"({"window": {"i0": 0, "i1": 10, "j0": 0, "j1": 10}, "t": "2020-01-11"})",
                          "application/json");
  REQUIRE(big);
  CHECK(big->status == 413);
  CHECK(json::parse(big->body).at("error").get<std::string>().find("limit") != std::string::npos);
  CHECK(status(c.Get("/derivative?t=" + kTime)) == 413);
  CHECK(status(c.Get("/derivative?i0=0&i1=2&j0=0&j1=2")) == 400);
  CHECK(status(c.Get("/frame")) == 413);
  CHECK(status(c.Get("/frame?downsample=0")) == 400);
  CHECK(status(c.Get("/frame?downsample=4&bands=0,1")) == 400);
  CHECK(status(c.Get("/frame?downsample=4&bands=7")) == 400);
  const auto missing = c.Get("/nowhere");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body).at("status") == 404);
}

TEST_CASE("/frame returns a PNG matching the CLI renderer") {
  auto c = shared().client();
  const auto res = c.Get("/frame?t=" + kTime + "&downsample=4&bands=1,0,1");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type") == "image/png");
  REQUIRE(res->body.size() > 8);
  CHECK(res->body.compare(0, 8, "\x89PNG\r\n\x1a\n") == 0);
  const auto out = ApiFixture::get().dir / "cli_frame.png";
  const auto cli = run_cli("frame --model " + ApiFixture::get().model_path.string() + " --time " + kTime +
                           " --downsample 4 --bands 1,0,1 --output " + out.string());
  REQUIRE(cli.exit_code == 0);
  std::ifstream in(out, std::ios::binary);
  const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(file == res->body);
  const auto between = c.Get("/frame?t=2020-01-13T12:00:00Z&downsample=4&colormap=gray");
  REQUIRE(between);
  CHECK(between->status == 200);
  const auto first = c.Get("/frame?downsample=4");
  REQUIRE(first);
  CHECK(first->status == 200);
}

TEST_CASE("CORS headers and preflight") {
  auto c = shared().client();
  const auto res = c.Get("/meta", {{"Origin", "http://localhost:5173"}});
  REQUIRE(res);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
  const auto pre = c.Options("/region");
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK(pre->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);

  auto cfg = base_config();
  cfg.cors_origins = {"http://viewer.local"};
  Running strict(cfg);
  auto s = strict.client();
  const auto ok = s.Get("/meta", {{"Origin", "http://viewer.local"}});
  REQUIRE(ok);
  CHECK(ok->get_header_value("Access-Control-Allow-Origin") == "http://viewer.local");
  const auto other = s.Get("/meta", {{"Origin", "http://evil.example"}});
  REQUIRE(other);
  CHECK_FALSE(other->has_header("Access-Control-Allow-Origin"));
}

TEST_CASE("64 concurrent identical time-series requests") {
  auto& svc = shared();
  const auto want = svc.client().Get("/timeseries?x=0.3&y=0.7&n=25");
  REQUIRE(want);
  std::vector<std::string> bodies(64);
  std::vector<int> codes(64, 0);
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < 64; ++k) {
    pool.emplace_back([&, k] {
      auto c = svc.client();
      const auto r = c.Get("/timeseries?x=0.3&y=0.7&n=25");
      if (r) {
        codes[k] = r->status;
        bodies[k] = r->body;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (std::size_t k = 0; k < 64; ++k) {
    CHECK(codes[k] == 200);
    CHECK(bodies[k] == want->body);
  }
}

TEST_CASE("resident memory stays bounded under sustained load") {
  auto& svc = shared();
  auto warm = svc.client();
  for (int k = 0; k < 50; ++k) warm.Get("/timeseries?x=0.3&y=0.7&n=50");
  const auto before = resident_kb();
  std::atomic<int> failures{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < 8; ++w) {
    pool.emplace_back([&, w] {
      auto c = svc.client();
      for (int k = 0; k < 150; ++k) {
        const auto r = (k % 3 == 0)
                           ? c.Post("/region",
                                    R"({"window": {"i0": 0, "i1": 8, "j0": 0, "j1": 8}, "t": "2020-01-11"})",
                                    "application/json")
                           : c.Get("/timeseries?x=0." + std::to_string(w + 1) + "&y=0.5&n=50");
        if (!r || r->status != 200) ++failures;
      }
    });
  }
  for (auto& t : pool) t.join();
  const auto after = resident_kb();
  MESSAGE("resident before " << before << " kB, after " << after << " kB");
  CHECK(failures == 0);
  CHECK(after < before + 16 * 1024);
}

TEST_CASE("service config file and environment overrides") {
  const auto path = ApiFixture::get().dir / "service.json";
  {
    std::ofstream out(path);
    out << R"({"port": 9001, "model": "a.gndc", "max_concurrent": 3, "max_region_pixels": 100,
               "cors_origins": ["http://x"], "bind": "0.0.0.0"})";
  }
  ::unsetenv("GNDC_PORT");
  ::unsetenv("GNDC_MODEL");
  auto cfg = gndc_tools::load_service_config(path.string());
  CHECK(cfg.port == 9001);
  CHECK(cfg.model == "a.gndc");
  CHECK(cfg.max_concurrent == 3);
  CHECK(cfg.max_region_pixels == 100);
  CHECK(cfg.bind == "0.0.0.0");
  ::setenv("GNDC_PORT", "9100", 1);
  ::setenv("GNDC_MODEL", "b.gndc", 1);
  cfg = gndc_tools::load_service_config(path.string());
  CHECK(cfg.port == 9100);
  CHECK(cfg.model == "b.gndc");
  ::setenv("GNDC_PORT", "", 1);
  ::setenv("GNDC_MODEL", "", 1);
  cfg = gndc_tools::load_service_config(path.string());
  CHECK(cfg.port == 9001);
  CHECK(cfg.model == "a.gndc");
  ::setenv("GNDC_PORT", "ninety", 1);
  CHECK_THROWS_AS(gndc_tools::load_service_config(""), std::invalid_argument);
  ::unsetenv("GNDC_PORT");
  ::unsetenv("GNDC_MODEL");

  {
    std::ofstream out(path);
    out << R"({"prot": 1})";
  }
  CHECK_THROWS_AS(gndc_tools::load_service_config(path.string()), std::invalid_argument);
  CHECK_THROWS_AS(gndc_tools::load_service_config("/nonexistent.json"), std::invalid_argument);

  ServiceConfig bad = base_config();
  bad.max_region_pixels = 0;
  CHECK_THROWS_AS(gndc_tools::validate(bad), std::invalid_argument);
  bad = base_config();
  bad.port = 70000;
  CHECK_THROWS_AS(gndc_tools::validate(bad), std::invalid_argument);
  bad = base_config();
  bad.model = (ApiFixture::get().dir / "missing.gndc").string();
  CHECK_THROWS_AS(QueryService{bad}, std::runtime_error);
}
