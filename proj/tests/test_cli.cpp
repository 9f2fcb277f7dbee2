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

#include <filesystem>
#include <fstream>

#include "cli_runner.hpp"
#include "doctest.h"
#include "json.hpp"

using gndc_test::run_cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "gndc_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string p(const std::string& name) { return (workdir() / name).string(); }

void write(const std::string& name, const std::string& text) { std::ofstream(p(name)) << text; }

}  // namespace

TEST_CASE("usage errors exit 1 with a synopsis on stderr") {
  auto r = run_cli("");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);
  r = run_cli("query --model m.gndc --x 1 --y 2 --time 2020-01-01 --colour red");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(r.out.empty());
  CHECK(run_cli("teleport").exit_code == 1);
  CHECK(run_cli("query --model m.gndc --x 1 --y 2").exit_code == 1);
  CHECK(run_cli("query --model m.gndc --x one --y 2 --time 2020-01-01").exit_code == 1);
  CHECK(run_cli("query --model m.gndc --x 1 --y 2 --time someday").exit_code == 1);
  CHECK(run_cli("synth --output " + p("x") + " --kind lava").exit_code == 1);
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("--version").exit_code == 0);
}

TEST_CASE("synth, encode, inspect, query and eval") {
  auto r = run_cli("synth --json --kind seasonal --height 16 --width 12 --frames 5 --channels 2 --clouds 0.2 --seed 4 "
                   "--output " + p("bundle"));
  REQUIRE(r.exit_code == 0);
  CHECK(json::parse(r.out).at("frames") == 5);
  CHECK(fs::exists(p("bundle") + "/meta.json"));

  write("train.json", R"({"train": {"total_steps": 120, "batch_size": 256, "loss_log_interval": 40},
                          "field": {"grid2d": {"table_log2": 10}, "grid3d": {"table_log2": 10}}})");
  r = run_cli("encode --input " + p("bundle") + " --output " + p("m.gndc") + " --config " + p("train.json") +
              " --trace-csv " + p("trace.csv"));
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("final loss") != std::string::npos);
  CHECK(r.out.find("compression ratio") != std::string::npos);
  std::ifstream trace(p("trace.csv"));
  std::string header;
  std::getline(trace, header);
  CHECK(header == "step,loss");

  r = run_cli("encode --json --input " + p("bundle") + " --output " + p("m2.gndc") + " --config " + p("train.json"));
  REQUIRE(r.exit_code == 0);
  const auto report = json::parse(r.out);
  CHECK(report.at("steps") == 120);
  CHECK(report.at("loss_trace").size() == 4);

  r = run_cli("inspect --json --model " + p("m.gndc"));
  REQUIRE(r.exit_code == 0);
  const auto meta = json::parse(r.out);
  CHECK(meta.at("height") == 16);
  CHECK(meta.at("has_mask") == true);
  CHECK(run_cli("inspect --model " + p("m.gndc")).out.find("16 x 12 x 5 x 2") != std::string::npos);

  r = run_cli("query --json --model " + p("m.gndc") + " --x 0.3 --y 0.4 --time 2020-01-06T00:00:00Z");
  REQUIRE(r.exit_code == 0);
  const auto q = json::parse(r.out);
  CHECK(q.at("values").size() == 2);
  CHECK(q.at("time") == "2020-01-06T00:00:00Z");
  r = run_cli("query --model " + p("m.gndc") + " --x 0.3 --y 0.4 --time 2020-01-06T00:00:00Z");
  CHECK(r.out.find("b1") != std::string::npos);

  CHECK(run_cli("timeseries --model " + p("m.gndc") + " --x 0.3 --y 0.4").exit_code == 0);
  CHECK(run_cli("region --model " + p("m.gndc") + " --i0 0 --i1 2 --j0 0 --j1 2 --time 2020-01-06").exit_code == 0);
  CHECK(run_cli("derivative --model " + p("m.gndc") + " --i0 0 --i1 2 --j0 0 --j1 2 --time 2020-01-06").exit_code ==
        0);

  r = run_cli("eval --json --model " + p("m.gndc") + " --input " + p("bundle"));
  REQUIRE(r.exit_code == 0);
  CHECK(json::parse(r.out).at("bands").size() == 2);

  write("gaps.json", R"({"tiers": [{"label": "big", "count": 1, "min_diameter": 5}],
                         "train": {"total_steps": 40, "batch_size": 256}})");
  r = run_cli("eval --mask-restore --input " + p("bundle") + " --config " + p("gaps.json"));
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("all_gaps") != std::string::npos);
  CHECK(run_cli("eval --input " + p("bundle")).exit_code == 1);

  r = run_cli("bench --json --model " + p("m.gndc") + " --input " + p("bundle") + " --runs 3 --scratch " +
              p("scratch"));
  REQUIRE(r.exit_code == 0);
  CHECK(json::parse(r.out).at("workloads").size() == 4);

  r = run_cli("frame --json --model " + p("m.gndc") + " --time 2020-01-06 --downsample 2 --output " + p("f.png"));
  REQUIRE(r.exit_code == 0);
  CHECK(fs::file_size(p("f.png")) == json::parse(r.out).at("bytes"));
}

TEST_CASE("data and model errors exit 2") {
  auto r = run_cli("query --model " + p("missing.gndc") + " --x 0 --y 0 --time 2020-01-01");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("MissingFile") != std::string::npos);
  write("junk.gndc", "GNDC but not really");
  CHECK(run_cli("inspect --model " + p("junk.gndc")).exit_code == 2);
  CHECK(run_cli("encode --input " + p("nobundle") + " --output " + p("n.gndc")).exit_code == 2);
  write("bad.json", R"({"train": {"total_steps": -1}})");
  CHECK(run_cli("encode --input " + p("bundle") + " --output " + p("n.gndc") + " --config " + p("bad.json"))
            .exit_code == 2);
  CHECK(run_cli("region --model " + p("m.gndc") + " --i0 0 --i1 99 --j0 0 --j1 2 --time 2020-01-06").exit_code == 2);
  CHECK(run_cli("serve --model " + p("missing.gndc") + " --port 0").exit_code == 2);
  CHECK(run_cli("serve --port 0").exit_code == 1);
}
