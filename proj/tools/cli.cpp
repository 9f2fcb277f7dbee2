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

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gndc/gndc.h"
#include "json.hpp"
#include "service.hpp"

namespace {

using nlohmann::json;

constexpr int kUsage = 1;
constexpr int kData = 2;

struct Failure {
  int code;
  std::string message;
};

void check(gndc_status s) {
  if (s != GNDC_OK) throw Failure{kData, std::string(gndc_status_string(s)) + ": " + gndc_last_error()};
}

std::string take(char* p) {
  std::string s(p);
  gndc_free(p);
  return s;
}

double parse_time(const std::string& text) {
  double s = 0.0;
  if (gndc_time_parse(text.c_str(), &s) != GNDC_OK) throw Failure{kUsage, "bad time '" + text + "': " + gndc_last_error()};
  return s;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kData, "cannot read '" + path + "'"};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Model {
  gndc_model* m = nullptr;
  explicit Model(const std::string& path) { check(gndc_model_open(path.c_str(), &m)); }
  ~Model() { gndc_model_close(m); }
};

struct Bundle {
  gndc_bundle* b = nullptr;
  explicit Bundle(const std::string& dir) { check(gndc_bundle_load(dir.c_str(), &b)); }
  Bundle() = default;
  ~Bundle() { gndc_bundle_free(b); }
};

std::string num(const json& v) {
  if (v.is_null()) return "n/a";
  std::ostringstream os;
  os << std::setprecision(8) << v.get<double>();
  return os.str();
}

void print_values(const json& j) {
  const auto& bands = j.at("bands");
  for (std::size_t c = 0; c < bands.size(); ++c) {
    std::cout << "  " << std::left << std::setw(14) << bands[c].get<std::string>() << std::setw(18)
              << num(j.at("values")[c]) << j.at("flags")[c].get<std::string>() << '\n';
  }
}

struct Window {
  std::size_t i0 = 0, i1 = 0, j0 = 0, j1 = 0;
  void add(CLI::App* cmd) {
    cmd->add_option("--i0", i0, "First row")->required();
    cmd->add_option("--i1", i1, "Row past the end")->required();
    cmd->add_option("--j0", j0, "First column")->required();
    cmd->add_option("--j1", j1, "Column past the end")->required();
  }
};

gndc_tools::QueryService* active_service = nullptr;

void on_signal(int) {
  if (active_service != nullptr) active_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Queryable neural data cube: encode, inspect, query and serve .gndc models", "gndc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gndc_version()));
  bool as_json = false;

  std::string model, input, output, config, time_text, trace_csv, scratch = "/tmp/gndc_bench";
  double x = 0.0, y = 0.0;
  std::size_t n = 0, runs = 0, region = 0;
  Window win;

  auto* encode = app.add_subcommand("encode", "Train a field on a bundle and write a .gndc model");
  encode->add_option("--input", input, "Bundle directory")->required();
  encode->add_option("--output", output, "Output .gndc path")->required();
  encode->add_option("--config", config, "Encode config JSON file");
  encode->add_option("--trace-csv", trace_csv, "Write the loss trace as CSV");

  auto* query = app.add_subcommand("query", "Values and provenance at one coordinate and time");
  query->add_option("--model", model, "Model path")->required();
  query->add_option("--x", x, "X in CRS units")->required();
  query->add_option("--y", y, "Y in CRS units")->required();
  query->add_option("--time", time_text, "ISO-8601 time")->required();

  auto* reg = app.add_subcommand("region", "Values over a pixel window at one time");
  reg->add_option("--model", model, "Model path")->required();
  win.add(reg);
  reg->add_option("--time", time_text, "ISO-8601 time")->required();

  auto* series = app.add_subcommand("timeseries", "Time series at one coordinate");
  series->add_option("--model", model, "Model path")->required();
  series->add_option("--x", x, "X in CRS units")->required();
  series->add_option("--y", y, "Y in CRS units")->required();
  series->add_option("--n", n, "Evenly spaced instants (default: native timestamps)");

  auto* deriv = app.add_subcommand("derivative", "Temporal derivative over a pixel window");
  deriv->add_option("--model", model, "Model path")->required();
  win.add(deriv);
  deriv->add_option("--time", time_text, "ISO-8601 time")->required();

  bool mask_restore = false;
  auto* eval = app.add_subcommand("eval", "Score a model against a bundle, or run the gap-masking experiment");
  eval->add_option("--model", model, "Model path");
  eval->add_option("--input", input, "Reference bundle directory")->required();
  eval->add_flag("--mask-restore", mask_restore, "Mask circular gaps in one frame, train, and score restoration");
  eval->add_option("--config", config, "Mask-restore config JSON file");

  auto* insp = app.add_subcommand("inspect", "Header summary of a .gndc model");
  insp->add_option("--model", model, "Model path")->required();

  auto* bench = app.add_subcommand("bench", "Query latency against a frame-per-file baseline");
  bench->add_option("--model", model, "Model path")->required();
  bench->add_option("--input", input, "Source bundle directory")->required();
  bench->add_option("--scratch", scratch, "Scratch directory for baseline frames")->capture_default_str();
  bench->add_option("--runs", runs, "Repetitions per workload");
  bench->add_option("--region", region, "Region edge in pixels");

  std::string serve_config, bind;
  int port = -1;
  auto* serve = app.add_subcommand("serve", "HTTP query service");
  serve->add_option("--config", serve_config, "Service config JSON file");
  serve->add_option("--model", model, "Model path (overrides config and GNDC_MODEL)");
  serve->add_option("--port", port, "Port (overrides config and GNDC_PORT)");
  serve->add_option("--bind", bind, "Bind address");

  std::string kind = "seasonal";
  gndc_shape shape{32, 32, 8, 2};
  std::uint64_t seed = 0;
  double clouds = 0.0;
  auto* synth = app.add_subcommand("synth", "Write a synthetic bundle");
  synth->add_option("--kind", kind, "sinusoid, seasonal or textured")
      ->check(CLI::IsMember({"sinusoid", "seasonal", "textured"}));
  synth->add_option("--height", shape.height, "Rows");
  synth->add_option("--width", shape.width, "Columns");
  synth->add_option("--frames", shape.frames, "Frames");
  synth->add_option("--channels", shape.channels, "Bands");
  synth->add_option("--seed", seed, "Random seed");
  synth->add_option("--clouds", clouds, "Masked fraction per frame")->check(CLI::Range(0.0, 0.9));
  synth->add_option("--output", output, "Output directory")->required();

  auto opt = gndc_render_defaults();
  std::string bands_text, cmap;
  auto* frame = app.add_subcommand("frame", "Render one frame as PNG");
  frame->add_option("--model", model, "Model path")->required();
  frame->add_option("--time", time_text, "ISO-8601 time")->required();
  frame->add_option("--downsample", opt.downsample, "Keep every k-th pixel");
  frame->add_option("--bands", bands_text, "One band or three comma-separated bands");
  frame->add_option("--colormap", cmap, "viridis or gray");
  frame->add_option("--output", output, "Output PNG path")->required();

  for (auto* sub : app.get_subcommands({})) sub->add_flag("--json", as_json, "Machine-readable JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*encode) {
      Bundle b(input);
      char* report = nullptr;
      const std::string cfg = config.empty() ? "{}" : read_text(config);
      check(gndc_encode(b.b, cfg.c_str(), output.c_str(), &report));
      const auto text = take(report);
      const auto j = json::parse(text);
      if (!trace_csv.empty()) {
        std::ofstream out(trace_csv);
        out << "step,loss\n";
        for (const auto& p : j.at("loss_trace")) out << p[0].get<std::size_t>() << ',' << num(p[1]) << '\n';
        if (!out) throw Failure{kData, "cannot write '" + trace_csv + "'"};
      }
      if (as_json) {
        std::cout << text << '\n';
      } else {
        std::cout << "wrote " << output << " (" << j.at("file_bytes") << " bytes)\n"
                  << "final loss " << num(j.at("final_loss")) << ", compression ratio "
                  << num(j.at("compression_ratio")) << ":1, residuals " << j.at("residual_count") << '\n';
      }
    } else if (*query) {
      const double t = parse_time(time_text);
      Model m(model);
      const auto text = [&] {
        char* out = nullptr;
        check(gndc_query_point_json(m.m, x, y, t, &out));
        return take(out);
      }();
      if (as_json) {
        std::cout << text << '\n';
      } else {
        const auto j = json::parse(text);
        std::cout << "time " << j.at("time").get<std::string>() << '\n';
        print_values(j);
      }
    } else if (*reg || *deriv) {
      const double t = parse_time(time_text);
      Model m(model);
      char* out = nullptr;
      if (*reg) {
        check(gndc_query_region_json(m.m, win.i0, win.i1, win.j0, win.j1, t, &out));
      } else {
        check(gndc_query_derivative_json(m.m, win.i0, win.i1, win.j0, win.j1, t, &out));
      }
      const auto text = take(out);
      if (as_json) {
        std::cout << text << '\n';
      } else {
        const auto j = json::parse(text);
        const auto& bands = j.at("bands");
        const std::size_t C = bands.size(), cols = win.j1 - win.j0;
        std::cout << "time " << j.at("time").get<std::string>() << ", window rows [" << win.i0 << ", " << win.i1
                  << ") cols [" << win.j0 << ", " << win.j1 << ")\n";
        if (*deriv) std::cout << "units " << j.at("units").get<std::string>() << '\n';
        for (std::size_t c = 0; c < C; ++c) {
          std::cout << bands[c].get<std::string>() << ":\n";
          const auto& v = j.at("values");
          for (std::size_t a = 0; a < win.i1 - win.i0; ++a) {
            for (std::size_t b = 0; b < cols; ++b) std::cout << ' ' << std::setw(12) << num(v[(a * cols + b) * C + c]);
            std::cout << '\n';
          }
        }
      }
    } else if (*series) {
      Model m(model);
      char* out = nullptr;
      check(gndc_query_timeseries_json(m.m, x, y, n, &out));
      const auto text = take(out);
      if (as_json) {
        std::cout << text << '\n';
      } else {
        const auto j = json::parse(text);
        const auto& bands = j.at("bands");
        std::cout << std::left << std::setw(26) << "time";
        for (const auto& b : bands) std::cout << std::setw(16) << b.get<std::string>() << std::setw(14) << "flag";
        std::cout << '\n';
        for (std::size_t k = 0; k < j.at("times").size(); ++k) {
          std::cout << std::setw(26) << j["times"][k].get<std::string>();
          for (std::size_t c = 0; c < bands.size(); ++c) {
            std::cout << std::setw(16) << num(j["values"][k][c]) << std::setw(14) << j["flags"][k][c].get<std::string>();
          }
          std::cout << '\n';
        }
      }
    } else if (*eval) {
      Bundle b(input);
      char* out = nullptr;
      if (mask_restore) {
        const std::string cfg = config.empty() ? "" : read_text(config);
        check(gndc_mask_restore(b.b, cfg.empty() ? nullptr : cfg.c_str(), as_json, &out));
      } else {
        if (model.empty()) throw Failure{kUsage, "eval needs --model unless --mask-restore is given"};
        Model m(model);
        check(gndc_eval(m.m, b.b, as_json, &out));
      }
      std::cout << take(out);
      if (as_json) std::cout << '\n';
    } else if (*insp) {
      char* out = nullptr;
      check(gndc_inspect(model.c_str(), as_json, &out));
      std::cout << take(out);
      if (as_json) std::cout << '\n';
    } else if (*bench) {
      Bundle b(input);
      char* out = nullptr;
      check(gndc_bench(model.c_str(), b.b, scratch.c_str(), runs, region, as_json, &out));
      std::cout << take(out);
      if (as_json) std::cout << '\n';
    } else if (*serve) {
      gndc_tools::ServiceConfig cfg;
      try {
        cfg = gndc_tools::load_service_config(serve_config);
        if (!model.empty()) cfg.model = model;
        if (port >= 0) cfg.port = port;
        if (!bind.empty()) cfg.bind = bind;
        gndc_tools::validate(cfg);
      } catch (const std::invalid_argument& e) {
        throw Failure{kUsage, e.what()};
      }
      std::unique_ptr<gndc_tools::QueryService> svc;
      try {
        svc = std::make_unique<gndc_tools::QueryService>(cfg);
      } catch (const std::exception& e) {
        throw Failure{kData, e.what()};
      }
      const int bound = svc->bind();
      active_service = svc.get();
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "serving " << cfg.model << " on http://" << cfg.bind << ':' << bound << std::endl;
      svc->listen_after_bind();
      active_service = nullptr;
    } else if (*synth) {
      Bundle b;
      check(gndc_bundle_synthetic(kind.c_str(), shape, seed, &b.b));
      if (clouds > 0.0) {
        for (std::size_t t = 0; t < shape.frames; ++t) {
          check(gndc_bundle_add_clouds(b.b, t, clouds, std::max<double>(1.0, double(shape.height) / 10), seed + t + 1));
        }
      }
      check(gndc_bundle_save(b.b, output.c_str()));
      if (as_json) {
        std::cout << json{{"output", output}, {"kind", kind}, {"height", shape.height}, {"width", shape.width},
                          {"frames", shape.frames}, {"channels", shape.channels}}
                         .dump()
                  << '\n';
      } else {
        std::cout << "wrote " << kind << " bundle " << shape.height << "x" << shape.width << "x" << shape.frames << "x"
                  << shape.channels << " to " << output << '\n';
      }
    } else if (*frame) {
      const double t = parse_time(time_text);
      if (!bands_text.empty()) {
        std::stringstream ss(bands_text);
        std::string item;
        opt.band_count = 0;
        while (std::getline(ss, item, ',')) {
          if (opt.band_count == 3) throw Failure{kUsage, "--bands takes one or three bands"};
          try {
            opt.bands[opt.band_count++] = std::stoul(item);
          } catch (const std::exception&) {
            throw Failure{kUsage, "bad band '" + item + "'"};
          }
        }
      }
      if (!cmap.empty()) opt.colormap = cmap.c_str();
      Model m(model);
      std::uint8_t* png = nullptr;
      std::size_t len = 0;
      check(gndc_render_png(m.m, t, &opt, &png, &len));
      std::ofstream out(output, std::ios::binary);
      out.write(reinterpret_cast<const char*>(png), static_cast<std::streamsize>(len));
      gndc_free(png);
      if (!out) throw Failure{kData, "cannot write '" + output + "'"};
      if (as_json) {
        std::cout << json{{"output", output}, {"bytes", len}}.dump() << '\n';
      } else {
        std::cout << "wrote " << output << " (" << len << " bytes)\n";
      }
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    if (f.code == kUsage) std::cerr << '\n' << app.help();
    return f.code;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return 0;
}
