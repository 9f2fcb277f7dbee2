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

#include "gndc/gndc.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

#include "gndc/encoder.hpp"
#include "gndc/error.hpp"
#include "gndc/evaluate.hpp"
#include "gndc/format.hpp"
#include "gndc/query.hpp"
#include "gndc/render.hpp"
#include "gndc/synthetic.hpp"
#include "gndc/timeutil.hpp"

struct gndc_bundle {
  gndc::CubeBundle cube;
};

struct gndc_model {
  std::shared_ptr<const gndc::LoadedCube> cube;
  std::filesystem::path path;
};

namespace {

thread_local std::string last_error;

template <class F>
gndc_status try_(F&& f) {
  try {
    f();
    last_error.clear();
    return GNDC_OK;
  } catch (const gndc::Error& e) {
    last_error = e.what();
    return static_cast<gndc_status>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return GNDC_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return GNDC_INTERNAL;
  }
}

template <class T>
T& deref(T* p, const char* what) {
  if (p == nullptr) gndc::fail(gndc::ErrorCode::kInvalidArgument, std::string("null ") + what);
  return *p;
}

std::string str(const char* p, const char* what) {
  if (p == nullptr) gndc::fail(gndc::ErrorCode::kInvalidArgument, std::string("null ") + what);
  return p;
}

const gndc::LoadedCube& cube_of(const gndc_model* m) {
  if (m == nullptr || !m->cube) gndc::fail(gndc::ErrorCode::kModelNotLoaded, "model handle is not open");
  return *m->cube;
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put_string(char** out, const std::string& s) { deref(out, "output pointer") = dup_string(s); }

gndc_shape shape_of(const gndc::CubeMeta& meta) {
  return {meta.height, meta.width, meta.frames(), meta.channels()};
}

void copy_out(const std::vector<double>& values, const std::vector<gndc::Provenance>& flags, double* v,
              std::uint8_t* f, std::size_t capacity) {
  if (capacity < values.size()) gndc::fail(gndc::ErrorCode::kLengthMismatch, "output buffer too small");
  if (v == nullptr) gndc::fail(gndc::ErrorCode::kInvalidArgument, "null values buffer");
  std::memcpy(v, values.data(), values.size() * sizeof(double));
  if (f != nullptr) {
    for (std::size_t k = 0; k < flags.size(); ++k) f[k] = static_cast<std::uint8_t>(flags[k]);
  }
}

}  // namespace

extern "C" {

void gndc_free(void* p) { std::free(p); }

const char* gndc_version(void) { return "0.1.0"; }

const char* gndc_status_string(gndc_status s) { return gndc::error_name(static_cast<gndc::ErrorCode>(s)); }

const char* gndc_last_error(void) { return last_error.c_str(); }

gndc_status gndc_time_parse(const char* text, double* seconds) {
  return try_([&] { deref(seconds, "seconds") = gndc::parse_iso8601(str(text, "text")); });
}

gndc_status gndc_time_format(double seconds, char** text) {
  return try_([&] { put_string(text, gndc::format_iso8601(seconds)); });
}

gndc_status gndc_bundle_load(const char* dir, gndc_bundle** out) {
  return try_([&] {
    auto b = std::make_unique<gndc_bundle>();
    b->cube = gndc::load_bundle(str(dir, "dir"));
    deref(out, "output pointer") = b.release();
  });
}

gndc_status gndc_bundle_synthetic(const char* kind, gndc_shape shape, uint64_t seed, gndc_bundle** out) {
  return try_([&] {
    const std::string k = str(kind, "kind");
    if (shape.height == 0 || shape.width == 0 || shape.frames == 0 || shape.channels == 0) {
      gndc::fail(gndc::ErrorCode::kInvalidArgument, "synthetic shape must be positive");
    }
    auto b = std::make_unique<gndc_bundle>();
    if (k == "sinusoid") {
      b->cube = gndc::sinusoid_cube(shape.height, shape.width, shape.frames, shape.channels);
    } else if (k == "seasonal") {
      b->cube = gndc::seasonal_cube(shape.height, shape.width, shape.frames, shape.channels, seed);
    } else if (k == "textured") {
      b->cube = gndc::textured_cube(shape.height, shape.width, shape.frames, shape.channels, seed);
    } else {
      gndc::fail(gndc::ErrorCode::kInvalidArgument, "unknown synthetic kind '" + k + "'");
    }
    deref(out, "output pointer") = b.release();
  });
}

gndc_status gndc_bundle_save(const gndc_bundle* b, const char* dir) {
  return try_([&] { gndc::save_bundle(deref(b, "bundle").cube, str(dir, "dir")); });
}

gndc_status gndc_bundle_shape(const gndc_bundle* b, gndc_shape* shape) {
  return try_([&] { deref(shape, "shape") = shape_of(deref(b, "bundle").cube.meta); });
}

gndc_status gndc_bundle_add_clouds(gndc_bundle* b, size_t t, double coverage, double radius_px, uint64_t seed) {
  return try_([&] {
    auto& cube = deref(b, "bundle").cube;
    if (t >= cube.meta.frames()) gndc::fail(gndc::ErrorCode::kIndexOutOfRange, "frame index out of range");
    gndc::Rng rng(seed);
    gndc::add_cloud_discs(cube, t, coverage, radius_px, rng);
  });
}

void gndc_bundle_free(gndc_bundle* b) { delete b; }

gndc_status gndc_encode(const gndc_bundle* b, const char* config_json, const char* out_path, char** report_json) {
  return try_([&] {
    const auto cfg = gndc::parse_encode_config(config_json ? config_json : "{}");
    const auto r = gndc::encode_to_file(deref(b, "bundle").cube, cfg, str(out_path, "output path"));
    if (report_json != nullptr) *report_json = dup_string(gndc::encode_report_json(r));
  });
}

gndc_status gndc_model_open(const char* path, gndc_model** out) {
  return try_([&] {
    auto m = std::make_unique<gndc_model>();
    m->path = str(path, "path");
    m->cube = gndc::LoadedCube::open(m->path);
    deref(out, "output pointer") = m.release();
  });
}

void gndc_model_close(gndc_model* m) { delete m; }

gndc_status gndc_model_shape(const gndc_model* m, gndc_shape* shape) {
  return try_([&] { deref(shape, "shape") = shape_of(cube_of(m).meta()); });
}

gndc_status gndc_model_meta_json(const gndc_model* m, char** out) {
  return try_([&] { put_string(out, gndc::meta_json(cube_of(m), m->path)); });
}

gndc_status gndc_inspect(const char* path, int as_json, char** out) {
  return try_([&] {
    const auto s = gndc::inspect(str(path, "path"));
    put_string(out, as_json ? gndc::inspect_json(s) : gndc::inspect_text(s));
  });
}

gndc_status gndc_query_point(const gndc_model* m, double x, double y, double seconds, double* values,
                             uint8_t* flags, size_t channels, double* time_out) {
  return try_([&] {
    const auto r = cube_of(m).query_point(x, y, seconds);
    copy_out(r.values, r.flags, values, flags, channels);
    if (time_out != nullptr) *time_out = r.time;
  });
}

gndc_status gndc_query_region(const gndc_model* m, size_t i0, size_t i1, size_t j0, size_t j1, double seconds,
                              double* values, uint8_t* flags, size_t capacity) {
  return try_([&] {
    const auto r = cube_of(m).query_region({i0, i1, j0, j1}, seconds);
    copy_out(r.values, r.flags, values, flags, capacity);
  });
}

gndc_status gndc_query_point_json(const gndc_model* m, double x, double y, double seconds, char** out) {
  return try_([&] {
    const auto& c = cube_of(m);
    put_string(out, gndc::query_result_json(c, c.query_point(x, y, seconds)));
  });
}

gndc_status gndc_query_region_json(const gndc_model* m, size_t i0, size_t i1, size_t j0, size_t j1, double seconds,
                                   char** out) {
  return try_([&] {
    const auto& c = cube_of(m);
    put_string(out, gndc::region_json(c, c.query_region({i0, i1, j0, j1}, seconds)));
  });
}

gndc_status gndc_query_timeseries_json(const gndc_model* m, double x, double y, size_t n, char** out) {
  return try_([&] {
    const auto& c = cube_of(m);
    const auto rs = n == 0 ? c.query_timeseries(x, y) : c.query_timeseries(x, y, n);
    put_string(out, gndc::timeseries_json(c, x, y, rs));
  });
}

gndc_status gndc_query_derivative_json(const gndc_model* m, size_t i0, size_t i1, size_t j0, size_t j1,
                                       double seconds, char** out) {
  return try_([&] {
    const auto& c = cube_of(m);
    put_string(out, gndc::derivative_json(c, c.query_derivative({i0, i1, j0, j1}, seconds)));
  });
}

gndc_render_options gndc_render_defaults(void) {
  gndc_render_options o{};
  o.downsample = 1;
  o.band_count = 1;
  o.colormap = "viridis";
  o.vmin = std::nan("");
  o.vmax = std::nan("");
  return o;
}

gndc_status gndc_render_pixels(const gndc_model* m, size_t downsample, size_t* pixels) {
  return try_([&] { deref(pixels, "pixels") = gndc::rendered_pixels(cube_of(m).meta(), downsample); });
}

gndc_status gndc_render_png(const gndc_model* m, double seconds, const gndc_render_options* opt, uint8_t** png,
                            size_t* length) {
  return try_([&] {
    const auto& o = deref(opt, "options");
    if (o.band_count > 3) gndc::fail(gndc::ErrorCode::kInvalidArgument, "at most 3 bands");
    gndc::FrameRenderOptions ro;
    ro.downsample = o.downsample;
    ro.bands.assign(o.bands, o.bands + o.band_count);
    if (o.colormap != nullptr) ro.colormap = o.colormap;
    if (o.vmax > o.vmin) {
      ro.vmin = o.vmin;
      ro.vmax = o.vmax;
    }
    const auto bytes = gndc::encode_png(gndc::render_frame(cube_of(m), seconds, ro));
    auto* buf = static_cast<std::uint8_t*>(std::malloc(bytes.size()));
    if (buf == nullptr) throw std::bad_alloc();
    std::memcpy(buf, bytes.data(), bytes.size());
    deref(length, "length") = bytes.size();
    deref(png, "output pointer") = buf;
  });
}

gndc_status gndc_eval(const gndc_model* m, const gndc_bundle* reference, int as_json, char** out) {
  return try_([&] {
    const auto r = gndc::evaluate_model(cube_of(m), deref(reference, "bundle").cube);
    put_string(out, as_json ? gndc::fidelity_json(r) : gndc::fidelity_table(r));
  });
}

gndc_status gndc_mask_restore(const gndc_bundle* b, const char* config_json, int as_json, char** out) {
  return try_([&] {
    const auto& cube = deref(b, "bundle").cube;
    const auto cfg = gndc::parse_mask_restore_config(config_json ? config_json : "", cube.meta);
    const auto r = gndc::mask_and_restore(cube, cfg.target, cfg.field, cfg.train, cfg.gaps);
    put_string(out, as_json ? gndc::mask_restore_json(r) : gndc::mask_restore_table(r));
  });
}

gndc_status gndc_bench(const char* model_path, const gndc_bundle* source, const char* scratch_dir, size_t runs,
                       size_t region_size, int as_json, char** out) {
  return try_([&] {
    gndc::BenchConfig cfg;
    if (runs > 0) cfg.runs = runs;
    if (region_size > 0) cfg.region_size = region_size;
    const auto r = gndc::bench_queries(str(model_path, "model path"), deref(source, "bundle").cube,
                                       str(scratch_dir, "scratch dir"), cfg);
    put_string(out, as_json ? gndc::bench_json(r) : gndc::bench_table(r));
  });
}

}  // extern "C"
