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

#include "gndc/query.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gndc/bytes.hpp"
#include "gndc/error.hpp"
#include "gndc/rng.hpp"
#include "gndc/timeutil.hpp"
#include "json.hpp"

namespace gndc {

using nlohmann::json;

namespace {

constexpr double kSnapEps = 1e-9;

template <typename Fn>
decltype(auto) with_params(const StoredParams& p, Fn&& fn) {
  return std::visit(std::forward<Fn>(fn), p);
}

}  // namespace

const char* provenance_name(Provenance p) {
  return p == Provenance::kObserved ? "observed" : "reconstructed";
}

LoadedCube::LoadedCube(GndcModel model)
    : meta_(std::move(model.meta)),
      norm_(std::move(model.norm)),
      field_(model.field),
      params_(std::move(model.params)),
      residuals_(std::move(model.residuals)) {
  if (model.mask) {
    mask_bits_.assign((model.mask->size() + 63) / 64, 0);
    for (std::size_t k = 0; k < model.mask->size(); ++k) {
      if ((*model.mask)[k]) mask_bits_[k >> 6] |= std::uint64_t{1} << (k & 63);
    }
  }
}

std::shared_ptr<const LoadedCube> LoadedCube::open(const std::filesystem::path& path) {
  return std::make_shared<const LoadedCube>(read_gndc(path));
}

std::size_t LoadedCube::parameter_bytes() const {
  return with_params(params_, [](const auto& p) {
    std::size_t n = 0;
    for_each_tensor(p, [&](TensorKind, std::size_t, auto span) { n += span.size_bytes(); });
    return n;
  });
}

std::size_t LoadedCube::resident_bytes() const {
  std::size_t n = parameter_bytes() + mask_bits_.size() * sizeof(std::uint64_t);
  if (residuals_) n += residuals_->size() * (sizeof(std::uint64_t) + sizeof(std::int64_t));
  return n;
}

void LoadedCube::evaluate(std::span<const Coord> coords, std::span<float> out) const {
  with_params(params_, [&](const auto& p) { forward(p, coords, out); });
}

void LoadedCube::evaluate_time_partial(std::span<const Coord> coords, std::span<float> out) const {
  with_params(params_, [&](const auto& p) { time_partial(p, coords, out); });
}

bool LoadedCube::valid(std::size_t i, std::size_t j, std::size_t t) const {
  if (mask_bits_.empty()) return false;
  const std::size_t k = (i * meta_.width + j) * meta_.frames() + t;
  return (mask_bits_[k >> 6] >> (k & 63)) & 1u;
}

std::optional<std::size_t> LoadedCube::frame_at(double seconds) const {
  const auto& ts = meta_.timestamps;
  const auto it = std::lower_bound(ts.begin(), ts.end(), seconds,
                                   [](std::int64_t a, double s) { return static_cast<double>(a) < s; });
  if (it == ts.end() || static_cast<double>(*it) != seconds) return std::nullopt;
  return static_cast<std::size_t>(it - ts.begin());
}

double LoadedCube::physical(std::size_t c, double normalized) const {
  return norm_.denormalize_value(c, normalized) * meta_.value_scale[c] + meta_.value_offset[c];
}

QueryResult LoadedCube::query_voxel(std::size_t i, std::size_t j, std::size_t t) const {
  if (i >= meta_.height || j >= meta_.width || t >= meta_.frames()) {
    fail(ErrorCode::kIndexOutOfRange, "voxel index out of range");
  }
  const PixelWindow w{i, i + 1, j, j + 1};
  RegionResult r = region_impl(w, frame_time(norm_, meta_, t), t, static_cast<double>(meta_.timestamps[t]));
  return {r.time, std::move(r.values), std::move(r.flags)};
}

QueryResult LoadedCube::query_point(double x, double y, double seconds) const {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(seconds)) {
    fail(ErrorCode::kInvalidArgument, "query coordinates must be finite");
  }
  double nx = norm_.crs_to_x(x);
  double ny = norm_.crs_to_y(y);
  const double first = static_cast<double>(meta_.timestamps.front());
  const double last = static_cast<double>(meta_.timestamps.back());
  const bool outside = nx < 0.0 || nx > 1.0 || ny < 0.0 || ny > 1.0 || seconds < first || seconds > last;
  nx = std::clamp(nx, 0.0, 1.0);
  ny = std::clamp(ny, 0.0, 1.0);
  const double secs = std::clamp(seconds, first, last);
  const auto W = static_cast<double>(meta_.width);
  const auto H = static_cast<double>(meta_.height);
  const std::size_t j = std::min(meta_.width - 1, static_cast<std::size_t>(nx * W));
  const std::size_t i = std::min(meta_.height - 1, static_cast<std::size_t>(ny * H));
  // Coordinates that are a cell centre up to round-off evaluate exactly there.
  if (std::abs(nx - norm_.pixel_to_x(static_cast<double>(j))) <= kSnapEps) nx = norm_.pixel_to_x(static_cast<double>(j));
  if (std::abs(ny - norm_.pixel_to_y(static_cast<double>(i))) <= kSnapEps) ny = norm_.pixel_to_y(static_cast<double>(i));

  if (!outside) {
    if (const auto frame = frame_at(secs)) return query_voxel(i, j, *frame);
  }
  const Coord c{nx, ny, norm_.time_to_t(secs)};
  const std::size_t channels = meta_.channels();
  std::vector<float> pred(channels);
  evaluate(std::span<const Coord>(&c, 1), pred);
  QueryResult r;
  r.time = secs;
  r.values.resize(channels);
  r.flags.assign(channels, Provenance::kReconstructed);
  for (std::size_t ch = 0; ch < channels; ++ch) r.values[ch] = physical(ch, static_cast<double>(pred[ch]));
  return r;
}

void LoadedCube::check_window(const PixelWindow& w) const {
  if (w.i0 >= w.i1 || w.j0 >= w.j1 || w.i1 > meta_.height || w.j1 > meta_.width) {
    fail(ErrorCode::kWindowOutOfBounds, "pixel window is empty or outside the cube");
  }
}

RegionResult LoadedCube::region_impl(const PixelWindow& w, double t_norm, std::optional<std::size_t> frame,
                                     double seconds) const {
  const std::size_t channels = meta_.channels();
  const std::size_t n = w.pixels();
  std::vector<Coord> coords(n);
  for (std::size_t a = 0; a < w.rows(); ++a) {
    const double y = norm_.pixel_to_y(static_cast<double>(w.i0 + a));
    for (std::size_t b = 0; b < w.cols(); ++b) {
      coords[a * w.cols() + b] = {norm_.pixel_to_x(static_cast<double>(w.j0 + b)), y, t_norm};
    }
  }
  std::vector<float> pred(n * channels);
  evaluate(coords, pred);
  coords.clear();
  coords.shrink_to_fit();

  RegionResult r;
  r.window = w;
  r.channels = channels;
  r.time = seconds;
  r.values.resize(n * channels);
  r.flags.assign(n * channels, Provenance::kReconstructed);
  for (std::size_t a = 0; a < w.rows(); ++a) {
    for (std::size_t b = 0; b < w.cols(); ++b) {
      const std::size_t cell = a * w.cols() + b;
      // Residuals apply on the grid; the Observed flag needs the mask.
      const bool observed = frame && valid(w.i0 + a, w.j0 + b, *frame);
      const bool correct = frame && residuals_ && (observed || mask_bits_.empty());
      const std::uint64_t base =
          correct ? (((w.i0 + a) * meta_.width + (w.j0 + b)) * meta_.frames() + *frame) * channels : 0;
      for (std::size_t c = 0; c < channels; ++c) {
        double v = static_cast<double>(pred[cell * channels + c]);
        if (correct) {
          if (const auto code = residuals_->find(base + c)) v += residuals_->quant_step * static_cast<double>(*code);
        }
        if (observed) r.flags[cell * channels + c] = Provenance::kObserved;
        r.values[cell * channels + c] = physical(c, v);
      }
    }
  }
  return r;
}

RegionResult LoadedCube::query_region(const PixelWindow& w, double seconds) const {
  check_window(w);
  if (!std::isfinite(seconds)) fail(ErrorCode::kInvalidArgument, "query time must be finite");
  const double first = static_cast<double>(meta_.timestamps.front());
  const double last = static_cast<double>(meta_.timestamps.back());
  const double secs = std::clamp(seconds, first, last);
  const bool inside = secs == seconds;
  const auto frame = inside ? frame_at(secs) : std::nullopt;
  if (frame) return region_impl(w, frame_time(norm_, meta_, *frame), frame, secs);
  return region_impl(w, norm_.time_to_t(secs), std::nullopt, secs);
}

RegionResult LoadedCube::query_region_frame(const PixelWindow& w, std::size_t t) const {
  check_window(w);
  if (t >= meta_.frames()) fail(ErrorCode::kIndexOutOfRange, "frame index out of range");
  return region_impl(w, frame_time(norm_, meta_, t), t, static_cast<double>(meta_.timestamps[t]));
}

std::vector<QueryResult> LoadedCube::query_timeseries(double x, double y) const {
  std::vector<QueryResult> out;
  out.reserve(meta_.frames());
  for (auto ts : meta_.timestamps) out.push_back(query_point(x, y, static_cast<double>(ts)));
  return out;
}

std::vector<QueryResult> LoadedCube::query_timeseries(double x, double y, std::size_t n) const {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "time series needs n >= 1");
  const double first = static_cast<double>(meta_.timestamps.front());
  const double last = static_cast<double>(meta_.timestamps.back());
  std::vector<QueryResult> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = n == 1 ? first
                     : k + 1 == n ? last
                                  : first + (last - first) * static_cast<double>(k) / static_cast<double>(n - 1);
    out.push_back(query_point(x, y, s));
  }
  return out;
}

RegionResult LoadedCube::query_derivative(const PixelWindow& w, double seconds) const {
  check_window(w);
  if (!std::isfinite(seconds)) fail(ErrorCode::kInvalidArgument, "query time must be finite");
  const double first = static_cast<double>(meta_.timestamps.front());
  const double last = static_cast<double>(meta_.timestamps.back());
  const double secs = std::clamp(seconds, first, last);
  double t = norm_.time_to_t(secs);
  if (const auto frame = frame_at(secs)) t = frame_time(norm_, meta_, *frame);
  if (on_temporal_boundary(field_, t)) t += 1e-9;

  const std::size_t channels = meta_.channels();
  std::vector<Coord> coords(w.pixels());
  for (std::size_t a = 0; a < w.rows(); ++a) {
    for (std::size_t b = 0; b < w.cols(); ++b) {
      coords[a * w.cols() + b] = {norm_.pixel_to_x(static_cast<double>(w.j0 + b)),
                                  norm_.pixel_to_y(static_cast<double>(w.i0 + a)), t};
    }
  }
  std::vector<float> d(w.pixels() * channels);
  evaluate_time_partial(coords, d);
  RegionResult r;
  r.window = w;
  r.channels = channels;
  r.time = secs;
  r.values.resize(d.size());
  r.flags.assign(d.size(), Provenance::kReconstructed);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const std::size_t c = k % channels;
    r.values[k] = static_cast<double>(d[k]) * norm_.value_range(c) * meta_.value_scale[c];
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

json flags_json(std::span<const Provenance> flags) {
  json a = json::array();
  for (auto f : flags) a.push_back(provenance_name(f));
  return a;
}

json window_json(const PixelWindow& w) {
  return {{"i0", w.i0}, {"i1", w.i1}, {"j0", w.j0}, {"j1", w.j1}};
}

}  // namespace

std::string query_result_json(const LoadedCube& cube, const QueryResult& r) {
  json j;
  j["time"] = format_iso8601(r.time);
  j["bands"] = cube.meta().band_names;
  j["values"] = r.values;
  j["flags"] = flags_json(r.flags);
  return j.dump();
}

std::string timeseries_json(const LoadedCube& cube, double x, double y, const std::vector<QueryResult>& rs) {
  json j;
  j["x"] = x;
  j["y"] = y;
  j["bands"] = cube.meta().band_names;
  json times = json::array(), values = json::array(), flags = json::array();
  for (const auto& r : rs) {
    times.push_back(format_iso8601(r.time));
    values.push_back(r.values);
    flags.push_back(flags_json(r.flags));
  }
  j["times"] = times;
  j["values"] = values;
  j["flags"] = flags;
  return j.dump();
}

std::string region_json(const LoadedCube& cube, const RegionResult& r) {
  json j;
  j["window"] = window_json(r.window);
  j["time"] = format_iso8601(r.time);
  j["bands"] = cube.meta().band_names;
  j["shape"] = {r.window.rows(), r.window.cols(), r.channels};
  j["values"] = r.values;
  j["flags"] = flags_json(r.flags);
  return j.dump();
}

std::string derivative_json(const LoadedCube& cube, const RegionResult& r) {
  json j;
  j["window"] = window_json(r.window);
  j["time"] = format_iso8601(r.time);
  j["bands"] = cube.meta().band_names;
  j["shape"] = {r.window.rows(), r.window.cols(), r.channels};
  j["units"] = "physical per unit normalized time";
  const auto& ts = cube.meta().timestamps;
  j["seconds_per_unit_time"] = static_cast<double>(ts.back() - ts.front());
  j["values"] = r.values;
  return j.dump();
}

std::string meta_json(const LoadedCube&, const std::filesystem::path& path) {
  return inspect_json(inspect(path));
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

LatencyStats summarize(std::string name, std::vector<double> ms, std::size_t frames_read) {
  std::sort(ms.begin(), ms.end());
  LatencyStats s;
  s.name = std::move(name);
  s.runs = ms.size();
  s.frames_read = frames_read;
  if (!ms.empty()) {
    s.p50_ms = ms[ms.size() / 2];
    const auto k = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(ms.size())));
    s.p95_ms = ms[std::min(ms.size() - 1, k == 0 ? 0 : k - 1)];
  }
  return s;
}

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

BenchReport bench_queries(const std::filesystem::path& model_path, const CubeBundle& source,
                          const std::filesystem::path& scratch_dir, const BenchConfig& cfg) {
  const auto& m = source.meta;
  const std::size_t H = m.height, W = m.width, T = m.frames(), C = m.channels();
  std::error_code ec;
  std::filesystem::create_directories(scratch_dir, ec);
  if (ec) fail(ErrorCode::kIoFailure, "cannot create " + scratch_dir.string());
  auto frame_path = [&](std::size_t t) { return scratch_dir / ("frame_" + std::to_string(t) + ".f32"); };
  for (std::size_t t = 0; t < T; ++t) {
    ByteWriter w;
    for (std::size_t i = 0; i < H; ++i) {
      for (std::size_t j = 0; j < W; ++j) {
        for (std::size_t c = 0; c < C; ++c) w.f32(source.value(i, j, t, c));
      }
    }
    write_file(frame_path(t), w.bytes());
  }

  const auto cube = LoadedCube::open(model_path);
  if (!(cube->meta() == m)) fail(ErrorCode::kInvalidArgument, "bench source does not match the model");
  Rng rng(cfg.seed);
  const std::size_t edge_h = std::min(cfg.region_size, H);
  const std::size_t edge_w = std::min(cfg.region_size, W);

  std::vector<double> neural_series, neural_region, base_series, base_region;
  std::size_t sink = 0;
  for (std::size_t run = 0; run < cfg.runs; ++run) {
    const std::size_t i = rng.below(H), j = rng.below(W), t = rng.below(T);
    const double x = cube->norm().x_to_crs(cube->norm().pixel_to_x(static_cast<double>(j)));
    const double y = cube->norm().y_to_crs(cube->norm().pixel_to_y(static_cast<double>(i)));
    const PixelWindow win{rng.below(H - edge_h + 1), 0, rng.below(W - edge_w + 1), 0};
    const PixelWindow window{win.i0, win.i0 + edge_h, win.j0, win.j0 + edge_w};

    auto start = Clock::now();
    sink += cube->query_timeseries(x, y).size();
    neural_series.push_back(elapsed_ms(start));

    start = Clock::now();
    sink += cube->query_region_frame(window, t).values.size();
    neural_region.push_back(elapsed_ms(start));

    start = Clock::now();
    std::vector<float> series;
    for (std::size_t k = 0; k < T; ++k) {
      const auto bytes = read_file(frame_path(k));
      for (std::size_t c = 0; c < C; ++c) {
        series.push_back(std::bit_cast<float>(load_u32_le(bytes.data() + 4 * ((i * W + j) * C + c))));
      }
    }
    sink += series.size();
    base_series.push_back(elapsed_ms(start));

    start = Clock::now();
    const auto bytes = read_file(frame_path(t));
    std::vector<float> crop;
    crop.reserve(window.pixels() * C);
    for (std::size_t a = window.i0; a < window.i1; ++a) {
      for (std::size_t b = window.j0; b < window.j1; ++b) {
        for (std::size_t c = 0; c < C; ++c) {
          crop.push_back(std::bit_cast<float>(load_u32_le(bytes.data() + 4 * ((a * W + b) * C + c))));
        }
      }
    }
    sink += crop.size();
    base_region.push_back(elapsed_ms(start));
  }
  if (sink == 0) fail(ErrorCode::kInternal, "bench produced no output");

  BenchReport r;
  r.rows.push_back(summarize("neural_pixel_series", neural_series, 0));
  r.rows.push_back(summarize("neural_region", neural_region, 0));
  r.rows.push_back(summarize("raster_pixel_series", base_series, T));
  r.rows.push_back(summarize("raster_region", base_region, 1));
  r.parameter_bytes = cube->parameter_bytes();
  r.resident_bytes = cube->resident_bytes();
  const auto header = read_gndc_header(model_path);
  r.payload_bytes = header.payload_bytes();
  r.file_bytes = header.file_size;
  r.region_pixels = edge_h * edge_w;
  for (std::size_t t = 0; t < T; ++t) std::filesystem::remove(frame_path(t), ec);
  return r;
}

std::string bench_json(const BenchReport& r) {
  json j;
  json rows = json::array();
  for (const auto& s : r.rows) {
    rows.push_back({{"name", s.name}, {"runs", s.runs}, {"p50_ms", s.p50_ms}, {"p95_ms", s.p95_ms},
                    {"frames_read", s.frames_read}});
  }
  j["workloads"] = rows;
  j["parameter_bytes"] = r.parameter_bytes;
  j["resident_bytes"] = r.resident_bytes;
  j["payload_bytes"] = r.payload_bytes;
  j["file_bytes"] = r.file_bytes;
  j["region_pixels"] = r.region_pixels;
  return j.dump();
}

std::string bench_table(const BenchReport& r) {
  std::ostringstream o;
  o << std::left << std::setw(22) << "workload" << std::right << std::setw(8) << "runs" << std::setw(12)
    << "p50 ms" << std::setw(12) << "p95 ms" << std::setw(14) << "frames read" << "\n";
  o << std::fixed << std::setprecision(3);
  for (const auto& s : r.rows) {
    o << std::left << std::setw(22) << s.name << std::right << std::setw(8) << s.runs << std::setw(12) << s.p50_ms
      << std::setw(12) << s.p95_ms << std::setw(14) << s.frames_read << "\n";
  }
  o << "region pixels    " << r.region_pixels << "\n";
  o << "parameter bytes  " << r.parameter_bytes << "\n";
  o << "resident bytes   " << r.resident_bytes << "\n";
  o << "payload bytes    " << r.payload_bytes << "\n";
  o << "file bytes       " << r.file_bytes << "\n";
  return o.str();
}

}  // namespace gndc
