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

#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "gndc/baselines.hpp"
#include "gndc/rng.hpp"
#include "gndc/synthetic.hpp"
#include "test_util.hpp"

using namespace gndc;
using gndc::testing::code_of;

namespace {

FieldConfig small_field() {
  FieldConfig cfg;
  cfg.grid2d = {2, 4, 2, 10, 8, 1.5};
  cfg.grid3d = {3, 3, 2, 10, 4, 1.5};
  cfg.hidden_width = 16;
  return cfg;
}

}  // namespace

TEST_CASE("metric examples") {
  const std::vector<double> truth{1, 2, 3};
  const auto same = r2_rmse_mae(truth, truth);
  CHECK(same.r2 == 1.0);
  CHECK(same.rmse == 0.0);
  CHECK(same.mae == 0.0);

  const std::vector<double> mean(3, 2.0);
  CHECK(r2_rmse_mae(mean, truth).r2 == 0.0);

  const auto m = r2_rmse_mae(std::vector<double>{1, 2, 4}, truth);
  CHECK(m.rmse == doctest::Approx(std::sqrt(1.0 / 3.0)));
  CHECK(m.mae == doctest::Approx(1.0 / 3.0));
  CHECK(m.r2 == doctest::Approx(0.5));
  CHECK(m.count == 3);

  CHECK(code_of([&] { r2_rmse_mae(std::vector<double>{1, 2}, truth); }) == ErrorCode::kLengthMismatch);
  CHECK(code_of([&] { r2_rmse_mae(truth, std::vector<double>{4, 4, 4}); }) == ErrorCode::kZeroVariance);
  CHECK(std::isnan(error_metrics(truth, std::vector<double>{4, 4, 4}).r2));
  CHECK(error_metrics(truth, std::vector<double>{4, 4, 4}).mae == 2.0);
}

TEST_CASE("metric identities over random vectors") {
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(200);
    std::vector<double> truth(n), pred(n);
    for (std::size_t k = 0; k < n; ++k) {
      truth[k] = rng.normal() * 10;
      pred[k] = truth[k] + rng.normal() * rng.uniform(0, 5);
    }
    const auto self = r2_rmse_mae(truth, truth);
    CHECK(self.r2 == 1.0);
    double mu = 0;
    for (double v : truth) mu += v;
    mu /= double(n);
    CHECK(std::abs(r2_rmse_mae(std::vector<double>(n, mu), truth).r2) < 1e-12);
    const auto m = r2_rmse_mae(pred, truth);
    CHECK(m.mae <= m.rmse + 1e-15);
    CHECK(m.r2 <= 1.0);
    CHECK(m.rmse >= 0.0);
  }
}

TEST_CASE("a single gap flips exactly the covered pixels") {
  const auto b = sinusoid_cube(8, 8, 3);
  GapSpec spec;
  spec.tiers = {{"one", 1, 3.0, 3.0}};
  spec.seed = 5;
  GapRecord rec;
  const auto masked = simulate_gaps(b, 1, spec, &rec);
  REQUIRE(rec.gaps.size() == 1);
  const auto& g = rec.gaps[0];
  CHECK(g.diameter == 3.0);
  CHECK(g.ci >= 1.5);
  CHECK(g.ci <= 6.5);
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 8; ++j) {
      const double di = i + 0.5 - g.ci, dj = j + 0.5 - g.cj;
      const bool inside = di * di + dj * dj <= 2.25;
      CHECK(masked.valid(i, j, 1) == !inside);
      CHECK(masked.valid(i, j, 0));
      CHECK(masked.valid(i, j, 2));
      CHECK(rec.tier_of_pixel[i * 8 + j] == (inside ? 0 : -1));
      flipped += inside;
    }
  }
  CHECK(flipped == rec.gap_pixels());
  CHECK(flipped >= 5);
  CHECK(masked.values == b.values);
  CHECK(rec.original.size() == 64);
}

TEST_CASE("gap placement edge cases") {
  const auto b = sinusoid_cube(8, 8, 3);
  GapRecord rec;
  CHECK(simulate_gaps(b, 0, GapSpec{}, &rec) == b);
  CHECK(rec.gap_pixels() == 0);
  GapSpec big;
  big.tiers = {{"huge", 1, 9.0, 9.0}};
  CHECK(code_of([&] { simulate_gaps(b, 0, big, nullptr); }) == ErrorCode::kFrameTooSmall);
  GapSpec a, c;
  a.tiers = c.tiers = {{"s", 4, 1.0, 2.5}, {"m", 2, 3.0, 4.0}};
  a.seed = c.seed = 17;
  CHECK(simulate_gaps(b, 2, a, nullptr) == simulate_gaps(b, 2, c, nullptr));
}

TEST_CASE("linear interpolation baseline") {
  auto b = make_cube(1, 1, 4, 1, [](double, double, double t, std::size_t) { return 2.0 + 6.0 * t; });
  // values at frames: 2, 4, 6, 8 (timestamps evenly spaced)
  b.mask = {1, 0, 1, 0};
  CHECK(linear_interp_reconstruct(b, 0, 0, 1)[0] == doctest::Approx(4.0));
  CHECK(linear_interp_reconstruct(b, 0, 0, 3)[0] == doctest::Approx(6.0));
  CHECK(linear_interp_reconstruct(b, 0, 0, 2)[0] == b.value(0, 0, 2, 0));
  b.mask = {0, 0, 1, 1};
  CHECK(linear_interp_reconstruct(b, 0, 0, 0)[0] == b.value(0, 0, 2, 0));
  b.mask = {1, 1, 1, 1};
  for (std::size_t t = 0; t < 4; ++t) CHECK(linear_interp_reconstruct(b, 0, 0, t)[0] == b.value(0, 0, t, 0));

  auto uneven = make_cube(1, 2, 3, 1, [](double, double, double, std::size_t) { return 0.0; });
  uneven.meta.timestamps = {0, 10, 40};
  uneven.values = {1, 0, 5, 1, 0, 5};
  uneven.mask = {1, 0, 1, 0, 0, 0};
  CHECK(linear_interp_reconstruct(uneven, 0, 0, 1)[0] == doctest::Approx(2.0));
  CHECK(code_of([&] { linear_interp_reconstruct(uneven, 0, 1, 1); }) == ErrorCode::kNoValidFrames);
}

TEST_CASE("sinusoidal network budgets") {
  SirenConfig c;
  c.hidden_width = 10;
  c.hidden_layers = 2;
  CHECK(c.parameter_count(3) == 2 * 10 + 10 + 10 * 10 + 10 + 10 * 3 + 3);
  const auto fit = SirenConfig::for_budget(9000, 1);
  CHECK(fit.parameter_count(1) <= 9000);
  auto wider = fit;
  wider.hidden_width += 1;
  CHECK(wider.parameter_count(1) > 9000);
}

TEST_CASE("per-frame baseline on a constant frame reports RMSE only") {
  std::vector<float> frame(16 * 16, 0.7f);
  SirenConfig cfg = SirenConfig::for_budget(500, 1);
  cfg.steps = 100;
  const auto fit = perframe_inr_baseline(frame, 16, 16, 1, cfg);
  CHECK(std::isnan(fit.metrics.r2));
  CHECK(fit.metrics.rmse < 1e-2);
}

TEST_CASE("per-frame baseline fits a smooth frame at 9k parameters") {
  const std::size_t H = 32, W = 32;
  std::vector<float> frame(H * W);
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t j = 0; j < W; ++j) {
      const double x = (j + 0.5) / W, y = (i + 0.5) / H;
      frame[i * W + j] = static_cast<float>(std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y));
    }
  }
  SirenConfig cfg = SirenConfig::for_budget(9000, 1);
  cfg.steps = 300;
  cfg.batch_size = 0;
  const auto fit = perframe_inr_baseline(frame, H, W, 1, cfg);
  MESSAGE("width " << cfg.hidden_width << " R2 " << fit.metrics.r2);
  CHECK(fit.model.parameter_count() == cfg.parameter_count(1));
  CHECK(fit.metrics.r2 > 0.9);
  std::vector<double> out(1);
  fit.model.forward((3 + 0.5) / W, (5 + 0.5) / H, out);
  const auto [lo, hi] = std::minmax_element(frame.begin(), frame.end());
  CHECK(*lo + out[0] * (*hi - *lo) == doctest::Approx(fit.predicted[5 * W + 3]));
}

TEST_CASE("int16 baseline") {
  const auto flat = make_cube(8, 8, 4, 2, [](double, double, double, std::size_t c) { return 1.5 + c; });
  const auto f = int16_lossless_baseline(flat);
  CHECK(f.max_abs_error == 0.0);
  CHECK(f.bytes < 200);

  Rng rng(4);
  auto noise = make_cube(16, 16, 8, 2, [&](double, double, double, std::size_t) { return rng.uniform(-3, 3); });
  const auto n = int16_lossless_baseline(noise);
  const double per_sample = double(n.bytes) / double(noise.meta.samples());
  CHECK(per_sample > 1.9);
  CHECK(per_sample < 2.2);
  for (std::size_t c = 0; c < 2; ++c) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t k = c; k < noise.values.size(); k += 2) {
      lo = std::min(lo, double(noise.values[k]));
      hi = std::max(hi, double(noise.values[k]));
    }
    const double step = (hi - lo) / 65535.0;
    CHECK(n.step_per_band[c] == doctest::Approx(step));
    const double ulp = std::nextafter(std::max(std::abs(lo), std::abs(hi)), 1e300) - std::max(std::abs(lo), std::abs(hi));
    CHECK(n.max_error_per_band[c] <= step / 2 + ulp);
  }
}

TEST_CASE("mask and restore bookkeeping") {
  const auto b = seasonal_cube(24, 24, 6, 2, 3);
  TrainConfig tc;
  tc.total_steps = 200;
  tc.batch_size = 512;

  const auto none = mask_and_restore(b, 3, small_field(), tc, GapSpec{});
  REQUIRE(none.row("all_gaps") != nullptr);
  CHECK(none.row("all_gaps")->pixels == 0);
  CHECK(none.row("outside")->pixels == 24 * 24);
  CHECK(std::isfinite(none.row("outside")->neural.r2));
  CHECK(none.row("outside")->linear.r2 == 1.0);

  GapSpec spec;
  spec.tiers = {{"small", 6, 1.5, 2.5}, {"medium", 2, 4.0, 5.0}, {"large", 1, 8.0, 8.0}};
  spec.seed = 8;
  const auto r = mask_and_restore(b, 3, small_field(), tc, spec);
  REQUIRE(r.rows.size() == 5);
  CHECK(r.rows[0].label == "small");
  CHECK(r.rows[2].label == "large");
  std::size_t tier_sum = 0;
  for (std::size_t k = 0; k < 3; ++k) tier_sum += r.rows[k].pixels;
  CHECK(tier_sum == r.record.gap_pixels());
  CHECK(r.row("all_gaps")->pixels == r.record.gap_pixels());
  CHECK(r.row("outside")->pixels + r.record.gap_pixels() == 24 * 24);
  CHECK(r.row("large")->neural_per_band.size() == 2);
  const auto csv = mask_restore_csv(r);
  CHECK(csv.rfind("region,pixels,neural_r2", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(mask_restore_table(r).find("all_gaps") != std::string::npos);
}
