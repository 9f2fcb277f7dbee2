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

#include <cstdint>
#include <functional>

#include "gndc/cube.hpp"
#include "gndc/rng.hpp"

namespace gndc {

// f(x, y, t, c) evaluated at pixel centres and normalized frame times.
using CubeFunction = std::function<double(double x, double y, double t, std::size_t c)>;

// Unit bbox, EPSG:4326 label, frames every step_seconds from t0, all valid.
CubeBundle make_cube(std::size_t height, std::size_t width, std::size_t frames,
                     std::size_t channels, const CubeFunction& fn,
                     std::int64_t t0 = 1577836800, std::int64_t step_seconds = 5 * 86400);

// sin(2 pi x) cos(2 pi y) (0.5 + 0.5 t), channel c shifted by c / 4 in x.
CubeBundle sinusoid_cube(std::size_t height, std::size_t width, std::size_t frames,
                         std::size_t channels = 1);

// Smooth random landscape whose value is quadratic in time at every pixel.
CubeBundle seasonal_cube(std::size_t height, std::size_t width, std::size_t frames,
                         std::size_t channels, std::uint64_t seed);

// Five octaves of random plane waves per channel, phases drifting linearly
// in t: spatially detailed, strongly correlated frame to frame.
CubeBundle textured_cube(std::size_t height, std::size_t width, std::size_t frames,
                         std::size_t channels, std::uint64_t seed);

// Marks random discs of frame t invalid until about coverage of the frame is
// masked. Returns the number of voxels masked.
std::size_t add_cloud_discs(CubeBundle& bundle, std::size_t t, double coverage, double radius_px,
                            Rng& rng);

}  // namespace gndc
