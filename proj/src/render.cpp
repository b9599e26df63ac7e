/*
 * Copyright 2026 The Densify Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "densify/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace densify {
namespace {

std::uint8_t ToByte(double channel) {
  return static_cast<std::uint8_t>(
      std::lround(255. * std::clamp(channel, 0., 1.)));
}

}  // namespace

Rgb TurboColor(double t) {
  // Coefficients of the published polynomial approximation of Turbo.
  const double x = std::clamp(t, 0., 1.);
  const double x2 = x * x;
  const double x3 = x2 * x;
  const double x4 = x3 * x;
  const double x5 = x4 * x;
  const double r = 0.13572138 + 4.61539260 * x - 42.66032258 * x2 +
                   132.13108234 * x3 - 152.94239396 * x4 + 59.28637943 * x5;
  const double g = 0.09140261 + 2.19418839 * x + 4.84296658 * x2 -
                   14.18503333 * x3 + 4.27729857 * x4 + 2.82956604 * x5;
  const double b = 0.10667330 + 12.64194608 * x - 60.58204836 * x2 +
                   110.36276771 * x3 - 89.90310912 * x4 + 27.34824973 * x5;
  return {ToByte(r), ToByte(g), ToByte(b)};
}

PngImage RenderDepth(const SparseDepthMap& map, double max_depth,
                     int dilate_radius) {
  if (!(max_depth > 0.) || dilate_radius < 0) {
    throw std::invalid_argument(
        "render: max depth must be > 0 and radius >= 0");
  }
  const int width = map.width();
  const int height = map.height();

  // Nearest depth covering each output pixel.
  std::vector<double> drawn(map.size(), 0.);
  const int r2 = dilate_radius * dilate_radius;
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      const double d = map.raw(u, v);
      if (d <= 0.) continue;
      for (int dv = -dilate_radius; dv <= dilate_radius; ++dv) {
        for (int du = -dilate_radius; du <= dilate_radius; ++du) {
          const int tu = u + du;
          const int tv = v + dv;
          if (du * du + dv * dv > r2 || tu < 0 || tu >= width || tv < 0 ||
              tv >= height) {
            continue;
          }
          double& current = drawn[map.index(tu, tv)];
          if (current == 0. || d < current) current = d;
        }
      }
    }
  }

  PngImage image;
  image.width = width;
  image.height = height;
  image.bit_depth = 8;
  image.channels = 3;
  image.samples.assign(map.size() * 3, 0);
  for (std::size_t i = 0; i < drawn.size(); ++i) {
    if (drawn[i] <= 0.) continue;
    const Rgb color = TurboColor(drawn[i] / max_depth);
    for (int c = 0; c < 3; ++c) image.samples[3 * i + c] = color[c];
  }
  return image;
}

}  // namespace densify
