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

#ifndef DENSIFY_RENDER_HPP_
#define DENSIFY_RENDER_HPP_

#include <array>
#include <cstdint>

#include "densify/depth_map.hpp"
#include "densify/png_io.hpp"

namespace densify {

using Rgb = std::array<std::uint8_t, 3>;

// Polynomial fit of the Turbo colormap, t clamped to [0, 1].
Rgb TurboColor(double t);

// RGB8 visualization: depth / max_depth through Turbo, invalid pixels black.
// With dilate_radius > 0 each valid pixel is drawn as a disc of that radius;
// where discs overlap the nearer depth is drawn.
PngImage RenderDepth(const SparseDepthMap& map, double max_depth = 80.,
                     int dilate_radius = 0);

}  // namespace densify

#endif  // DENSIFY_RENDER_HPP_
