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

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

namespace densify {
namespace {

Rgb PixelAt(const PngImage& image, int u, int v) {
  const std::size_t i = (static_cast<std::size_t>(v) * image.width + u) * 3;
  return {static_cast<std::uint8_t>(image.samples[i]),
          static_cast<std::uint8_t>(image.samples[i + 1]),
          static_cast<std::uint8_t>(image.samples[i + 2])};
}

TEST(TurboTest, Endpoints) {
  // Dark blue at the near end, dark red at the far end.
  const Rgb near = TurboColor(0.);
  const Rgb far = TurboColor(1.);
  EXPECT_EQ(near, (Rgb{35, 23, 27}));
  EXPECT_EQ(far, (Rgb{144, 13, 0}));
  EXPECT_EQ(TurboColor(-3.), near);
  EXPECT_EQ(TurboColor(7.), far);
}

TEST(RenderTest, AllInvalidIsBlack) {
  const PngImage image = RenderDepth(SparseDepthMap(7, 5));
  EXPECT_EQ(image.channels, 3);
  EXPECT_EQ(image.bit_depth, 8);
  for (auto s : image.samples) EXPECT_EQ(s, 0);
}

TEST(RenderTest, RangeEndsMapToColormapEnds) {
  SparseDepthMap map(2, 1);
  map.set(0, 0, 1e-9);
  map.set(1, 0, 80.);
  const PngImage image = RenderDepth(map, 80.);
  EXPECT_EQ(PixelAt(image, 0, 0), TurboColor(0.));
  EXPECT_EQ(PixelAt(image, 1, 0), TurboColor(1.));
}

TEST(RenderTest, DilationDrawsDiscsNearestOnTop) {
  SparseDepthMap map(9, 9);
  map.set(4, 4, 10.);
  map.set(6, 4, 70.);
  const PngImage image = RenderDepth(map, 80., 2);
  EXPECT_EQ(PixelAt(image, 4, 2), TurboColor(10. / 80.));
  EXPECT_EQ(PixelAt(image, 5, 4), TurboColor(10. / 80.));  // overlap
  EXPECT_EQ(PixelAt(image, 8, 4), TurboColor(70. / 80.));
  EXPECT_EQ(PixelAt(image, 2, 2), (Rgb{0, 0, 0}));  // outside the disc
  EXPECT_THROW(RenderDepth(map, 0.), std::invalid_argument);
  EXPECT_THROW(RenderDepth(map, 80., -1), std::invalid_argument);
}

TEST(RenderTest, DeterministicOutputBytes) {
  testing::TempDir dir;
  std::mt19937_64 rng(1);
  const SparseDepthMap map = testing::RandomSparseMap(rng, 64, 32, 0.1);
  WritePng(dir / "a.png", RenderDepth(map, 80., 1));
  WritePng(dir / "b.png", RenderDepth(map, 80., 1));
  EXPECT_EQ(testing::ReadBytes(dir / "a.png"),
            testing::ReadBytes(dir / "b.png"));
}

}  // namespace
}  // namespace densify
