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

#include "densify/expand.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "densify/radar.hpp"
#include "densify/synth.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace densify {
namespace {

using namespace densify::testing;

InstanceMaskSet Rectangles(int w, int h,
                           const std::vector<std::array<int, 5>>& rects) {
  std::vector<InstanceId> labels(static_cast<std::size_t>(w) * h, 0);
  for (const auto& [id, u0, v0, u1, v1] : rects) {
    for (int v = v0; v <= v1; ++v) {
      for (int u = u0; u <= u1; ++u) {
        labels[static_cast<std::size_t>(v) * w + u] =
            static_cast<InstanceId>(id);
      }
    }
  }
  return InstanceMaskSet(w, h, std::move(labels));
}

TEST(InstaTest, NearestDominatesAndOriginalsStay) {
  const InstanceMaskSet masks = Rectangles(8, 6, {{1, 1, 1, 5, 4}});
  SparseDepthMap sparse(8, 6);
  sparse.set(2, 2, 10.);
  sparse.set(4, 3, 42.5);
  sparse.set(7, 0, 3.);  // background, untouched
  const ExpansionResult result = ExpandInsta(sparse, masks);
  EXPECT_EQ(result.map.raw(1, 1), 10.);
  EXPECT_EQ(result.map.raw(5, 4), 10.);
  EXPECT_EQ(result.map.raw(4, 3), 42.5);
  EXPECT_EQ(result.map.raw(7, 0), 3.);
  EXPECT_EQ(result.map.raw(0, 0), 0.);
  EXPECT_EQ(result.map.valid_count(), 20u + 1u);
  EXPECT_EQ(result.report.instances_total, 1u);
  EXPECT_EQ(result.report.instances_filled, 1u);
  EXPECT_GT(result.report.output_density, result.report.input_density);
}

TEST(InstaTest, InstanceWithoutRadarIsUnchanged) {
  const InstanceMaskSet masks =
      Rectangles(8, 6, {{1, 0, 0, 2, 2}, {2, 4, 3, 7, 5}});
  SparseDepthMap sparse(8, 6);
  sparse.set(1, 1, 9.);
  const ExpansionResult result = ExpandInsta(sparse, masks);
  EXPECT_EQ(result.map.raw(5, 4), 0.);
  EXPECT_EQ(result.report.instances_total, 2u);
  EXPECT_EQ(result.report.instances_filled, 1u);
}

TEST(InstaTest, ZeroInstancesIsIdentity) {
  std::mt19937_64 rng(1);
  const SparseDepthMap sparse = testing::RandomSparseMap(rng, 20, 10, 0.1);
  const InstanceMaskSet none(20, 10, std::vector<InstanceId>(200, 0));
  EXPECT_EQ(ExpandInsta(sparse, none).map, sparse);
}

TEST(InstaTest, PercentileSelectsRobustDepth) {
  const InstanceMaskSet masks = Rectangles(6, 1, {{1, 0, 0, 5, 0}});
  SparseDepthMap sparse(6, 1);
  sparse.set(0, 0, 10.);
  sparse.set(1, 0, 20.);
  sparse.set(2, 0, 30.);
  EXPECT_EQ(ExpandInsta(sparse, masks, {0.}).map.raw(4, 0), 10.);
  EXPECT_EQ(ExpandInsta(sparse, masks, {50.}).map.raw(4, 0), 20.);
  EXPECT_EQ(ExpandInsta(sparse, masks, {100.}).map.raw(4, 0), 30.);
  EXPECT_THROW(ExpandInsta(sparse, masks, {101.}), std::invalid_argument);
}

TEST(InstaTest, DimensionMismatch) {
  EXPECT_THROW(ExpandInsta(SparseDepthMap(4, 4),
                           InstanceMaskSet(4, 3, std::vector<InstanceId>(12))),
               DimensionMismatchError);
}

TEST(InstaTest, MatchesBruteForceAndReference) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> coord(0, 59);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::array<int, 5>> rects;
    for (int id = 1; id <= 8; ++id) {
      int u0 = coord(rng), u1 = coord(rng), v0 = coord(rng) / 2,
          v1 = coord(rng) / 2;
      rects.push_back({id, std::min(u0, u1), std::min(v0, v1), std::max(u0, u1),
                       std::max(v0, v1)});
    }
    const InstanceMaskSet masks = Rectangles(60, 30, rects);
    const SparseDepthMap sparse = testing::RandomSparseMap(rng, 60, 30, 0.01);
    const ExpansionResult got = ExpandInsta(sparse, masks);
    EXPECT_EQ(got.map, OracleInsta(sparse, masks));
    EXPECT_EQ(got.map, reference::ExpandInsta(sparse, masks).map);

    // Overlay, provenance and range preservation.
    std::set<double> inputs(sparse.data().begin(), sparse.data().end());
    for (std::size_t i = 0; i < sparse.size(); ++i) {
      if (sparse.data()[i] > 0.) {
        EXPECT_EQ(got.map.data()[i], sparse.data()[i]);
      }
      EXPECT_TRUE(inputs.contains(got.map.data()[i]));
      if (got.map.data()[i] > 0. && sparse.data()[i] <= 0.) {
        EXPECT_NE(masks.labels()[i], 0);
      }
    }
    EXPECT_GE(got.map.valid_count(), sparse.valid_count());
  }
}

TEST(HeightTest, FortyOnePixelColumn) {
  // fy * dh / d = 800 * 1.5 / 30 = 40 rows above the source pixel.
  const CameraIntrinsics k(800., 800., 50., 60., 100, 120);
  SparseDepthMap sparse(100, 120);
  sparse.set(30, 119, 30.);
  const SparseDepthMap out = ExpandHeight(sparse, k, 1.5);
  EXPECT_EQ(out.valid_count(), 41u);
  for (int v = 79; v <= 119; ++v) EXPECT_EQ(out.raw(30, v), 30.) << v;
  EXPECT_EQ(out.raw(30, 78), 0.);
  EXPECT_EQ(OracleColumnRows(800., 119, 30., 1.5), 41);
}

TEST(HeightTest, TinyExtentIsIdentity) {
  const CameraIntrinsics k(400., 400., 50., 50., 100, 100);
  std::mt19937_64 rng(3);
  const SparseDepthMap sparse =
      testing::RandomSparseMap(rng, 100, 100, 0.02, 10., 80.);
  EXPECT_EQ(ExpandHeight(sparse, k, 1e-4), sparse);
}

TEST(HeightTest, OverlapKeepsNearest) {
  const CameraIntrinsics k(400., 400., 50., 50., 100, 100);
  SparseDepthMap sparse(100, 100);
  sparse.set(10, 90, 20.);  // 30 px extension
  sparse.set(10, 80, 5.);   // 120 px extension, clipped at row 0
  const SparseDepthMap out = ExpandHeight(sparse, k, 1.5);
  EXPECT_EQ(out.raw(10, 70), 5.);
  EXPECT_EQ(out.raw(10, 0), 5.);
  EXPECT_EQ(out.raw(10, 85), 20.);
  EXPECT_EQ(out.raw(10, 90), 20.);
  EXPECT_EQ(out.raw(10, 80), 5.);
  EXPECT_EQ(out.raw(10, 91), 0.);
}

TEST(HeightTest, ColumnHeightsMatchProjectiveOracle) {
  const CameraIntrinsics k(1266.4, 1266.4, 816.3, 491.5, 1600, 900);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> u(0, 1599);
  std::uniform_int_distribution<int> v(0, 899);
  std::uniform_real_distribution<double> d(2., 80.);
  std::uniform_real_distribution<double> dh(0.2, 3.);
  for (int i = 0; i < 100; ++i) {
    SparseDepthMap sparse(1600, 900);
    const int pu = u(rng);
    const int pv = v(rng);
    const double depth = d(rng);
    const double h = dh(rng);
    sparse.set(pu, pv, depth);
    const SparseDepthMap out = ExpandHeight(sparse, k, h);
    EXPECT_EQ(static_cast<int>(out.valid_count()),
              OracleColumnRows(k.fy(), pv, depth, h));
    EXPECT_EQ(out, reference::ExpandHeight(sparse, k, h));
  }
}

TEST(JbfTest, SingleSampleSpreadsWithinRadius) {
  SparseDepthMap sparse(21, 21);
  sparse.set(10, 10, 17.25);
  const SparseDepthMap out =
      ExpandJbf(sparse, GrayImage(21, 21, 100), {3, 2., 10.});
  for (int v = 0; v < 21; ++v) {
    for (int u = 0; u < 21; ++u) {
      const bool inside = std::abs(u - 10) <= 3 && std::abs(v - 10) <= 3;
      EXPECT_EQ(out.raw(u, v), inside ? 17.25 : 0.);
    }
  }
}

TEST(JbfTest, ConstantFieldIsFixedPoint) {
  SparseDepthMap sparse(16, 16);
  for (int v = 0; v < 16; ++v) {
    for (int u = 0; u < 16; ++u) sparse.set(u, v, 33.);
  }
  std::mt19937_64 rng(5);
  const SparseDepthMap out =
      ExpandJbf(sparse, testing::RandomGray(rng, 16, 16), {4, 3., 12.});
  for (double d : out.data()) EXPECT_NEAR(d, 33., 1e-12);
}

TEST(JbfTest, MatchesDoubleLoopOracle) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> radius(1, 8);
  std::uniform_real_distribution<double> sigma(0.5, 20.);
  for (int trial = 0; trial < 20; ++trial) {
    const SparseDepthMap sparse = testing::RandomSparseMap(rng, 16, 16, 0.15);
    const GrayImage guide = testing::RandomGray(rng, 16, 16);
    const JbfMethod method{radius(rng), sigma(rng), sigma(rng)};
    const SparseDepthMap got = ExpandJbf(sparse, guide, method);
    const SparseDepthMap want =
        OracleJbf(sparse, guide, method.radius, method.sigma_s, method.sigma_r);
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_EQ(got.data()[i] > 0., want.data()[i] > 0.) << i;
      EXPECT_NEAR(got.data()[i], want.data()[i], 1e-9);
    }
    EXPECT_EQ(got, reference::ExpandJbf(sparse, guide, method));
  }
}

TEST(JbfTest, ValidatesParameters) {
  const SparseDepthMap sparse(4, 4);
  const GrayImage guide(4, 4);
  EXPECT_THROW(ExpandJbf(sparse, guide, {0, 1., 1.}), std::invalid_argument);
  EXPECT_THROW(ExpandJbf(sparse, guide, {1, 0., 1.}), std::invalid_argument);
  EXPECT_THROW(ExpandJbf(sparse, guide, {1, 1., -1.}), std::invalid_argument);
  EXPECT_THROW(ExpandJbf(sparse, GrayImage(4, 5), {}), DimensionMismatchError);
}

TEST(ExpandTest, RawIsIdentityAndNamesAreStable) {
  std::mt19937_64 rng(7);
  const SparseDepthMap sparse = testing::RandomSparseMap(rng, 30, 20, 0.2);
  ExpansionInputs inputs;
  inputs.sparse = &sparse;
  EXPECT_EQ(Expand(RawMethod{}, inputs).map, sparse);
  EXPECT_EQ(MethodName(RawMethod{}), "raw");
  EXPECT_EQ(MethodName(HeightExtendMethod{}), "height");
  EXPECT_EQ(MethodName(JbfMethod{}), "jbf");
  EXPECT_EQ(MethodName(InstaMethod{}), "insta");
  EXPECT_THROW(Expand(InstaMethod{}, inputs), std::invalid_argument);
  EXPECT_THROW(Expand(JbfMethod{}, inputs), std::invalid_argument);
  EXPECT_THROW(Expand(HeightExtendMethod{}, inputs), std::invalid_argument);
  EXPECT_THROW(Validate(HeightExtendMethod{0.}), std::invalid_argument);
}

TEST(ExpandTest, EveryMethodDensifiesSyntheticScene) {
  SceneSpec spec;
  spec.seed = 8;
  const SyntheticScene scene = Generate(spec);
  const auto points = Accumulate(scene.sweeps, scene.camera.EgoToGlobal(),
                                 scene.camera.SensorToEgo(), 5);
  const SparseDepthMap sparse = Rasterize(points, scene.camera.Camera());
  ExpansionInputs inputs;
  inputs.sparse = &sparse;
  inputs.masks = &scene.masks;
  inputs.guide = &scene.image;
  inputs.intrinsics = &*scene.camera.intrinsics;
  for (const ExpansionMethod& method :
       {ExpansionMethod{RawMethod{}}, ExpansionMethod{HeightExtendMethod{}},
        ExpansionMethod{JbfMethod{}}, ExpansionMethod{InstaMethod{}}}) {
    const ExpansionResult result = Expand(method, inputs);
    EXPECT_GE(result.map.density(), sparse.density()) << MethodName(method);
    EXPECT_EQ(result.report.input_density, sparse.density());
    for (double d : result.map.data()) {
      ASSERT_TRUE(d == 0. || (d > 0. && d <= sparse.cap()));
    }
  }
}

}  // namespace
}  // namespace densify
