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

#include "densify/synth.hpp"

#include <gtest/gtest.h>

#include "densify/eval.hpp"
#include "densify/expand.hpp"
#include "densify/png_io.hpp"
#include "test_support.hpp"

namespace densify {
namespace {

std::vector<Eigen::Vector3d> AccumulateScene(const SyntheticScene& scene,
                                             int count) {
  return Accumulate(scene.sweeps, scene.camera.EgoToGlobal(),
                    scene.camera.SensorToEgo(), count);
}

TEST(SynthTest, ZeroObjects) {
  SceneSpec spec;
  spec.object_count = 0;
  const SyntheticScene scene = Generate(spec);
  EXPECT_TRUE(scene.masks.instance_ids().empty());
  EXPECT_EQ(scene.ground_truth.valid_count(), 0u);
  ASSERT_EQ(scene.sweeps.size(), 5u);
  for (const RadarSweep& sweep : scene.sweeps) {
    EXPECT_TRUE(sweep.points.empty());
  }
}

TEST(SynthTest, SingleObjectPointsLandOnItsMask) {
  SceneSpec spec;
  spec.object_count = 1;
  spec.depth_min = 20.;
  spec.depth_max = 20.;
  spec.radar_points_per_object = 10;
  const SyntheticScene scene = Generate(spec);
  const auto points = AccumulateScene(scene, 5);
  ASSERT_EQ(points.size(), 50u);
  for (const auto& p : points) {
    const auto pixel = Project(scene.camera.Camera(), p);
    ASSERT_TRUE(pixel);
    EXPECT_EQ(pixel->depth, 20.);
    EXPECT_EQ(scene.masks.label(pixel->u, pixel->v), 1);
  }
}

TEST(SynthTest, DeterministicPerSeed) {
  SceneSpec spec;
  spec.seed = 99;
  spec.radar_noise_sigma = 0.3;
  spec.ego_speed = 10.;
  const SyntheticScene a = Generate(spec);
  const SyntheticScene b = Generate(spec);
  EXPECT_EQ(a.ground_truth, b.ground_truth);
  EXPECT_EQ(a.image, b.image);
  EXPECT_TRUE(std::ranges::equal(a.masks.labels(), b.masks.labels()));
  ASSERT_EQ(a.sweeps.size(), b.sweeps.size());
  for (std::size_t s = 0; s < a.sweeps.size(); ++s) {
    EXPECT_EQ(a.sweeps[s].points, b.sweeps[s].points);
  }
  spec.seed = 100;
  EXPECT_NE(Generate(spec).ground_truth, a.ground_truth);
}

TEST(SynthTest, GroundTruthEqualsObjectDepth) {
  SceneSpec spec;
  spec.seed = 5;
  spec.object_count = 10;
  const SyntheticScene scene = Generate(spec);
  for (int v = 0; v < spec.height; ++v) {
    for (int u = 0; u < spec.width; ++u) {
      const InstanceId id = scene.masks.label(u, v);
      if (id == 0) {
        EXPECT_FALSE(scene.ground_truth.valid(u, v));
      } else {
        EXPECT_EQ(scene.ground_truth.raw(u, v), scene.objects[id - 1].depth);
      }
    }
  }
}

TEST(SynthTest, MovingEgoStaysConsistent) {
  SceneSpec spec;
  spec.seed = 6;
  spec.ego_speed = 15.;
  const SyntheticScene scene = Generate(spec);
  const SparseDepthMap sparse =
      Rasterize(AccumulateScene(scene, 5), scene.camera.Camera());
  for (int v = 0; v < spec.height; ++v) {
    for (int u = 0; u < spec.width; ++u) {
      if (sparse.valid(u, v)) {
        EXPECT_EQ(sparse.raw(u, v), scene.ground_truth.raw(u, v));
      }
    }
  }
  EXPECT_NE(scene.sweeps[0].ego_to_global.translation(),
            scene.sweeps[4].ego_to_global.translation());
}

TEST(SynthTest, ZeroNoiseInstaEqualsGroundTruthOnHitInstances) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SceneSpec spec;
    spec.seed = seed;
    const SyntheticScene scene = Generate(spec);
    const SparseDepthMap sparse =
        Rasterize(AccumulateScene(scene, 5), scene.camera.Camera());
    const SparseDepthMap out = ExpandInsta(sparse, scene.masks).map;
    std::vector<bool> hit(65536, false);
    for (std::size_t i = 0; i < sparse.size(); ++i) {
      if (sparse.data()[i] > 0.) hit[scene.masks.labels()[i]] = true;
    }
    for (std::size_t i = 0; i < sparse.size(); ++i) {
      if (hit[scene.masks.labels()[i]] && scene.masks.labels()[i] != 0) {
        ASSERT_EQ(out.data()[i], scene.ground_truth.data()[i]);
      }
    }
  }
}

TEST(SynthTest, InvalidSpecs) {
  SceneSpec spec;
  spec.object_count = -1;
  EXPECT_THROW(Generate(spec), std::invalid_argument);
  spec = SceneSpec{};
  spec.depth_max = 90.;
  EXPECT_THROW(Generate(spec), std::invalid_argument);
  spec = SceneSpec{};
  spec.depth_min = 0.;
  EXPECT_THROW(Generate(spec), std::invalid_argument);
}

TEST(SynthTest, UnplaceableObjectsFail) {
  SceneSpec spec;
  spec.width = 16;
  spec.height = 16;
  spec.cx = 8.;
  spec.cy = 8.;
  spec.fx = 0.01;
  spec.fy = 0.01;
  EXPECT_THROW(Generate(spec), SceneGenerationError);
}

TEST(SynthTest, WriteFrameLayout) {
  testing::TempDir dir;
  SceneSpec spec;
  spec.seed = 7;
  const SyntheticScene scene = Generate(spec);
  WriteFrame(dir.path() / "f", scene);
  for (const char* name :
       {"camera.png", "masks.png", "gt_depth.png", "calib.json",
        "radar/sweep_00.csv", "radar/sweep_00.json", "radar/sweep_04.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "f" / name)) << name;
  }
  EXPECT_EQ(ReadDepthPng(dir.path() / "f" / "gt_depth.png", 80.),
            scene.ground_truth);
  EXPECT_EQ(ReadGrayPng(dir.path() / "f" / "camera.png"), scene.image);
}

}  // namespace
}  // namespace densify
