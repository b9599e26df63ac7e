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

#include "densify/bev.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "test_support.hpp"

namespace densify {
namespace {

using namespace densify::testing;

// Frustum of hand-placed points with one channel.
struct Points {
  std::vector<FrustumPoint> frustum;
  FrustumFeatures features;
};

Points MakePoints(const std::vector<std::pair<Eigen::Vector3d, double>>& in) {
  Points out;
  out.features.width = static_cast<int>(in.size());
  out.features.height = 1;
  out.features.bins = 1;
  out.features.channels = 1;
  for (std::size_t i = 0; i < in.size(); ++i) {
    out.frustum.push_back({static_cast<int>(i), 0, 0, in[i].first});
    out.features.values.push_back(in[i].second);
  }
  return out;
}

double Total(const BevGrid& grid) {
  const auto v = grid.values();
  return std::accumulate(v.begin(), v.end(), 0.);
}

const BevGridSpec kSmallGrid{-4., 4., -4., 4., 0.5};

TEST(DepthBinsTest, UniformEdgesAndLookup) {
  const DepthBins bins = DepthBins::Uniform();
  EXPECT_EQ(bins.count(), 118);
  EXPECT_EQ(bins.d_min(), 1.);
  EXPECT_EQ(bins.d_max(), 80.);
  EXPECT_EQ(bins.BinOf(1.), 0);
  EXPECT_EQ(bins.BinOf(79.99), 117);
  EXPECT_FALSE(bins.BinOf(80.));
  EXPECT_FALSE(bins.BinOf(0.5));
  const DepthBins four = DepthBins::Uniform(0.5, 4.5, 4);
  EXPECT_EQ(four.BinOf(1.5), 1);  // edge belongs to the upper bin
  EXPECT_EQ(four.center(2), 3.);
  EXPECT_THROW(DepthBins::Uniform(0., 1., 1), std::invalid_argument);
  EXPECT_THROW(DepthBins::Uniform(2., 1., 1), std::invalid_argument);
  EXPECT_THROW(DepthBins::Uniform(1., 2., 0), std::invalid_argument);
}

TEST(FrustumTest, SingleCellSingleBin) {
  const CameraIntrinsics k(100., 100., 2., 2., 4, 4);
  const auto frustum = MakeFrustum(k, 4, DepthBins::Uniform(9., 11., 1));
  ASSERT_EQ(frustum.size(), 1u);
  EXPECT_EQ(frustum[0].point_cam, Backproject(k, 1.5, 1.5, 10.));
}

TEST(FrustumTest, OpticalAxisAndCount) {
  const CameraIntrinsics k(50., 50., 3., 2., 8, 6);
  const DepthBins bins = DepthBins::Uniform(1., 9., 4);
  const auto frustum = MakeFrustum(k, 1, bins);
  EXPECT_EQ(frustum.size(), 8u * 6u * 4u);
  for (const FrustumPoint& p : frustum) {
    if (p.grid_u == 3 && p.grid_v == 2) {
      EXPECT_EQ(p.point_cam, Eigen::Vector3d(0., 0., bins.center(p.bin)));
    }
  }
  EXPECT_EQ(MakeFrustum(CameraIntrinsics(400., 400., 352., 128., 704, 256), 16,
                        DepthBins::Uniform())
                .size(),
            44u * 16u * 118u);
  EXPECT_THROW(MakeFrustum(k, 5, bins), std::invalid_argument);
}

TEST(DistributionTest, RejectsUnnormalized) {
  EXPECT_THROW(DepthDistribution(1, 1, 2, {0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(DepthDistribution(1, 1, 2, {1.5, -0.5}), std::invalid_argument);
  EXPECT_THROW(DepthDistribution(1, 1, 2, {1.}), std::invalid_argument);
  EXPECT_NO_THROW(DepthDistribution(1, 1, 2, {0.25, 0.75}));
}

TEST(LiftTest, OneHotAndUniform) {
  FeatureMap features(2, 1, 2);
  features.values = {1., 2., 3., 4.};
  const FrustumFeatures one_hot =
      Lift(features, DepthDistribution(2, 1, 3, {0, 1, 0, 0, 0, 1}));
  EXPECT_EQ(one_hot.values,
            (std::vector<double>{0, 0, 1, 2, 0, 0, 0, 0, 0, 0, 3, 4}));
  const FrustumFeatures uniform =
      Lift(features, DepthDistribution::Uniform(2, 1, 4));
  for (int b = 0; b < 4; ++b) {
    EXPECT_EQ(uniform.values[b * 2], 0.25);
    EXPECT_EQ(uniform.values[(4 + b) * 2 + 1], 1.);
  }
  EXPECT_THROW(Lift(features, DepthDistribution::Uniform(1, 1, 4)),
               BevDimensionError);
}

TEST(LiftTest, NormalizationIdentity) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const FeatureMap features = RandomFeatures(rng, 11, 5, 3);
    const FrustumFeatures lifted =
        Lift(features, RandomDistribution(rng, 11, 5, 17));
    for (int v = 0; v < 5; ++v) {
      for (int u = 0; u < 11; ++u) {
        for (int c = 0; c < 3; ++c) {
          double sum = 0.;
          for (int b = 0; b < 17; ++b) {
            sum += lifted.values[((v * 11 + u) * 17 + b) * 3 + c];
          }
          EXPECT_NEAR(sum, features.at(u, v, c), 1e-6);
        }
      }
    }
  }
}

TEST(BevGridTest, SpecValidation) {
  EXPECT_EQ(BevGridSpec{}.cells_x(), 128);
  EXPECT_THROW((BevGridSpec{0., 1., 0., 1., 0.3}.Validate()),
               std::invalid_argument);
  EXPECT_THROW((BevGridSpec{1., 1., 0., 1., 0.5}.Validate()),
               std::invalid_argument);
  EXPECT_THROW((BevGridSpec{0., 1., 0., 1., 0.}.Validate()),
               std::invalid_argument);
}

TEST(VoxelPoolTest, SinglePointAndAdditivity) {
  const Points one = MakePoints({{{1.25, -0.75, 5.}, 3.}});
  const BevGrid grid = VoxelPool(one.frustum, one.features, Pose(), kSmallGrid);
  // x = 1.25 -> cell 10, y = -0.75 -> cell 6.
  EXPECT_EQ(grid.at(10, 6, 0), 3.);
  EXPECT_EQ(Total(grid), 3.);

  const Points two =
      MakePoints({{{1.25, -0.75, 5.}, 3.}, {{1.4, -0.6, 9.}, 0.5}});
  EXPECT_EQ(
      VoxelPool(two.frustum, two.features, Pose(), kSmallGrid).at(10, 6, 0),
      3.5);
}

TEST(VoxelPoolTest, HalfOpenBoundaries) {
  const Points points = MakePoints({{{0.5, 0., 1.}, 1.},
                                    {{4., 0., 1.}, 10.},
                                    {{-4., -4., 1.}, 100.},
                                    {{0., 0., -1.}, 1000.}});
  const BevGrid grid =
      VoxelPool(points.frustum, points.features, Pose(), kSmallGrid);
  EXPECT_EQ(grid.at(9, 8, 0), 1.);  // max edge of cell 8 belongs to cell 9
  EXPECT_EQ(grid.at(0, 0, 0), 100.);
  EXPECT_EQ(Total(grid), 101.);  // x_max is exclusive, z <= 0 dropped
}

TEST(VoxelPoolTest, EmptyInputIsZero) {
  const Points none = MakePoints({});
  EXPECT_EQ(Total(VoxelPool(none.frustum, none.features, Pose(), kSmallGrid)),
            0.);
}

TEST(VoxelPoolTest, MassConservationAndReference) {
  std::mt19937_64 rng(2);
  const CameraIntrinsics k(20., 20., 8., 6., 16, 12);
  const DepthBins bins = DepthBins::Uniform(1., 20., 12);
  const auto frustum = MakeFrustum(k, 2, bins);
  const Pose cam_to_ego = Pose(Eigen::Quaterniond(0.5, -0.5, 0.5, -0.5),
                               Eigen::Vector3d(1.5, 0., 1.5));
  for (int trial = 0; trial < 20; ++trial) {
    const FrustumFeatures lifted =
        Lift(RandomFeatures(rng, 8, 6, 2), RandomDistribution(rng, 8, 6, 12));
    const BevGrid grid = VoxelPool(frustum, lifted, cam_to_ego, {});
    double mass = 0.;
    for (double v : lifted.values) mass += v;
    EXPECT_NEAR(Total(grid), mass, 1e-6 * std::max(1., std::abs(mass)));
    const BevGrid serial =
        reference::VoxelPool(frustum, lifted, cam_to_ego, {});
    EXPECT_TRUE(std::ranges::equal(grid.values(), serial.values()));
  }
}

TEST(VoxelPoolTest, PermutationInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-4.5, 4.5);
  std::uniform_real_distribution<double> value(0., 1.);
  std::vector<std::pair<Eigen::Vector3d, double>> in(500);
  for (auto& [p, f] : in) p = {coord(rng), coord(rng), 1.}, f = value(rng);
  const Points a = MakePoints(in);
  std::shuffle(in.begin(), in.end(), rng);
  const Points b = MakePoints(in);
  const BevGrid ga = VoxelPool(a.frustum, a.features, Pose(), kSmallGrid);
  const BevGrid gb = VoxelPool(b.frustum, b.features, Pose(), kSmallGrid);
  for (std::size_t i = 0; i < ga.values().size(); ++i) {
    EXPECT_NEAR(ga.values()[i], gb.values()[i], 1e-9);
  }
}

TEST(VoxelPoolTest, ShiftByResolutionShiftsColumns) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> cell(0, 15);
  std::uniform_int_distribution<int> quarter(0, 3);
  std::vector<std::pair<Eigen::Vector3d, double>> in;
  for (int i = 0; i < 200; ++i) {
    // Dyadic coordinates strictly inside a cell.
    const double x = -4. + 0.5 * cell(rng) + 0.125 * (quarter(rng) % 3 + 1);
    const double y = -4. + 0.5 * cell(rng) + 0.125 * (quarter(rng) % 3 + 1);
    in.push_back({{x, y, 2.}, 1. + i});
  }
  const Points points = MakePoints(in);
  const BevGrid base =
      VoxelPool(points.frustum, points.features, Pose(), kSmallGrid);
  for (int k : {-3, -1, 1, 2, 5}) {
    const BevGrid shifted =
        VoxelPool(points.frustum, points.features,
                  Pose::Translation({0.5 * k, 0., 0.}), kSmallGrid);
    for (int ix = 0; ix < 16; ++ix) {
      for (int iy = 0; iy < 16; ++iy) {
        const int src = ix - k;
        const double want = src >= 0 && src < 16 ? base.at(src, iy, 0) : 0.;
        EXPECT_EQ(shifted.at(ix, iy, 0), want);
      }
    }
  }
}

TEST(OneHotFromDepthTest, SinglePixelGivesOneValidCell) {
  SparseDepthMap depth(8, 8);
  depth.set(5, 2, 10.2);
  depth.set(6, 3, 30.);  // same 4x4 cell, farther
  const DepthBins bins = DepthBins::Uniform(1., 81., 80);
  const DepthLiftInput lift = OneHotFromDepth(depth, 4, bins);
  EXPECT_EQ(std::count(lift.valid.begin(), lift.valid.end(), true), 1);
  EXPECT_TRUE(lift.valid[1]);
  EXPECT_EQ(lift.distribution.at(1, 0, 9), 1.);
  EXPECT_EQ(lift.distribution.at(0, 0, 0), 1. / 80.);
  EXPECT_THROW(OneHotFromDepth(depth, 3, bins), std::invalid_argument);
}

TEST(BevFormatTest, EncodeDecodeAndErrors) {
  BevGrid grid(BevGridSpec{-1., 1., -2., 2., 0.5}, 2);
  grid.at(1, 3, 1) = 2.5;
  grid.at(3, 7, 0) = -1.;
  const auto bytes = EncodeBevGrid(grid);
  EXPECT_EQ(bytes.size(), 28u + 4u * 8u * 2u * 4u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "BEVG");
  const BevGrid back = DecodeBevGrid(bytes);
  EXPECT_EQ(back.cells_x(), 4);
  EXPECT_EQ(back.cells_y(), 8);
  EXPECT_EQ(back.at(1, 3, 1), 2.5);
  EXPECT_EQ(back.at(3, 7, 0), -1.);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(DecodeBevGrid(bad_magic), BevFormatError);
  const std::vector<unsigned char> truncated(bytes.begin(), bytes.end() - 1);
  EXPECT_THROW(DecodeBevGrid(truncated), BevFormatError);
  EXPECT_THROW(DecodeBevGrid(std::vector<unsigned char>(10)), BevFormatError);
}

}  // namespace
}  // namespace densify
