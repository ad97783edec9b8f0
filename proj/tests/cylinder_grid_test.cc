// Copyright 2026 The LatentLab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "latentlab/cylinder_grid.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "latentlab/error.h"
#include "test_util.h"

namespace latentlab {
namespace {

Point Polar(double rho, double phi, double z) {
  return Point{static_cast<float>(rho * std::cos(phi)),
               static_cast<float>(rho * std::sin(phi)), static_cast<float>(z),
               0.0f};
}

TEST(VoxelizeTest, RhoLowerBoundIsFirstBin) {
  const CylinderGridSpec spec;
  EXPECT_EQ(VoxelizePoint(Point{3.0f, 0.0f, 0.0f, 0.0f}, spec).x, 0);
}

TEST(VoxelizeTest, RhoUpperBoundClampsToLastBin) {
  const CylinderGridSpec spec;
  EXPECT_EQ(VoxelizePoint(Point{50.0f, 0.0f, 0.0f, 0.0f}, spec).x, 479);
}

TEST(VoxelizeTest, PhiZeroIsBin180) {
  const CylinderGridSpec spec;
  // floor((0 + pi) / (2 pi) * 360) = 180.
  EXPECT_EQ(VoxelizePoint(Point{10.0f, 0.0f, 0.0f, 0.0f}, spec).y, 180);
}

TEST(VoxelizeTest, PhiPiClampsToLastBin) {
  const CylinderGridSpec spec;
  // atan2(+0, -1) = pi exactly.
  EXPECT_EQ(VoxelizePoint(Point{-10.0f, 0.0f, 0.0f, 0.0f}, spec).y, 359);
}

TEST(VoxelizeTest, NonFiniteIsInvalidPoint) {
  const CylinderGridSpec spec;
  const float bad[] = {std::numeric_limits<float>::quiet_NaN(),
                       std::numeric_limits<float>::infinity()};
  for (float v : bad) {
    for (int axis = 0; axis < 3; ++axis) {
      Point p{1, 1, 0, 0};
      (axis == 0 ? p.x : axis == 1 ? p.y : p.z) = v;
      try {
        VoxelizePoint(p, spec);
        FAIL();
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kInvalidPoint);
      }
    }
  }
}

TEST(VoxelizeTest, AllIndicesInRangeIncludingOutOfBounds) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> coord(-200.0f, 200.0f);
  PointCloud cloud;
  for (int i = 0; i < 20000; ++i) {
    cloud.points.push_back({coord(rng), coord(rng), coord(rng) / 10, 0});
  }
  cloud.points.push_back({0, 0, 0, 0});
  const CylinderGridSpec spec;
  for (const VoxelIndex& v : Voxelize(cloud, spec)) {
    ASSERT_GE(v.x, 0);
    ASSERT_LT(v.x, 480);
    ASSERT_GE(v.y, 0);
    ASSERT_LT(v.y, 360);
    ASSERT_GE(v.z, 0);
    ASSERT_LT(v.z, 32);
  }
}

TEST(VoxelizeTest, PermutationEquivariant) {
  std::mt19937_64 rng(11);
  const PointCloud cloud = testing::RandomLabeledCloud(5000, rng);
  std::vector<std::size_t> perm(cloud.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  PointCloud shuffled;
  for (std::size_t i : perm) shuffled.points.push_back(cloud.points[i]);
  const CylinderGridSpec spec;
  const auto base = Voxelize(cloud, spec);
  const auto moved = Voxelize(shuffled, spec);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    ASSERT_EQ(moved[i], base[perm[i]]);
  }
}

TEST(VoxelizeTest, InteriorEdgesBelongToHigherBin) {
  // Dyadic bounds make every edge exactly representable.
  CylinderGridSpec spec;
  spec.rho_min = 0.0;
  spec.rho_max = 64.0;
  spec.z_min = -4.0;
  spec.z_max = 4.0;
  spec.grid = {16, 360, 8};
  for (int k = 1; k < 16; ++k) {
    const Point p{static_cast<float>(4 * k), 0.0f, 0.0f, 0.0f};
    EXPECT_EQ(VoxelizePoint(p, spec).x, k);
  }
  for (int k = 1; k < 8; ++k) {
    const Point p{10.0f, 0.0f, static_cast<float>(-4 + k), 0.0f};
    EXPECT_EQ(VoxelizePoint(p, spec).z, k);
  }
  EXPECT_EQ(AxisBin(0.25, 0.0, 1.0, 4), 1);
  EXPECT_EQ(AxisBin(0.2499999, 0.0, 1.0, 4), 0);
  EXPECT_EQ(AxisBin(-5.0, 0.0, 1.0, 4), 0);
  EXPECT_EQ(AxisBin(5.0, 0.0, 1.0, 4), 3);
}

TEST(VoxelizeTest, MatchesBinningFormula) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> rho(3.0, 50.0);
  std::uniform_real_distribution<double> phi(-3.1, 3.1);
  std::uniform_real_distribution<double> z(-3.0, 1.5);
  const CylinderGridSpec spec;
  for (int i = 0; i < 2000; ++i) {
    const Point p = Polar(rho(rng), phi(rng), z(rng));
    const double r = std::hypot(static_cast<double>(p.x), static_cast<double>(p.y));
    const double a = std::atan2(static_cast<double>(p.y), static_cast<double>(p.x));
    const VoxelIndex v = VoxelizePoint(p, spec);
    EXPECT_EQ(v.x, std::clamp(static_cast<int>(std::floor((r - 3.0) / 47.0 * 480)), 0, 479));
    EXPECT_EQ(v.y, std::clamp(static_cast<int>(std::floor(
                                  (a + std::numbers::pi) / (2 * std::numbers::pi) * 360)),
                              0, 359));
    EXPECT_EQ(v.z, std::clamp(static_cast<int>(std::floor((p.z + 3.0) / 4.5 * 32)), 0, 31));
  }
}

TEST(VoxelizeTest, DropOutOfBoundsFilters) {
  CylinderGridSpec spec;
  spec.drop_out_of_bounds = true;
  PointCloud cloud;
  cloud.points = {{10, 0, 0, 0}, {1, 0, 0, 0}, {60, 0, 0, 0}, {10, 0, 2, 0},
                  {10, 0, -3.5f, 0}, {50, 0, 1.5f, 0}};
  const auto out = VoxelizeFiltered(cloud, spec);
  ASSERT_EQ(out.size(), 6u);
  EXPECT_TRUE(out[0].has_value());
  EXPECT_FALSE(out[1].has_value());
  EXPECT_FALSE(out[2].has_value());
  EXPECT_FALSE(out[3].has_value());
  EXPECT_FALSE(out[4].has_value());
  EXPECT_TRUE(out[5].has_value());
  spec.drop_out_of_bounds = false;
  for (const auto& v : VoxelizeFiltered(cloud, spec)) EXPECT_TRUE(v.has_value());
}

TEST(GridSpecTest, ValidateRejectsEmptyRanges) {
  CylinderGridSpec spec;
  spec.rho_max = spec.rho_min;
  EXPECT_THROW(spec.Validate(), Error);
  spec = CylinderGridSpec{};
  spec.grid.z = 0;
  EXPECT_THROW(spec.Validate(), Error);
  EXPECT_NO_THROW(CylinderGridSpec{}.Validate());
}

}  // namespace
}  // namespace latentlab
