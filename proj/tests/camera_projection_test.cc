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

#include "latentlab/camera_projection.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <random>
#include <vector>

#include "latentlab/error.h"
#include "test_util.h"

namespace latentlab {
namespace {

CameraModel Pinhole(double f, double cu, double cv, ImageSize size) {
  CameraModel camera;
  camera.intrinsic = {{{f, 0, cu, 0}, {0, f, cv, 0}, {0, 0, 1, 0}}};
  camera.extrinsic = IdentityExtrinsic();
  camera.image_size = size;
  return camera;
}

PointCloud Cloud(std::initializer_list<Point> points) {
  PointCloud cloud;
  cloud.points = points;
  return cloud;
}

TEST(ProjectTest, OpticalAxis) {
  const auto mapping =
      ProjectPoints(Cloud({{0, 0, 1, 0}}), Pinhole(1, 0, 0, {10, 10}));
  ASSERT_EQ(mapping.pairs.size(), 1u);
  EXPECT_EQ(mapping.pairs[0], (PixelPair{0, 0, 0, 1.0, 2}));
}

TEST(ProjectTest, BehindCameraExcluded) {
  const auto mapping = ProjectPoints(Cloud({{0, 0, -1, 0}, {0, 0, 0, 0}}),
                                     Pinhole(1, 0, 0, {10, 10}));
  EXPECT_TRUE(mapping.pairs.empty());
}

TEST(ProjectTest, Focal100Example) {
  const auto mapping =
      ProjectPoints(Cloud({{2, 1, 4, 0}}), Pinhole(100, 50, 50, {200, 200}));
  ASSERT_EQ(mapping.pairs.size(), 1u);
  EXPECT_EQ(mapping.pairs[0].h, 75);
  EXPECT_EQ(mapping.pairs[0].w, 100);
  EXPECT_EQ(mapping.pairs[0].depth, 4.0);
}

TEST(ProjectTest, OutsideImageDropped) {
  // u = 100 lands exactly one past the last column of a 100-wide image.
  const auto mapping = ProjectPoints(Cloud({{2, 1, 4, 0}, {0, 0, 4, 0}}),
                                     Pinhole(100, 50, 50, {100, 100}));
  ASSERT_EQ(mapping.pairs.size(), 1u);
  EXPECT_EQ(mapping.pairs[0].point_index, 1u);
  EXPECT_EQ(mapping.pairs[0].h, 50);
  EXPECT_EQ(mapping.pairs[0].w, 50);
}

TEST(ProjectTest, RoundsHalfAwayFromZero) {
  // u = 10 * 0.25 = 2.5 -> 3; v = 10 * 0.375 = 3.75 -> 4.
  const auto mapping = ProjectPoints(Cloud({{0.25f, 0.375f, 1, 0}}),
                                     Pinhole(10, 0, 0, {10, 10}));
  ASSERT_EQ(mapping.pairs.size(), 1u);
  EXPECT_EQ(mapping.pairs[0].w, 3);
  EXPECT_EQ(mapping.pairs[0].h, 4);
}

TEST(ProjectTest, ExtrinsicApplied) {
  CameraModel camera = Pinhole(10, 5, 5, {20, 20});
  // LiDAR x forward becomes camera z; LiDAR y left becomes camera -x.
  camera.extrinsic = {{{0, -1, 0, 0}, {0, 0, -1, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}}};
  const auto mapping =
      ProjectPoints(Cloud({{5, -1, 0.5f, 0}, {-5, 0, 0, 0}}), camera);
  ASSERT_EQ(mapping.pairs.size(), 1u);
  // p_cam = (1, -0.5, 5): u = 10 * 1 / 5 + 5 = 7, v = 10 * -0.5 / 5 + 5 = 4.
  EXPECT_EQ(mapping.pairs[0], (PixelPair{0, 4, 7, 5.0, 2}));
}

TEST(ProjectTest, EveryPairInsideImageWithPositiveDepth) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> c(-20.0f, 20.0f);
  PointCloud cloud;
  for (int i = 0; i < 5000; ++i) cloud.points.push_back({c(rng), c(rng), c(rng), 0});
  const CameraModel camera = Pinhole(300, 600, 180, {376, 1241});
  const auto mapping = ProjectPoints(cloud, camera);
  EXPECT_FALSE(mapping.pairs.empty());
  std::uint32_t last = 0;
  bool first = true;
  for (const auto& p : mapping.pairs) {
    EXPECT_GT(p.depth, 0.0);
    EXPECT_GE(p.h, 0);
    EXPECT_LT(p.h, 376);
    EXPECT_GE(p.w, 0);
    EXPECT_LT(p.w, 1241);
    EXPECT_GT(cloud.points[p.point_index].z, 0.0f);
    if (!first) {
      EXPECT_GT(p.point_index, last);
    }
    last = p.point_index;
    first = false;
  }
}

TEST(ProjectTest, ScaleConsistentBeforeRounding) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<float> c(-5.0f, 5.0f);
  std::uniform_real_distribution<float> depth(0.5f, 30.0f);
  const CameraModel base = Pinhole(250, 600, 180, {376, 1241});
  for (double s : {0.5, 2.0, 3.0}) {
    const CameraModel scaled = Pinhole(250 * s, 600 * s, 180 * s, {376, 1241});
    for (int i = 0; i < 200; ++i) {
      const Point p{c(rng), c(rng), depth(rng), 0};
      ProjectedPoint a, b;
      ASSERT_TRUE(ProjectContinuous(p, base, &a));
      ASSERT_TRUE(ProjectContinuous(p, scaled, &b));
      EXPECT_NEAR(b.u, s * a.u, 1e-9 * std::abs(b.u) + 1e-9);
      EXPECT_NEAR(b.v, s * a.v, 1e-9 * std::abs(b.v) + 1e-9);
    }
  }
}

TEST(ProjectTest, InvalidExtrinsicRejected) {
  CameraModel camera = Pinhole(1, 0, 0, {10, 10});
  camera.extrinsic[3][0] = 1.0;
  EXPECT_THROW(ProjectPoints(Cloud({{0, 0, 1, 0}}), camera), Error);
}

TEST(InstanceBoxesTest, MinMaxByHand) {
  PixelMapping mapping;
  mapping.pairs = {{0, 10, 20, 1.0, 2}, {1, 30, 40, 1.0, 2}, {2, 5, 5, 1.0, 2}};
  const std::vector<PointLabel> labels{{10, 3}, {10, 3}, {40, 0}};
  const auto boxes = InstanceBoxes(mapping, labels, {10});
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0].inst_id, 3u);
  EXPECT_EQ(boxes[0].h_min, 10);
  EXPECT_EQ(boxes[0].h_max, 30);
  EXPECT_EQ(boxes[0].w_min, 20);
  EXPECT_EQ(boxes[0].w_max, 40);
  EXPECT_EQ(boxes[0].support, 2u);
}

TEST(InstanceBoxesTest, NoProjectedPixelsNoBox) {
  PixelMapping mapping;
  const std::vector<PointLabel> labels{{10, 3}};
  EXPECT_TRUE(InstanceBoxes(mapping, labels, {10}).empty());
}

TEST(InstanceBoxesTest, SingletonIsDegenerateBox) {
  PixelMapping mapping;
  mapping.pairs = {{0, 7, 9, 1.0, 2}};
  const std::vector<PointLabel> labels{{10, 1}};
  const auto boxes = InstanceBoxes(mapping, labels, {10}, 1);
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0].h_min, boxes[0].h_max);
  EXPECT_EQ(boxes[0].w_min, boxes[0].w_max);
  EXPECT_TRUE(InstanceBoxes(mapping, labels, {10}, 2).empty());
}

TEST(InstanceBoxesTest, MatchesBruteForceScan) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 400;
    std::vector<PointLabel> labels(n);
    PixelMapping mapping;
    std::uniform_int_distribution<std::uint32_t> sem(0, 3), inst(0, 6);
    std::uniform_int_distribution<int> h(0, 99), w(0, 199);
    std::bernoulli_distribution keep(0.7);
    for (int i = 0; i < n; ++i) {
      labels[i] = {sem(rng), inst(rng)};
      if (keep(rng)) {
        mapping.pairs.push_back({static_cast<std::uint32_t>(i), h(rng), w(rng), 1.0, 2});
      }
    }
    const std::set<std::uint32_t> things{1, 2};
    const auto boxes = InstanceBoxes(mapping, labels, things);
    std::map<std::uint32_t, InstanceBox> expected;
    for (std::uint32_t id = 1; id <= 6; ++id) {
      InstanceBox box;
      box.inst_id = id;
      box.view_id = 2;
      box.h_min = box.w_min = 1 << 20;
      box.h_max = box.w_max = -1;
      for (const auto& p : mapping.pairs) {
        const PointLabel& l = labels[p.point_index];
        if (l.inst != id || !things.count(l.sem)) continue;
        box.h_min = std::min(box.h_min, p.h);
        box.h_max = std::max(box.h_max, p.h);
        box.w_min = std::min(box.w_min, p.w);
        box.w_max = std::max(box.w_max, p.w);
        ++box.support;
      }
      if (box.support > 0) expected[id] = box;
    }
    ASSERT_EQ(boxes.size(), expected.size());
    for (const auto& b : boxes) {
      const InstanceBox& e = expected.at(b.inst_id);
      EXPECT_EQ(b.h_min, e.h_min);
      EXPECT_EQ(b.h_max, e.h_max);
      EXPECT_EQ(b.w_min, e.w_min);
      EXPECT_EQ(b.w_max, e.w_max);
      EXPECT_EQ(b.support, e.support);
    }
  }
}

TEST(MappingTensorTest, RoundTrip) {
  PixelMapping mapping;
  mapping.pairs = {{3, 1, 2, 4.5, 2}, {9, 0, 7, 12.25, 3}};
  const Tensor t = MappingToTensor(mapping);
  EXPECT_EQ(t.dims, (std::vector<std::uint32_t>{2, 5}));
  EXPECT_EQ(MappingFromTensor(t).pairs, mapping.pairs);
}

TEST(BoxesTsvTest, RoundTrip) {
  testing::TempDir dir;
  const std::vector<InstanceBox> boxes{{1, 2, 3, 4, 5, 6, 1.0, 7},
                                       {9, 2, 0, 0, 0, 0, 0.5, 1}};
  WriteBoxesTsv(dir / "b.tsv", boxes);
  EXPECT_EQ(ReadBoxesTsv(dir / "b.tsv"), boxes);
}

}  // namespace
}  // namespace latentlab
