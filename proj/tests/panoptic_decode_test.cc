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

#include "latentlab/panoptic_decode.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "latentlab/error.h"
#include "oracles.h"

namespace latentlab {
namespace {

struct Fixture {
  Tensor semantic, offsets, fore;
};

Fixture Uniform(int h, int w, float cls) {
  Fixture f{Tensor({static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(w)}),
            Tensor({static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(w), 2}),
            Tensor({static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(w)})};
  std::fill(f.semantic.data.begin(), f.semantic.data.end(), cls);
  std::fill(f.fore.data.begin(), f.fore.data.end(), 1.0f);
  return f;
}

TEST(FindCentersTest, SinglePeak) {
  Heatmap map(9, 9);
  map.at(4, 5) = 0.9;
  map.at(4, 4) = 0.3;
  const auto centers = FindCenters(map, DecodeSpec{});
  ASSERT_EQ(centers.size(), 1u);
  EXPECT_EQ(centers[0], (Center{4, 5, 0.9}));
}

TEST(FindCentersTest, BelowThresholdIsEmpty) {
  Heatmap map(5, 5);
  map.at(2, 2) = 0.05;
  EXPECT_TRUE(FindCenters(map, DecodeSpec{}).empty());
}

TEST(FindCentersTest, NearbyPeakSuppressedInsideWindow) {
  // A 5 x 5 window reaches 2 cells from its centre.
  Heatmap map(10, 10);
  map.at(5, 3) = 0.9;
  map.at(5, 5) = 0.6;
  const auto centers = FindCenters(map, DecodeSpec{});
  ASSERT_EQ(centers.size(), 1u);
  EXPECT_EQ(centers[0].w, 3);
  map.at(5, 5) = 0.0;
  map.at(5, 6) = 0.6;
  EXPECT_EQ(FindCenters(map, DecodeSpec{}).size(), 2u);
}

TEST(FindCentersTest, PlateauHasNoStrictMaximum) {
  Heatmap map(5, 5);
  map.at(2, 2) = 0.5;
  map.at(2, 3) = 0.5;
  EXPECT_TRUE(FindCenters(map, DecodeSpec{}).empty());
}

TEST(FindCentersTest, SortedAndTruncated) {
  Heatmap map(20, 20);
  map.at(2, 2) = 0.3;
  map.at(2, 10) = 0.8;
  map.at(10, 2) = 0.5;
  map.at(10, 10) = 0.8;
  DecodeSpec spec;
  const auto all = FindCenters(map, spec);
  ASSERT_EQ(all.size(), 4u);
  EXPECT_EQ(all[0], (Center{2, 10, 0.8}));
  EXPECT_EQ(all[1], (Center{10, 10, 0.8}));
  EXPECT_EQ(all[2].score, 0.5);
  spec.top_k = 2;
  EXPECT_EQ(FindCenters(map, spec).size(), 2u);
}

TEST(FindCentersTest, MatchesWindowedLocalMaxOracle) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> v(0.0, 1.0);
  for (int kernel : {1, 3, 5, 7}) {
    Heatmap map(12, 12);
    for (int m = 0; m < 12; ++m) {
      for (int n = 0; n < 12; ++n) map.at(m, n) = v(rng);
    }
    DecodeSpec spec;
    spec.nms_kernel = kernel;
    spec.center_threshold = 0.2;
    spec.top_k = 1000;
    std::set<std::pair<int, int>> expected;
    const int r = kernel / 2;
    for (int m = 0; m < 12; ++m) {
      for (int n = 0; n < 12; ++n) {
        bool peak = map.at(m, n) >= 0.2;
        for (int a = m - r; a <= m + r; ++a) {
          for (int b = n - r; b <= n + r; ++b) {
            if (a < 0 || b < 0 || a >= 12 || b >= 12 || (a == m && b == n)) continue;
            if (map.at(a, b) >= map.at(m, n)) peak = false;
          }
        }
        if (peak) expected.insert({m, n});
      }
    }
    std::set<std::pair<int, int>> got;
    for (const Center& c : FindCenters(map, spec)) got.insert({c.h, c.w});
    EXPECT_EQ(got, expected) << kernel;
  }
}

TEST(DecodeSpecTest, EvenKernelRejected) {
  DecodeSpec spec;
  spec.nms_kernel = 4;
  EXPECT_THROW(spec.Validate(), Error);
  spec.nms_kernel = 3;
  spec.top_k = 0;
  EXPECT_THROW(spec.Validate(), Error);
}

TEST(AssignInstancesTest, SingleCluster) {
  const Fixture f = Uniform(4, 4, 10);
  const PanopticMap map =
      AssignInstances(f.semantic, f.offsets, f.fore, {{1, 1, 0.9}}, {10});
  for (std::size_t i = 0; i < map.size(); ++i) {
    EXPECT_EQ(map.inst[i], 1u);
    EXPECT_EQ(map.sem[i], 10u);
  }
}

TEST(AssignInstancesTest, NoCentersNoInstances) {
  const Fixture f = Uniform(4, 4, 10);
  const PanopticMap map = AssignInstances(f.semantic, f.offsets, f.fore, {}, {10});
  for (std::uint32_t id : map.inst) EXPECT_EQ(id, 0u);
}

TEST(AssignInstancesTest, StuffAndBackgroundStayUnassigned) {
  Fixture f = Uniform(2, 2, 10);
  f.semantic.data[1] = 40;
  f.fore.data[2] = 0.49f;
  const PanopticMap map =
      AssignInstances(f.semantic, f.offsets, f.fore, {{0, 0, 0.9}}, {10});
  EXPECT_EQ(map.inst, (std::vector<std::uint32_t>{1, 0, 0, 1}));
  EXPECT_EQ(map.sem, (std::vector<std::uint32_t>{10, 40, 10, 10}));
}

TEST(AssignInstancesTest, TieGoesToEarlierCenter) {
  const Fixture f = Uniform(1, 3, 10);
  const PanopticMap map = AssignInstances(f.semantic, f.offsets, f.fore,
                                          {{0, 2, 0.9}, {0, 0, 0.5}}, {10});
  EXPECT_EQ(map.inst, (std::vector<std::uint32_t>{2, 1, 1}));
}

TEST(AssignInstancesTest, MatchesNearestCenterOracle) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<float> off(-3.0f, 3.0f);
  std::uniform_int_distribution<int> pos(0, 7);
  for (int trial = 0; trial < 20; ++trial) {
    Fixture f = Uniform(8, 8, 10);
    for (float& o : f.offsets.data) o = off(rng);
    std::vector<Center> centers{{pos(rng), pos(rng), 0.9}, {pos(rng), pos(rng), 0.4}};
    std::vector<std::pair<int, int>> oc;
    for (const Center& c : centers) oc.push_back({c.h, c.w});
    const PanopticMap map = AssignInstances(f.semantic, f.offsets, f.fore, centers, {10});
    for (int h = 0; h < 8; ++h) {
      for (int w = 0; w < 8; ++w) {
        const std::size_t i = static_cast<std::size_t>(h) * 8 + w;
        ASSERT_EQ(map.inst[i],
                  oracle::NearestCenter(h + double{f.offsets.data[2 * i]},
                                        w + double{f.offsets.data[2 * i + 1]}, oc));
      }
    }
    EXPECT_EQ(AssignInstances(f.semantic, f.offsets, f.fore, centers, {10}), map);
  }
}

TEST(AssignInstancesTest, ShapeMismatchIsError) {
  const Fixture f = Uniform(2, 2, 10);
  const Tensor bad_offsets({2, 2, 3});
  try {
    AssignInstances(f.semantic, bad_offsets, f.fore, {}, {10});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
  }
}

TEST(MajoritySemanticTest, MajorityAndTies) {
  PanopticMap map(1, 6);
  map.sem = {10, 10, 10, 10, 10, 18};
  map.inst = {1, 1, 1, 1, 1, 1};
  EXPECT_EQ(MajoritySemantic(map).sem, std::vector<std::uint32_t>(6, 10));
  map.sem = {18, 10, 18, 10, 18, 10};
  EXPECT_EQ(MajoritySemantic(map).sem, std::vector<std::uint32_t>(6, 10));
  PanopticMap single(1, 2);
  single.sem = {13, 40};
  single.inst = {4, 0};
  EXPECT_EQ(MajoritySemantic(single), single);
}

TEST(MajoritySemanticTest, LeavesUnassignedCellsAlone) {
  PanopticMap map(1, 4);
  map.sem = {10, 18, 40, 18};
  map.inst = {1, 1, 0, 2};
  const PanopticMap out = MajoritySemantic(map);
  EXPECT_EQ(out.sem, (std::vector<std::uint32_t>{10, 10, 40, 18}));
  EXPECT_EQ(out.inst, map.inst);
}

TEST(PanopticMapTest, TensorRoundTrip) {
  PanopticMap map(2, 2);
  map.sem = {1, 2, 3, 4};
  map.inst = {0, 1, 0, 2};
  EXPECT_EQ(PanopticMap::FromTensor(map.ToTensor()), map);
}

}  // namespace
}  // namespace latentlab
