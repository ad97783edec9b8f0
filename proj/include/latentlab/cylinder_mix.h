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

#ifndef LATENTLAB_CYLINDER_MIX_H_
#define LATENTLAB_CYLINDER_MIX_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "latentlab/cylinder_grid.h"
#include "latentlab/point_cloud.h"

namespace latentlab {

struct RegionSize {
  int x = 4;
  int y = 4;
  int z = 2;

  friend bool operator==(const RegionSize&, const RegionSize&) = default;
};

struct MixSpec {
  RegionSize regions;
  double p_cylmix = 0.25;
  std::uint64_t seed = 0;

  // Throws Error(kInvalidArgument) unless 1 <= R_k <= G_k and p in [0, 1].
  void Validate(const GridDims& grid) const;
};

struct RegionIndex {
  int x = 0;
  int y = 0;
  int z = 0;

  friend bool operator==(const RegionIndex&, const RegionIndex&) = default;
};

// r_k = floor(v_k * R_k / G_k), in integer arithmetic.
RegionIndex ComputeRegionIndex(const VoxelIndex& voxel, const GridDims& grid,
                               const RegionSize& regions);

// Judgment for the first mixed cloud: not(even(r_x) xor even(r_y)) xor
// even(r_z). True exactly when r_x + r_y + r_z is odd, so neighbouring
// regions along any axis alternate.
bool MixMembership(const RegionIndex& region);

struct MixResult {
  PointCloud first;
  PointCloud second;
  bool mixed = false;
};

// Interleaved mixing of two labeled clouds. The gate draws once from an
// engine seeded with mix.seed; with probability 1 - p_cylmix the inputs are
// returned untouched. Otherwise
//
//   first  = a[J] + b[J]
//   second = a[!J] + b[!J]
//
// with a-sourced points ahead of b-sourced ones, each in original order.
// Points keep their labels. Inputs without provenance are tagged
// (source_a | source_b, row) so every output point can be traced back.
// Points are always clamped into the grid so none is lost.
MixResult CylinderMix(const PointCloud& a, const PointCloud& b,
                      const CylinderGridSpec& grid, const MixSpec& mix,
                      std::uint32_t source_a = 0, std::uint32_t source_b = 1);

struct ScanPairing {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::optional<std::string> leftover;
};

// Seeded shuffle, then consecutive pairs. Needs at least two frames.
ScanPairing PairScans(std::span<const std::string> frames, std::uint64_t seed);

// Independent per-pair seed derived from a base seed.
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream);

}  // namespace latentlab

#endif  // LATENTLAB_CYLINDER_MIX_H_
