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

#include "latentlab/cylinder_mix.h"

#include <algorithm>
#include <random>
#include <string>

#include "latentlab/error.h"

namespace latentlab {

void MixSpec::Validate(const GridDims& grid) const {
  if (regions.x < 1 || regions.y < 1 || regions.z < 1 ||
      regions.x > grid.x || regions.y > grid.y || regions.z > grid.z) {
    throw Error(ErrorCode::kInvalidArgument,
                "region size must satisfy 1 <= R_k <= G_k on every axis");
  }
  if (!(p_cylmix >= 0.0 && p_cylmix <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "mix probability must be in [0, 1]");
  }
}

RegionIndex ComputeRegionIndex(const VoxelIndex& voxel, const GridDims& grid,
                               const RegionSize& regions) {
  auto axis = [](std::int32_t v, int g, int r) {
    return static_cast<int>((static_cast<std::int64_t>(v) * r) / g);
  };
  return RegionIndex{axis(voxel.x, grid.x, regions.x),
                     axis(voxel.y, grid.y, regions.y),
                     axis(voxel.z, grid.z, regions.z)};
}

bool MixMembership(const RegionIndex& region) {
  const bool even_x = region.x % 2 == 0;
  const bool even_y = region.y % 2 == 0;
  const bool even_z = region.z % 2 == 0;
  return (!(even_x != even_y)) != even_z;
}

namespace {

void CheckLabeled(const PointCloud& cloud, const char* name) {
  if (!cloud.has_labels()) {
    throw Error(ErrorCode::kUnlabeledInput,
                std::string("cloud ") + name + " has no labels");
  }
  cloud.Validate();
}

PointCloud EmptyLike() {
  PointCloud out;
  out.labels.emplace();
  out.provenance.emplace();
  return out;
}

void Append(const PointCloud& src, std::size_t row, std::uint32_t source,
            PointCloud* dst) {
  dst->points.push_back(src.points[row]);
  dst->labels->push_back((*src.labels)[row]);
  dst->provenance->push_back(
      src.has_provenance()
          ? (*src.provenance)[row]
          : Provenance{source, static_cast<std::uint32_t>(row)});
}

// Routes every point of src into first or second by its region parity.
void Scatter(const PointCloud& src, std::uint32_t source,
             const CylinderGridSpec& grid, const RegionSize& regions,
             PointCloud* first, PointCloud* second) {
  for (std::size_t i = 0; i < src.points.size(); ++i) {
    const VoxelIndex voxel = VoxelizePoint(src.points[i], grid);
    const bool in_first =
        MixMembership(ComputeRegionIndex(voxel, grid.grid, regions));
    Append(src, i, source, in_first ? first : second);
  }
}

}  // namespace

MixResult CylinderMix(const PointCloud& a, const PointCloud& b,
                      const CylinderGridSpec& grid, const MixSpec& mix,
                      std::uint32_t source_a, std::uint32_t source_b) {
  CheckLabeled(a, "a");
  CheckLabeled(b, "b");
  grid.Validate();
  mix.Validate(grid.grid);

  std::mt19937_64 rng(mix.seed);
  std::bernoulli_distribution gate(mix.p_cylmix);
  if (!gate(rng)) {
    return MixResult{a, b, false};
  }

  MixResult result{EmptyLike(), EmptyLike(), true};
  const std::size_t total = a.size() + b.size();
  for (PointCloud* out : {&result.first, &result.second}) {
    out->points.reserve(total / 2 + 1);
    out->labels->reserve(total / 2 + 1);
    out->provenance->reserve(total / 2 + 1);
  }
  Scatter(a, source_a, grid, mix.regions, &result.first, &result.second);
  Scatter(b, source_b, grid, mix.regions, &result.first, &result.second);
  return result;
}

ScanPairing PairScans(std::span<const std::string> frames,
                      std::uint64_t seed) {
  if (frames.size() < 2) {
    throw Error(ErrorCode::kNotEnoughFrames,
                "pairing needs at least 2 labeled frames, got " +
                    std::to_string(frames.size()));
  }
  std::vector<std::string> order(frames.begin(), frames.end());
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  ScanPairing pairing;
  for (std::size_t i = 0; i + 1 < order.size(); i += 2) {
    pairing.pairs.emplace_back(order[i], order[i + 1]);
  }
  if (order.size() % 2 == 1) pairing.leftover = order.back();
  return pairing;
}

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finaliser over the combined value.
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace latentlab
