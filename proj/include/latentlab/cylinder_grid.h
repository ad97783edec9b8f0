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

#ifndef LATENTLAB_CYLINDER_GRID_H_
#define LATENTLAB_CYLINDER_GRID_H_

#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "latentlab/point_cloud.h"

namespace latentlab {

struct GridDims {
  int x = 480;  // rho bins
  int y = 360;  // phi bins
  int z = 32;   // height bins

  std::size_t cells() const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(y) *
           static_cast<std::size_t>(z);
  }
  friend bool operator==(const GridDims&, const GridDims&) = default;
};

// Cylindrical partition: (rho, phi, z) -> (v_x, v_y, v_z).
struct CylinderGridSpec {
  double rho_min = 3.0;
  double rho_max = 50.0;
  double z_min = -3.0;
  double z_max = 1.5;
  double phi_min = -std::numbers::pi;
  double phi_max = std::numbers::pi;
  GridDims grid;
  // When set, points outside [rho_min, rho_max] x [z_min, z_max] get no
  // index instead of being clamped to the border bins.
  bool drop_out_of_bounds = false;

  // Throws Error(kInvalidArgument) on empty ranges or non-positive bins.
  void Validate() const;
};

struct VoxelIndex {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;

  friend bool operator==(const VoxelIndex&, const VoxelIndex&) = default;
};

// Bin of value in [lo, hi) split into bins cells, clamped to [0, bins - 1].
int AxisBin(double value, double lo, double hi, int bins);

// Index of one point under spec, always clamped (drop_out_of_bounds is
// ignored). Throws Error(kInvalidPoint) on non-finite coordinates.
VoxelIndex VoxelizePoint(const Point& point, const CylinderGridSpec& spec);

bool InBounds(const Point& point, const CylinderGridSpec& spec);

// One index per input point, in input order.
std::vector<VoxelIndex> Voxelize(const PointCloud& cloud,
                                 const CylinderGridSpec& spec);

// Honours drop_out_of_bounds: dropped points map to std::nullopt.
std::vector<std::optional<VoxelIndex>> VoxelizeFiltered(
    const PointCloud& cloud, const CylinderGridSpec& spec);

}  // namespace latentlab

#endif  // LATENTLAB_CYLINDER_GRID_H_
