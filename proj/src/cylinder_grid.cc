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

#include <cmath>
#include <string>

#include "latentlab/error.h"

namespace latentlab {

void CylinderGridSpec::Validate() const {
  if (!(rho_min < rho_max) || !(z_min < z_max) || !(phi_min < phi_max)) {
    throw Error(ErrorCode::kInvalidArgument,
                "cylinder grid bounds must satisfy min < max");
  }
  if (grid.x < 1 || grid.y < 1 || grid.z < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "cylinder grid needs at least one bin per axis");
  }
}

int AxisBin(double value, double lo, double hi, int bins) {
  const double scaled = std::floor((value - lo) / (hi - lo) * bins);
  if (!(scaled > 0.0)) return 0;
  if (scaled >= bins - 1) return bins - 1;
  return static_cast<int>(scaled);
}

VoxelIndex VoxelizePoint(const Point& point, const CylinderGridSpec& spec) {
  if (!std::isfinite(point.x) || !std::isfinite(point.y) ||
      !std::isfinite(point.z)) {
    throw Error(ErrorCode::kInvalidPoint, "point has non-finite coordinates");
  }
  const double x = point.x;
  const double y = point.y;
  const double rho = std::sqrt(x * x + y * y);
  const double phi = std::atan2(y, x);
  return VoxelIndex{AxisBin(rho, spec.rho_min, spec.rho_max, spec.grid.x),
                    AxisBin(phi, spec.phi_min, spec.phi_max, spec.grid.y),
                    AxisBin(point.z, spec.z_min, spec.z_max, spec.grid.z)};
}

bool InBounds(const Point& point, const CylinderGridSpec& spec) {
  const double x = point.x;
  const double y = point.y;
  const double rho = std::sqrt(x * x + y * y);
  return rho >= spec.rho_min && rho <= spec.rho_max && point.z >= spec.z_min &&
         point.z <= spec.z_max;
}

std::vector<VoxelIndex> Voxelize(const PointCloud& cloud,
                                 const CylinderGridSpec& spec) {
  spec.Validate();
  std::vector<VoxelIndex> indices;
  indices.reserve(cloud.points.size());
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    try {
      indices.push_back(VoxelizePoint(cloud.points[i], spec));
    } catch (const Error& e) {
      throw Error(e.code(), "point " + std::to_string(i) + ": " + e.what());
    }
  }
  return indices;
}

std::vector<std::optional<VoxelIndex>> VoxelizeFiltered(
    const PointCloud& cloud, const CylinderGridSpec& spec) {
  const std::vector<VoxelIndex> all = Voxelize(cloud, spec);
  std::vector<std::optional<VoxelIndex>> out(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!spec.drop_out_of_bounds || InBounds(cloud.points[i], spec)) {
      out[i] = all[i];
    }
  }
  return out;
}

}  // namespace latentlab
