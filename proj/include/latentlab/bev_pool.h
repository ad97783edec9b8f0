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

#ifndef LATENTLAB_BEV_POOL_H_
#define LATENTLAB_BEV_POOL_H_

#include <span>
#include <vector>

#include "latentlab/camera_projection.h"
#include "latentlab/cylinder_grid.h"
#include "latentlab/tensor.h"

namespace latentlab {

// Dense G_x x G_y x G_z x C grid, row-major with channels innermost.
class FeatureGrid {
 public:
  FeatureGrid(GridDims dims, int channels, float fill = 0.0f);

  const GridDims& dims() const { return dims_; }
  int channels() const { return channels_; }
  std::span<const float> data() const { return data_; }
  std::span<float> mutable_data() { return data_; }

  std::size_t CellOffset(int x, int y, int z) const;
  std::span<const float> Cell(int x, int y, int z) const;
  std::span<float> MutableCell(int x, int y, int z);

  // G_x x G_y x G_z x C.
  Tensor ToTensor4d() const;
  // G_x x G_y x (G_z * C): height folded into channels for a 2-D backbone.
  // Same memory order as the 4-D layout.
  Tensor ToTensor3d() const;
  static FeatureGrid FromTensor4d(const Tensor& tensor);

  friend bool operator==(const FeatureGrid&, const FeatureGrid&) = default;

 private:
  GridDims dims_;
  int channels_;
  std::vector<float> data_;
};

// Per-voxel elementwise maximum of the rows of features (N x channels) that
// fall in each voxel. Empty voxels hold fill.
FeatureGrid BevMaxPool(std::span<const float> features, int channels,
                       std::span<const VoxelIndex> indices, GridDims dims,
                       float fill = 0.0f);

// Camera BEV pooling: each mapped pair contributes the image feature at its
// pixel (image_features is H x W x C) to its point's voxel.
FeatureGrid CameraBevPool(const Tensor& image_features,
                          const PixelMapping& mapping,
                          std::span<const VoxelIndex> point_voxels,
                          GridDims dims, float fill = 0.0f);

// Per cell: out = W^T [lidar ; camera] + bias, with weights shaped
// (C_lidar + C_camera) x C_out, row-major.
FeatureGrid FuseBev(const FeatureGrid& lidar, const FeatureGrid& camera,
                    std::span<const float> weights,
                    std::span<const float> bias);

}  // namespace latentlab

#endif  // LATENTLAB_BEV_POOL_H_
