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

#include "latentlab/bev_pool.h"

#include <algorithm>
#include <string>

#include "latentlab/error.h"

namespace latentlab {
namespace {

void CheckDims(const GridDims& dims, int channels) {
  if (dims.x < 1 || dims.y < 1 || dims.z < 1 || channels < 1) {
    throw Error(ErrorCode::kShape, "feature grid dims must be positive");
  }
}

bool InGrid(const VoxelIndex& v, const GridDims& dims) {
  return v.x >= 0 && v.x < dims.x && v.y >= 0 && v.y < dims.y && v.z >= 0 &&
         v.z < dims.z;
}

}  // namespace

FeatureGrid::FeatureGrid(GridDims dims, int channels, float fill)
    : dims_(dims), channels_(channels) {
  CheckDims(dims, channels);
  data_.assign(dims.cells() * static_cast<std::size_t>(channels), fill);
}

std::size_t FeatureGrid::CellOffset(int x, int y, int z) const {
  const std::size_t cell =
      (static_cast<std::size_t>(x) * dims_.y + static_cast<std::size_t>(y)) *
          dims_.z +
      static_cast<std::size_t>(z);
  return cell * static_cast<std::size_t>(channels_);
}

std::span<const float> FeatureGrid::Cell(int x, int y, int z) const {
  return std::span<const float>(data_).subspan(CellOffset(x, y, z),
                                               channels_);
}

std::span<float> FeatureGrid::MutableCell(int x, int y, int z) {
  return std::span<float>(data_).subspan(CellOffset(x, y, z), channels_);
}

Tensor FeatureGrid::ToTensor4d() const {
  return Tensor({static_cast<std::uint32_t>(dims_.x),
                 static_cast<std::uint32_t>(dims_.y),
                 static_cast<std::uint32_t>(dims_.z),
                 static_cast<std::uint32_t>(channels_)},
                data_);
}

Tensor FeatureGrid::ToTensor3d() const {
  return Tensor({static_cast<std::uint32_t>(dims_.x),
                 static_cast<std::uint32_t>(dims_.y),
                 static_cast<std::uint32_t>(dims_.z * channels_)},
                data_);
}

FeatureGrid FeatureGrid::FromTensor4d(const Tensor& tensor) {
  if (tensor.rank() != 4) {
    throw Error(ErrorCode::kShape, "feature grid tensor must be 4-D");
  }
  FeatureGrid grid(GridDims{static_cast<int>(tensor.dim(0)),
                            static_cast<int>(tensor.dim(1)),
                            static_cast<int>(tensor.dim(2))},
                   static_cast<int>(tensor.dim(3)));
  if (tensor.data.size() != grid.data_.size()) {
    throw Error(ErrorCode::kShape, "feature grid payload size mismatch");
  }
  grid.data_ = tensor.data;
  return grid;
}

FeatureGrid BevMaxPool(std::span<const float> features, int channels,
                       std::span<const VoxelIndex> indices, GridDims dims,
                       float fill) {
  CheckDims(dims, channels);
  if (features.size() != indices.size() * static_cast<std::size_t>(channels)) {
    throw Error(ErrorCode::kShape,
                "feature rows (" +
                    std::to_string(features.size() / channels) +
                    ") do not match index count (" +
                    std::to_string(indices.size()) + ")");
  }
  FeatureGrid grid(dims, channels, fill);
  std::vector<bool> occupied(dims.cells(), false);
  std::span<float> data = grid.mutable_data();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const VoxelIndex& v = indices[i];
    if (!InGrid(v, dims)) {
      throw Error(ErrorCode::kInvalidIndex,
                  "voxel index of row " + std::to_string(i) +
                      " lies outside the grid");
    }
    const std::size_t offset = grid.CellOffset(v.x, v.y, v.z);
    const std::size_t cell = offset / static_cast<std::size_t>(channels);
    const float* row = features.data() + i * static_cast<std::size_t>(channels);
    float* dst = data.data() + offset;
    if (!occupied[cell]) {
      std::copy(row, row + channels, dst);
      occupied[cell] = true;
    } else {
      for (int c = 0; c < channels; ++c) dst[c] = std::max(dst[c], row[c]);
    }
  }
  return grid;
}

FeatureGrid CameraBevPool(const Tensor& image_features,
                          const PixelMapping& mapping,
                          std::span<const VoxelIndex> point_voxels,
                          GridDims dims, float fill) {
  if (image_features.rank() != 3) {
    throw Error(ErrorCode::kShape, "image features must be H x W x C");
  }
  const std::uint32_t height = image_features.dim(0);
  const std::uint32_t width = image_features.dim(1);
  const int channels = static_cast<int>(image_features.dim(2));
  std::vector<float> gathered;
  std::vector<VoxelIndex> indices;
  gathered.reserve(mapping.pairs.size() * static_cast<std::size_t>(channels));
  indices.reserve(mapping.pairs.size());
  for (const PixelPair& pair : mapping.pairs) {
    if (pair.point_index >= point_voxels.size()) {
      throw Error(ErrorCode::kShape,
                  "mapping references point " +
                      std::to_string(pair.point_index) +
                      " beyond the voxel list");
    }
    if (pair.h < 0 || pair.w < 0 || static_cast<std::uint32_t>(pair.h) >= height ||
        static_cast<std::uint32_t>(pair.w) >= width) {
      throw Error(ErrorCode::kShape, "mapped pixel outside the feature image");
    }
    const std::size_t base =
        (static_cast<std::size_t>(pair.h) * width + pair.w) * channels;
    gathered.insert(gathered.end(), image_features.data.begin() + base,
                    image_features.data.begin() + base + channels);
    indices.push_back(point_voxels[pair.point_index]);
  }
  return BevMaxPool(gathered, channels, indices, dims, fill);
}

FeatureGrid FuseBev(const FeatureGrid& lidar, const FeatureGrid& camera,
                    std::span<const float> weights,
                    std::span<const float> bias) {
  if (!(lidar.dims() == camera.dims())) {
    throw Error(ErrorCode::kShape,
                "LiDAR and camera BEV grids differ in spatial dims");
  }
  const int in_channels = lidar.channels() + camera.channels();
  if (bias.empty() ||
      weights.size() != static_cast<std::size_t>(in_channels) * bias.size()) {
    throw Error(ErrorCode::kShape,
                "fusion weights must be (C_lidar + C_camera) x C_out");
  }
  const int out_channels = static_cast<int>(bias.size());
  FeatureGrid out(lidar.dims(), out_channels);
  const GridDims& d = lidar.dims();
  std::vector<double> concat(in_channels);
  for (int x = 0; x < d.x; ++x) {
    for (int y = 0; y < d.y; ++y) {
      for (int z = 0; z < d.z; ++z) {
        auto lc = lidar.Cell(x, y, z);
        auto cc = camera.Cell(x, y, z);
        std::copy(lc.begin(), lc.end(), concat.begin());
        std::copy(cc.begin(), cc.end(), concat.begin() + lc.size());
        std::span<float> dst = out.MutableCell(x, y, z);
        for (int o = 0; o < out_channels; ++o) {
          double acc = bias[o];
          for (int i = 0; i < in_channels; ++i) {
            acc += static_cast<double>(
                       weights[static_cast<std::size_t>(i) * out_channels + o]) *
                   concat[i];
          }
          dst[o] = static_cast<float>(acc);
        }
      }
    }
  }
  return out;
}

}  // namespace latentlab
