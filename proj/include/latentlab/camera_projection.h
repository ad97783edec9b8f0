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

#ifndef LATENTLAB_CAMERA_PROJECTION_H_
#define LATENTLAB_CAMERA_PROJECTION_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <vector>

#include "latentlab/point_cloud.h"
#include "latentlab/tensor.h"

namespace latentlab {

using Matrix3x4 = std::array<std::array<double, 4>, 3>;
using Matrix4x4 = std::array<std::array<double, 4>, 4>;

struct ImageSize {
  int height = 0;
  int width = 0;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

// KITTI odometry colour camera resolution.
inline constexpr ImageSize kKittiImageSize{376, 1241};

// Pinhole camera. intrinsic maps camera-frame homogeneous points to pixels,
// extrinsic maps LiDAR-frame points into the camera frame.
struct CameraModel {
  Matrix3x4 intrinsic{};
  Matrix4x4 extrinsic{};
  ImageSize image_size = kKittiImageSize;
  int view_id = 2;

  // Throws Error(kInvalidArgument) unless the extrinsic bottom row is
  // (0,0,0,1) and the image is non-empty.
  void Validate() const;
};

Matrix4x4 IdentityExtrinsic();

// (h, w) is (row, column) everywhere in this library.
struct PixelPair {
  std::uint32_t point_index = 0;
  int h = 0;
  int w = 0;
  double depth = 0.0;
  int view_id = 0;

  friend bool operator==(const PixelPair&, const PixelPair&) = default;
};

struct PixelMapping {
  std::vector<PixelPair> pairs;
};

struct InstanceBox {
  std::uint32_t inst_id = 0;
  int view_id = 0;
  int h_min = 0;
  int w_min = 0;
  int h_max = 0;
  int w_max = 0;
  double score = 1.0;
  std::uint32_t support = 0;

  int height() const { return h_max - h_min; }
  int width() const { return w_max - w_min; }

  friend bool operator==(const InstanceBox&, const InstanceBox&) = default;
};

// Continuous image coordinates before rounding. Returns false when the
// point is behind (or on) the camera plane.
struct ProjectedPoint {
  double u = 0.0;  // column
  double v = 0.0;  // row
  double depth = 0.0;
};
bool ProjectContinuous(const Point& point, const CameraModel& camera,
                       ProjectedPoint* out);

// Projects every point with positive camera depth, rounds (half away from
// zero) to the pixel grid and keeps the pixels inside the image. Pairs are in
// point order.
PixelMapping ProjectPoints(const PointCloud& cloud, const CameraModel& camera);

// One min/max pixel box per (view, instance) over the projected points of
// thing-class instances (inst > 0). Instances with fewer than min_support
// projected points are skipped. Output is sorted by (view, inst_id).
std::vector<InstanceBox> InstanceBoxes(const PixelMapping& mapping,
                                       std::span<const PointLabel> labels,
                                       const std::set<std::uint32_t>& things,
                                       std::uint32_t min_support = 1);

// Mapping <-> K x 5 tensor with rows (point_index, h, w, depth, view_id).
Tensor MappingToTensor(const PixelMapping& mapping);
PixelMapping MappingFromTensor(const Tensor& tensor);

// Boxes TSV: "inst_id view h_min w_min h_max w_max score support", tab
// separated, one box per line. Lines starting with '#' are comments.
void WriteBoxesTsv(const std::filesystem::path& path,
                   std::span<const InstanceBox> boxes);
std::vector<InstanceBox> ReadBoxesTsv(const std::filesystem::path& path);

}  // namespace latentlab

#endif  // LATENTLAB_CAMERA_PROJECTION_H_
