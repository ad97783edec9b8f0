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

#ifndef LATENTLAB_DATASET_IO_H_
#define LATENTLAB_DATASET_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "latentlab/camera_projection.h"
#include "latentlab/point_cloud.h"

namespace latentlab {

// SemanticKITTI scans: little-endian float32 (x, y, z, remission) per point.
PointCloud ReadScan(const std::filesystem::path& path);
void WriteScan(const std::filesystem::path& path, const PointCloud& cloud);

// SemanticKITTI labels: one little-endian uint32 per point, semantic class
// in the low 16 bits and instance id in the high 16 bits.
std::vector<PointLabel> ReadLabels(const std::filesystem::path& path,
                                   std::size_t n_points);
void WriteLabels(const std::filesystem::path& path,
                 std::span<const PointLabel> labels);

std::uint32_t PackLabel(const PointLabel& label);
PointLabel UnpackLabel(std::uint32_t value);

// Reads a KITTI calib.txt. The projection row is "P<view>:" (12 numbers),
// the LiDAR-to-camera transform is "Tr:" (12 numbers, padded to 4x4).
CameraModel ReadCalibration(const std::filesystem::path& path, int view = 2,
                            ImageSize image_size = kKittiImageSize);
void WriteCalibration(const std::filesystem::path& path,
                      const CameraModel& camera);

struct SplitManifest {
  std::vector<std::string> frames;
  std::vector<std::string> labeled;
  std::vector<std::string> unlabeled;
  double ratio = 1.0;
};

// Stride between labeled frames, round(1 / ratio) and at least 1.
std::size_t SplitStride(double ratio);

// Labels frames 0, k, 2k, ... with k = SplitStride(ratio).
SplitManifest FixedIntervalSplit(std::span<const std::string> frames,
                                 double ratio);

// "frame_id<TAB>labeled|unlabeled" per line, in frame order.
void WriteSplit(const std::filesystem::path& path, const SplitManifest& split);
SplitManifest ReadSplit(const std::filesystem::path& path);

enum class LabelKind { kGroundTruth, kPseudo };

struct TrainingEntry {
  std::string frame;
  std::filesystem::path label_path;
  LabelKind kind = LabelKind::kGroundTruth;

  friend bool operator==(const TrainingEntry&, const TrainingEntry&) = default;
};

struct TrainingManifest {
  std::vector<TrainingEntry> entries;
};

// Labeled frames point at <gt_dir>/<frame>.label, unlabeled frames at
// <pseudo_dir>/<frame>.label, which must exist.
TrainingManifest SelfTrainingManifest(const SplitManifest& split,
                                      const std::filesystem::path& gt_dir,
                                      const std::filesystem::path& pseudo_dir);

// "frame_id<TAB>label_path<TAB>ground_truth|pseudo" per line.
std::string FormatManifest(const TrainingManifest& manifest);
void WriteManifest(const std::filesystem::path& path,
                   const TrainingManifest& manifest);

}  // namespace latentlab

#endif  // LATENTLAB_DATASET_IO_H_
