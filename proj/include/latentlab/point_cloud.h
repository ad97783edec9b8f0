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

#ifndef LATENTLAB_POINT_CLOUD_H_
#define LATENTLAB_POINT_CLOUD_H_

#include <cstdint>
#include <optional>
#include <vector>

namespace latentlab {

// One LiDAR return. b is the brightness / remission channel as stored in the
// scan file.
struct Point {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;
  float b = 0.0f;

  friend bool operator==(const Point&, const Point&) = default;
};

struct PointLabel {
  std::uint32_t sem = 0;
  std::uint32_t inst = 0;

  friend bool operator==(const PointLabel&, const PointLabel&) = default;
};

// Where a point came from: the frame it was read from and its row in that
// frame's scan file.
struct Provenance {
  std::uint32_t source_frame = 0;
  std::uint32_t original_index = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
  friend auto operator<=>(const Provenance&, const Provenance&) = default;
};

struct PointCloud {
  std::vector<Point> points;
  std::optional<std::vector<PointLabel>> labels;
  std::optional<std::vector<Provenance>> provenance;

  std::size_t size() const { return points.size(); }
  bool has_labels() const { return labels.has_value(); }
  bool has_provenance() const { return provenance.has_value(); }

  // Throws Error(kShape) if labels or provenance are present with the wrong
  // length.
  void Validate() const;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

}  // namespace latentlab

#endif  // LATENTLAB_POINT_CLOUD_H_
