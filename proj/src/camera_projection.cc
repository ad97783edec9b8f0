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

#include "latentlab/camera_projection.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "latentlab/error.h"
#include "latentlab/file_util.h"

namespace latentlab {

void CameraModel::Validate() const {
  const auto& last = extrinsic[3];
  if (last[0] != 0.0 || last[1] != 0.0 || last[2] != 0.0 || last[3] != 1.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "extrinsic bottom row must be (0, 0, 0, 1)");
  }
  if (image_size.height < 1 || image_size.width < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
  }
}

Matrix4x4 IdentityExtrinsic() {
  Matrix4x4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

bool ProjectContinuous(const Point& point, const CameraModel& camera,
                       ProjectedPoint* out) {
  const double lidar[4] = {point.x, point.y, point.z, 1.0};
  double cam[4] = {0.0, 0.0, 0.0, 0.0};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) cam[r] += camera.extrinsic[r][c] * lidar[c];
  }
  if (!(cam[2] > 0.0)) return false;
  double img[3] = {0.0, 0.0, 0.0};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) img[r] += camera.intrinsic[r][c] * cam[c];
  }
  if (!(img[2] > 0.0)) return false;
  out->u = img[0] / img[2];
  out->v = img[1] / img[2];
  out->depth = img[2];
  return std::isfinite(out->u) && std::isfinite(out->v);
}

PixelMapping ProjectPoints(const PointCloud& cloud,
                           const CameraModel& camera) {
  camera.Validate();
  const double height = camera.image_size.height;
  const double width = camera.image_size.width;
  PixelMapping mapping;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    ProjectedPoint projected;
    if (!ProjectContinuous(cloud.points[i], camera, &projected)) continue;
    // std::round rounds halves away from zero.
    const double h = std::round(projected.v);
    const double w = std::round(projected.u);
    if (h < 0.0 || h >= height || w < 0.0 || w >= width) continue;
    mapping.pairs.push_back(PixelPair{static_cast<std::uint32_t>(i),
                                      static_cast<int>(h),
                                      static_cast<int>(w), projected.depth,
                                      camera.view_id});
  }
  return mapping;
}

std::vector<InstanceBox> InstanceBoxes(const PixelMapping& mapping,
                                       std::span<const PointLabel> labels,
                                       const std::set<std::uint32_t>& things,
                                       std::uint32_t min_support) {
  std::map<std::pair<int, std::uint32_t>, InstanceBox> boxes;
  for (const PixelPair& pair : mapping.pairs) {
    if (pair.point_index >= labels.size()) {
      throw Error(ErrorCode::kShape,
                  "mapping references point " +
                      std::to_string(pair.point_index) + " but only " +
                      std::to_string(labels.size()) + " labels were given");
    }
    const PointLabel& label = labels[pair.point_index];
    if (label.inst == 0 || !things.contains(label.sem)) continue;
    auto [it, inserted] = boxes.try_emplace({pair.view_id, label.inst});
    InstanceBox& box = it->second;
    if (inserted) {
      box.inst_id = label.inst;
      box.view_id = pair.view_id;
      box.h_min = box.h_max = pair.h;
      box.w_min = box.w_max = pair.w;
      box.score = 1.0;
    } else {
      box.h_min = std::min(box.h_min, pair.h);
      box.h_max = std::max(box.h_max, pair.h);
      box.w_min = std::min(box.w_min, pair.w);
      box.w_max = std::max(box.w_max, pair.w);
    }
    ++box.support;
  }
  std::vector<InstanceBox> out;
  for (const auto& [key, box] : boxes) {
    if (box.support >= min_support) out.push_back(box);
  }
  return out;
}

Tensor MappingToTensor(const PixelMapping& mapping) {
  Tensor tensor({static_cast<std::uint32_t>(mapping.pairs.size()), 5});
  for (std::size_t i = 0; i < mapping.pairs.size(); ++i) {
    const PixelPair& p = mapping.pairs[i];
    float* row = tensor.data.data() + 5 * i;
    row[0] = static_cast<float>(p.point_index);
    row[1] = static_cast<float>(p.h);
    row[2] = static_cast<float>(p.w);
    row[3] = static_cast<float>(p.depth);
    row[4] = static_cast<float>(p.view_id);
  }
  return tensor;
}

PixelMapping MappingFromTensor(const Tensor& tensor) {
  if (tensor.rank() != 2 || tensor.dim(1) != 5) {
    throw Error(ErrorCode::kShape, "pixel mapping tensor must be K x 5");
  }
  PixelMapping mapping;
  mapping.pairs.resize(tensor.dim(0));
  for (std::size_t i = 0; i < mapping.pairs.size(); ++i) {
    const float* row = tensor.data.data() + 5 * i;
    PixelPair& p = mapping.pairs[i];
    p.point_index = static_cast<std::uint32_t>(row[0]);
    p.h = static_cast<int>(row[1]);
    p.w = static_cast<int>(row[2]);
    p.depth = row[3];
    p.view_id = static_cast<int>(row[4]);
  }
  return mapping;
}

namespace {

std::string ShortestDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

template <typename T>
T ParseField(const std::string& token, const std::string& line) {
  T value{};
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw Error(ErrorCode::kParse, "bad box field '" + token + "' in line '" +
                                       line + "'");
  }
  return value;
}

}  // namespace

void WriteBoxesTsv(const std::filesystem::path& path,
                   std::span<const InstanceBox> boxes) {
  std::string text =
      "#inst_id\tview\th_min\tw_min\th_max\tw_max\tscore\tsupport\n";
  for (const InstanceBox& b : boxes) {
    text += std::to_string(b.inst_id) + '\t' + std::to_string(b.view_id) +
            '\t' + std::to_string(b.h_min) + '\t' + std::to_string(b.w_min) +
            '\t' + std::to_string(b.h_max) + '\t' + std::to_string(b.w_max) +
            '\t' + ShortestDouble(b.score) + '\t' +
            std::to_string(b.support) + '\n';
  }
  WriteFileAtomic(path, text);
}

std::vector<InstanceBox> ReadBoxesTsv(const std::filesystem::path& path) {
  std::vector<InstanceBox> boxes;
  std::istringstream in(ReadFileBytes(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    std::string token;
    while (std::getline(fields, token, '\t')) tokens.push_back(token);
    if (tokens.size() != 8) {
      throw Error(ErrorCode::kParse,
                  "box line needs 8 tab-separated fields: '" + line + "'");
    }
    InstanceBox b;
    b.inst_id = ParseField<std::uint32_t>(tokens[0], line);
    b.view_id = ParseField<int>(tokens[1], line);
    b.h_min = ParseField<int>(tokens[2], line);
    b.w_min = ParseField<int>(tokens[3], line);
    b.h_max = ParseField<int>(tokens[4], line);
    b.w_max = ParseField<int>(tokens[5], line);
    b.score = ParseField<double>(tokens[6], line);
    b.support = ParseField<std::uint32_t>(tokens[7], line);
    if (b.h_min > b.h_max || b.w_min > b.w_max) {
      throw Error(ErrorCode::kParse, "inverted box in line '" + line + "'");
    }
    boxes.push_back(b);
  }
  return boxes;
}

}  // namespace latentlab
