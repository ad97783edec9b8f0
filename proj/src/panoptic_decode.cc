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

#include "latentlab/panoptic_decode.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "latentlab/error.h"

namespace latentlab {

void DecodeSpec::Validate() const {
  if (nms_kernel < 1 || nms_kernel % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "NMS kernel must be odd and >= 1");
  }
  if (top_k < 1) {
    throw Error(ErrorCode::kInvalidArgument, "top_k must be >= 1");
  }
}

Tensor PanopticMap::ToTensor() const {
  Tensor t({2, static_cast<std::uint32_t>(height),
            static_cast<std::uint32_t>(width)});
  const std::size_t plane = size();
  for (std::size_t i = 0; i < plane; ++i) {
    t.data[i] = static_cast<float>(sem[i]);
    t.data[plane + i] = static_cast<float>(inst[i]);
  }
  return t;
}

PanopticMap PanopticMap::FromTensor(const Tensor& tensor) {
  if (tensor.rank() != 3 || tensor.dim(0) != 2) {
    throw Error(ErrorCode::kShape, "panoptic tensor must be 2 x H x W");
  }
  PanopticMap map(static_cast<int>(tensor.dim(1)),
                  static_cast<int>(tensor.dim(2)));
  const std::size_t plane = map.size();
  for (std::size_t i = 0; i < plane; ++i) {
    map.sem[i] = static_cast<std::uint32_t>(tensor.data[i]);
    map.inst[i] = static_cast<std::uint32_t>(tensor.data[plane + i]);
  }
  return map;
}

std::vector<Center> FindCenters(const Heatmap& center_heatmap,
                                const DecodeSpec& spec) {
  spec.Validate();
  const int half = spec.nms_kernel / 2;
  const int height = center_heatmap.height();
  const int width = center_heatmap.width();
  std::vector<Center> centers;
  for (int h = 0; h < height; ++h) {
    for (int w = 0; w < width; ++w) {
      const double value = center_heatmap.at(h, w);
      if (!(value >= spec.center_threshold)) continue;
      bool strict_max = true;
      for (int m = std::max(0, h - half);
           strict_max && m <= std::min(height - 1, h + half); ++m) {
        for (int n = std::max(0, w - half); n <= std::min(width - 1, w + half);
             ++n) {
          if ((m != h || n != w) && center_heatmap.at(m, n) >= value) {
            strict_max = false;
            break;
          }
        }
      }
      if (strict_max) centers.push_back(Center{h, w, value});
    }
  }
  // Raster order is already the tie-break; stable_sort keeps it.
  std::stable_sort(centers.begin(), centers.end(),
                   [](const Center& a, const Center& b) {
                     return a.score > b.score;
                   });
  if (centers.size() > static_cast<std::size_t>(spec.top_k)) {
    centers.resize(static_cast<std::size_t>(spec.top_k));
  }
  return centers;
}

PanopticMap AssignInstances(const Tensor& semantic, const Tensor& offsets,
                            const Tensor& fore_mask,
                            const std::vector<Center>& centers,
                            const std::set<std::uint32_t>& things) {
  if (semantic.rank() != 2 || fore_mask.rank() != 2 || offsets.rank() != 3 ||
      offsets.dim(2) != 2 || semantic.dims != fore_mask.dims ||
      offsets.dim(0) != semantic.dim(0) || offsets.dim(1) != semantic.dim(1)) {
    throw Error(ErrorCode::kShape,
                "decode expects H x W semantic and mask maps and H x W x 2 "
                "offsets");
  }
  const int height = static_cast<int>(semantic.dim(0));
  const int width = static_cast<int>(semantic.dim(1));
  PanopticMap map(height, width);
  for (std::size_t i = 0; i < map.size(); ++i) {
    map.sem[i] = static_cast<std::uint32_t>(semantic.data[i]);
  }
  if (centers.empty()) return map;
  for (int h = 0; h < height; ++h) {
    for (int w = 0; w < width; ++w) {
      const std::size_t cell = static_cast<std::size_t>(h) * width + w;
      if (!(fore_mask.data[cell] >= 0.5f) || !things.contains(map.sem[cell])) {
        continue;
      }
      const double target_h = h + static_cast<double>(offsets.data[2 * cell]);
      const double target_w = w + static_cast<double>(offsets.data[2 * cell + 1]);
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t best_id = 0;
      for (std::size_t k = 0; k < centers.size(); ++k) {
        const double dh = target_h - centers[k].h;
        const double dw = target_w - centers[k].w;
        const double dist2 = dh * dh + dw * dw;
        if (dist2 < best) {
          best = dist2;
          best_id = static_cast<std::uint32_t>(k + 1);
        }
      }
      map.inst[cell] = best_id;
    }
  }
  return map;
}

PanopticMap MajoritySemantic(const PanopticMap& map) {
  std::map<std::uint32_t, std::map<std::uint32_t, std::uint64_t>> histogram;
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map.inst[i] != 0) ++histogram[map.inst[i]][map.sem[i]];
  }
  std::map<std::uint32_t, std::uint32_t> majority;
  for (const auto& [inst, counts] : histogram) {
    std::uint32_t best_class = 0;
    std::uint64_t best_count = 0;
    // Ascending class order: strict > keeps the smaller id on ties.
    for (const auto& [cls, count] : counts) {
      if (count > best_count) {
        best_count = count;
        best_class = cls;
      }
    }
    majority[inst] = best_class;
  }
  PanopticMap out = map;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.inst[i] != 0) out.sem[i] = majority[out.inst[i]];
  }
  return out;
}

}  // namespace latentlab
