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

#ifndef LATENTLAB_PANOPTIC_DECODE_H_
#define LATENTLAB_PANOPTIC_DECODE_H_

#include <cstdint>
#include <set>
#include <vector>

#include "latentlab/ipsl_heatmap.h"
#include "latentlab/tensor.h"

namespace latentlab {

struct DecodeSpec {
  double center_threshold = 0.1;
  int nms_kernel = 5;
  int top_k = 100;

  void Validate() const;
};

struct Center {
  int h = 0;
  int w = 0;
  double score = 0.0;

  friend bool operator==(const Center&, const Center&) = default;
};

// Per-cell (semantic class, instance id); instance 0 means "no instance".
struct PanopticMap {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> sem;
  std::vector<std::uint32_t> inst;

  PanopticMap() = default;
  PanopticMap(int h, int w)
      : height(h),
        width(w),
        sem(static_cast<std::size_t>(h) * w, 0),
        inst(static_cast<std::size_t>(h) * w, 0) {}

  std::size_t size() const { return sem.size(); }

  // 2 x H x W tensor: semantic plane, then instance plane.
  Tensor ToTensor() const;
  static PanopticMap FromTensor(const Tensor& tensor);

  friend bool operator==(const PanopticMap&, const PanopticMap&) = default;
};

// Cells strictly greater than every other cell of their nms_kernel window
// (clipped at the border) and at least center_threshold. Sorted by score
// descending, ties in raster order, truncated to top_k.
std::vector<Center> FindCenters(const Heatmap& center_heatmap,
                                const DecodeSpec& spec);

// Groups foreground thing cells around centers. Cell (h, w) votes for
// (h, w) + offset and takes the id (1-based position in centers) of the
// nearest center; ties go to the earlier (higher scoring) center.
// semantic is H x W class ids, offsets H x W x 2 (dh, dw), fore_mask H x W
// with values >= 0.5 treated as foreground.
PanopticMap AssignInstances(const Tensor& semantic, const Tensor& offsets,
                            const Tensor& fore_mask,
                            const std::vector<Center>& centers,
                            const std::set<std::uint32_t>& things);

// Relabels every instance with its majority semantic class; ties go to the
// smaller class id.
PanopticMap MajoritySemantic(const PanopticMap& map);

}  // namespace latentlab

#endif  // LATENTLAB_PANOPTIC_DECODE_H_
