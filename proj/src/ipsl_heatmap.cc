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

#include "latentlab/ipsl_heatmap.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "latentlab/error.h"

namespace latentlab {

Heatmap::Heatmap(int height, int width) : height_(height), width_(width) {
  if (height < 1 || width < 1) {
    throw Error(ErrorCode::kShape, "heatmap dims must be positive");
  }
  values_.assign(static_cast<std::size_t>(height) * width, 0.0);
}

void Heatmap::MaxWith(const Heatmap& other) {
  if (other.height_ != height_ || other.width_ != width_) {
    throw Error(ErrorCode::kShape, "heatmap dims differ");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] = std::max(values_[i], other.values_[i]);
  }
}

Tensor Heatmap::ToTensor() const {
  Tensor t({static_cast<std::uint32_t>(height_),
            static_cast<std::uint32_t>(width_)});
  std::transform(values_.begin(), values_.end(), t.data.begin(),
                 [](double v) { return static_cast<float>(v); });
  return t;
}

Heatmap Heatmap::FromTensor(const Tensor& tensor) {
  if (tensor.rank() != 2) {
    throw Error(ErrorCode::kShape, "heatmap tensor must be H x W");
  }
  Heatmap map(static_cast<int>(tensor.dim(0)),
              static_cast<int>(tensor.dim(1)));
  std::copy(tensor.data.begin(), tensor.data.end(), map.values_.begin());
  return map;
}

void HeatmapSpec::Validate() const {
  if (!(r_corner > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "corner radius must be > 0");
  }
  if (!(p_center > 0.0 && p_center <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "centre fraction must be in (0, 1]");
  }
  if (!(r_center_floor > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "centre radius floor must be > 0");
  }
}

double GaussianBump(double distance, double radius) {
  if (distance > radius) return 0.0;
  return std::exp(-2.0 * distance * distance / (radius * radius));
}

void DrawGaussian(Heatmap* heatmap, double h, double w, double radius) {
  if (!(radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "heatmap radius must be > 0");
  }
  if (!(h >= 0.0 && h <= heatmap->height() - 1 && w >= 0.0 &&
        w <= heatmap->width() - 1)) {
    throw Error(ErrorCode::kInvalidAnchor,
                "anchor (" + std::to_string(h) + ", " + std::to_string(w) +
                    ") lies outside the image");
  }
  const int m_lo = std::max(0, static_cast<int>(std::ceil(h - radius)));
  const int m_hi =
      std::min(heatmap->height() - 1, static_cast<int>(std::floor(h + radius)));
  const int n_lo = std::max(0, static_cast<int>(std::ceil(w - radius)));
  const int n_hi =
      std::min(heatmap->width() - 1, static_cast<int>(std::floor(w + radius)));
  for (int m = m_lo; m <= m_hi; ++m) {
    const double dh = h - m;
    for (int n = n_lo; n <= n_hi; ++n) {
      const double dw = w - n;
      const double value = GaussianBump(std::sqrt(dh * dh + dw * dw), radius);
      double& cell = heatmap->at(m, n);
      if (value > cell) cell = value;
    }
  }
}

Heatmap PointHeatmap(double h, double w, double radius, ImageSize size) {
  Heatmap map(size.height, size.width);
  DrawGaussian(&map, h, w, radius);
  return map;
}

double CenterRadius(const InstanceBox& box, const HeatmapSpec& spec) {
  const double extent = std::min(box.height(), box.width());
  return std::max(spec.r_center_floor, spec.p_center * extent);
}

namespace {

void CheckBox(const InstanceBox& box, ImageSize size) {
  if (box.h_min < 0 || box.w_min < 0 || box.h_min > box.h_max ||
      box.w_min > box.w_max || box.h_max >= size.height ||
      box.w_max >= size.width) {
    throw Error(ErrorCode::kInvalidAnchor,
                "box of instance " + std::to_string(box.inst_id) +
                    " is not inside the " + std::to_string(size.height) +
                    "x" + std::to_string(size.width) + " image");
  }
}

void DrawBox(Heatmap* map, const InstanceBox& box, const HeatmapSpec& spec) {
  const double corners[4][2] = {{static_cast<double>(box.h_min), static_cast<double>(box.w_min)},
                                {static_cast<double>(box.h_min), static_cast<double>(box.w_max)},
                                {static_cast<double>(box.h_max), static_cast<double>(box.w_min)},
                                {static_cast<double>(box.h_max), static_cast<double>(box.w_max)}};
  for (const auto& corner : corners) {
    DrawGaussian(map, corner[0], corner[1], spec.r_corner);
  }
  DrawGaussian(map, 0.5 * (box.h_min + box.h_max), 0.5 * (box.w_min + box.w_max),
               CenterRadius(box, spec));
}

}  // namespace

Heatmap BoxHeatmap(const InstanceBox& box, const HeatmapSpec& spec,
                   ImageSize size) {
  spec.Validate();
  CheckBox(box, size);
  Heatmap map(size.height, size.width);
  DrawBox(&map, box, spec);
  return map;
}

Heatmap ImageHeatmap(std::span<const InstanceBox> boxes,
                     const HeatmapSpec& spec, ImageSize size) {
  spec.Validate();
  Heatmap map(size.height, size.width);
  for (const InstanceBox& box : boxes) {
    CheckBox(box, size);
    DrawBox(&map, box, spec);
  }
  return map;
}

Heatmap MaskHeatmap(const Tensor& masks, std::span<const double> scores) {
  if (masks.rank() != 3) {
    throw Error(ErrorCode::kShape, "masks must be K x H x W");
  }
  if (masks.dim(0) != scores.size()) {
    throw Error(ErrorCode::kShape,
                std::to_string(masks.dim(0)) + " masks but " +
                    std::to_string(scores.size()) + " scores");
  }
  Heatmap map(static_cast<int>(masks.dim(1)), static_cast<int>(masks.dim(2)));
  const std::size_t plane = static_cast<std::size_t>(masks.dim(1)) * masks.dim(2);
  std::vector<double> sum(plane, 0.0);
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (!(scores[k] >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "mask scores must be >= 0");
    }
    const float* mask = masks.data.data() + k * plane;
    for (std::size_t i = 0; i < plane; ++i) sum[i] += mask[i] * scores[k];
  }
  for (int h = 0; h < map.height(); ++h) {
    for (int w = 0; w < map.width(); ++w) {
      map.at(h, w) = std::min(1.0, sum[static_cast<std::size_t>(h) * map.width() + w]);
    }
  }
  return map;
}

void PointwiseLinear::Validate() const {
  if (in_channels < 1 || out_channels < 1 ||
      weights.size() != static_cast<std::size_t>(in_channels) * out_channels ||
      bias.size() != static_cast<std::size_t>(out_channels)) {
    throw Error(ErrorCode::kShape,
                "pointwise map needs in x out weights and out biases");
  }
}

Tensor FuseIntermediate(const Tensor& image_features, const Heatmap& heatmap,
                        const PointwiseLinear& psi_image,
                        const PointwiseLinear& psi_heat) {
  psi_image.Validate();
  psi_heat.Validate();
  if (image_features.rank() != 3 ||
      image_features.dim(0) != static_cast<std::uint32_t>(heatmap.height()) ||
      image_features.dim(1) != static_cast<std::uint32_t>(heatmap.width()) ||
      image_features.dim(2) != static_cast<std::uint32_t>(psi_image.in_channels)) {
    throw Error(ErrorCode::kShape,
                "image features must be H x W x C_i matching the heatmap");
  }
  if (psi_heat.in_channels != 1 ||
      psi_heat.out_channels != psi_image.out_channels) {
    throw Error(ErrorCode::kShape,
                "heatmap map must be 1 x C_out with the image map's C_out");
  }
  const int ci = psi_image.in_channels;
  const int co = psi_image.out_channels;
  Tensor out({image_features.dim(0), image_features.dim(1),
              static_cast<std::uint32_t>(co)});
  for (int h = 0; h < heatmap.height(); ++h) {
    for (int w = 0; w < heatmap.width(); ++w) {
      const std::size_t pixel = static_cast<std::size_t>(h) * heatmap.width() + w;
      const float* feat = image_features.data.data() + pixel * ci;
      float* dst = out.data.data() + pixel * co;
      const double heat = heatmap.at(h, w);
      for (int o = 0; o < co; ++o) {
        double image_term = psi_image.bias[o];
        for (int i = 0; i < ci; ++i) {
          image_term += static_cast<double>(psi_image.weights[static_cast<std::size_t>(i) * co + o]) * feat[i];
        }
        const double heat_term = psi_heat.bias[o] + psi_heat.weights[o] * heat;
        dst[o] = static_cast<float>(image_term + heat_term);
      }
    }
  }
  return out;
}

}  // namespace latentlab
