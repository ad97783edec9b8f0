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

#ifndef LATENTLAB_IPSL_HEATMAP_H_
#define LATENTLAB_IPSL_HEATMAP_H_

#include <span>
#include <vector>

#include "latentlab/camera_projection.h"
#include "latentlab/tensor.h"

namespace latentlab {

// H x W map of instance position and scale, values in [0, 1]. Stored in
// double so the Gaussian profile is exact to well below float resolution.
class Heatmap {
 public:
  Heatmap(int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }
  double at(int h, int w) const { return values_[Offset(h, w)]; }
  double& at(int h, int w) { return values_[Offset(h, w)]; }
  std::span<const double> values() const { return values_; }

  // Pointwise maximum with other (same dims).
  void MaxWith(const Heatmap& other);

  Tensor ToTensor() const;
  static Heatmap FromTensor(const Tensor& tensor);

  friend bool operator==(const Heatmap&, const Heatmap&) = default;

 private:
  std::size_t Offset(int h, int w) const {
    return static_cast<std::size_t>(h) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(w);
  }

  int height_;
  int width_;
  std::vector<double> values_;
};

struct HeatmapSpec {
  double r_corner = 5.0;
  double p_center = 0.25;
  double r_center_floor = 1.0;

  void Validate() const;
};

// Gaussian bump value at distance d from an anchor of radius R:
// exp(-2 d^2 / R^2) inside the closed disk, 0 outside.
double GaussianBump(double distance, double radius);

// Raises heatmap to the bump around (h, w) wherever the bump is larger.
// The anchor may be fractional; it must lie inside the image.
void DrawGaussian(Heatmap* heatmap, double h, double w, double radius);

Heatmap PointHeatmap(double h, double w, double radius, ImageSize size);

// Radius of the centre bump: max(floor, p_center * min(box height, width)).
double CenterRadius(const InstanceBox& box, const HeatmapSpec& spec);

// Max over the four corner bumps (radius r_corner) and the centre bump.
Heatmap BoxHeatmap(const InstanceBox& box, const HeatmapSpec& spec,
                   ImageSize size);

// Max over all boxes; empty input gives an all-zero map.
Heatmap ImageHeatmap(std::span<const InstanceBox> boxes,
                     const HeatmapSpec& spec, ImageSize size);

// Score-weighted sum of binary masks (K x H x W), clamped to 1.
Heatmap MaskHeatmap(const Tensor& masks, std::span<const double> scores);

// Pointwise linear map (1x1 convolution): input_channels x out_channels
// weights, row-major, plus out_channels bias.
struct PointwiseLinear {
  int in_channels = 0;
  int out_channels = 0;
  std::vector<float> weights;
  std::vector<float> bias;

  void Validate() const;
};

// F = psi_I(image_features) + psi_H(heatmap), evaluated per pixel.
// image_features is H x W x C_i; result is H x W x out_channels.
Tensor FuseIntermediate(const Tensor& image_features, const Heatmap& heatmap,
                        const PointwiseLinear& psi_image,
                        const PointwiseLinear& psi_heat);

}  // namespace latentlab

#endif  // LATENTLAB_IPSL_HEATMAP_H_
