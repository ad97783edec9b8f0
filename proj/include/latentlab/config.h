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

#ifndef LATENTLAB_CONFIG_H_
#define LATENTLAB_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "latentlab/camera_projection.h"
#include "latentlab/cylinder_grid.h"
#include "latentlab/cylinder_mix.h"
#include "latentlab/ipsl_heatmap.h"
#include "latentlab/metrics.h"
#include "latentlab/panoptic_decode.h"

namespace latentlab {

// Raw SemanticKITTI ids of the countable classes, including the moving
// variants.
std::set<std::uint32_t> DefaultThingClasses();

// Everything a pipeline stage needs. Defaults are the reference settings.
struct PipelineConfig {
  CylinderGridSpec grid;
  MixSpec mix;
  HeatmapSpec heatmap;
  DecodeSpec decode;
  LossWeights loss;
  double split_ratio = 0.1;
  std::optional<std::uint64_t> seed;
  ImageSize image_size = kKittiImageSize;
  int view = 2;
  std::uint32_t min_support = 1;
  std::set<std::uint32_t> things = DefaultThingClasses();
  int jobs = 1;

  // Applies one "key = value" setting. Throws Error(kParse) for unknown
  // keys or malformed values.
  void Set(std::string_view key, std::string_view value);

  void Validate() const;

  // Effective settings as sorted "key = value" lines.
  std::map<std::string, std::string> Entries() const;
  std::string Format() const;
};

// Key = value text; '#' starts a comment, blank lines are skipped.
PipelineConfig ParseConfig(std::string_view text,
                           PipelineConfig base = PipelineConfig{});
PipelineConfig LoadConfig(const std::filesystem::path& path,
                          PipelineConfig base = PipelineConfig{});

// Parsing helpers shared with the command line.
std::vector<double> ParseDoubleList(std::string_view text);
std::vector<int> ParseIntList(std::string_view text);
std::set<std::uint32_t> ParseClassSet(std::string_view text);
double ParseDouble(std::string_view text);
std::int64_t ParseInt(std::string_view text);

// Shortest round-trip decimal form.
std::string FormatDouble(double value);

}  // namespace latentlab

#endif  // LATENTLAB_CONFIG_H_
