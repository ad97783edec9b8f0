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

#ifndef LATENTLAB_TOOLS_CLI_H_
#define LATENTLAB_TOOLS_CLI_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "latentlab/config.h"
#include "latentlab/cylinder_grid.h"
#include "latentlab/ipsl_heatmap.h"
#include "latentlab/tensor.h"

namespace latentlab::cli {

// Entry point of the latentlab tool. Returns the process exit status:
// 0 on success, 1 when a stage fails, 2 on a usage error.
int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

struct PipelineOptions {
  std::filesystem::path data_dir;
  std::filesystem::path out_dir;
  PipelineConfig config;
  bool resume = false;
};

// split -> pair -> mix -> voxelize -> project -> boxes -> heatmap over a
// SemanticKITTI-style sequence directory (velodyne/, labels/, calib.txt).
void RunPipeline(const PipelineOptions& options, std::ostream& log);

// N x 3 voxel index tensor; dropped points become (-1, -1, -1).
Tensor VoxelTensor(const std::vector<std::optional<VoxelIndex>>& indices);

// 8-bit grayscale PNG of round(value * 255).
void WriteHeatmapPng(const std::filesystem::path& path, const Heatmap& heatmap);

}  // namespace latentlab::cli

#endif  // LATENTLAB_TOOLS_CLI_H_
