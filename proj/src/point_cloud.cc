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

#include "latentlab/point_cloud.h"

#include <string>

#include "latentlab/error.h"

namespace latentlab {

void PointCloud::Validate() const {
  if (labels && labels->size() != points.size()) {
    throw Error(ErrorCode::kShape,
                "cloud has " + std::to_string(points.size()) +
                    " points but " + std::to_string(labels->size()) +
                    " labels");
  }
  if (provenance && provenance->size() != points.size()) {
    throw Error(ErrorCode::kShape,
                "cloud has " + std::to_string(points.size()) +
                    " points but " + std::to_string(provenance->size()) +
                    " provenance entries");
  }
}

}  // namespace latentlab
