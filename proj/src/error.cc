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

#include "latentlab/error.h"

namespace latentlab {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
      return "io";
    case ErrorCode::kMalformedScan:
      return "malformed-scan";
    case ErrorCode::kMalformedTensor:
      return "malformed-tensor";
    case ErrorCode::kLabelMismatch:
      return "label-mismatch";
    case ErrorCode::kOverflow:
      return "overflow";
    case ErrorCode::kMissingCalibration:
      return "missing-calibration";
    case ErrorCode::kParse:
      return "parse";
    case ErrorCode::kInvalidRatio:
      return "invalid-ratio";
    case ErrorCode::kMissingPseudo:
      return "missing-pseudo";
    case ErrorCode::kInvalidPoint:
      return "invalid-point";
    case ErrorCode::kInvalidArgument:
      return "invalid-argument";
    case ErrorCode::kUnlabeledInput:
      return "unlabeled-input";
    case ErrorCode::kNotEnoughFrames:
      return "not-enough-frames";
    case ErrorCode::kInvalidIndex:
      return "invalid-index";
    case ErrorCode::kShape:
      return "shape";
    case ErrorCode::kInvalidAnchor:
      return "invalid-anchor";
    case ErrorCode::kInvalidClass:
      return "invalid-class";
  }
  return "unknown";
}

}  // namespace latentlab
