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

#ifndef LATENTLAB_ERROR_H_
#define LATENTLAB_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace latentlab {

enum class ErrorCode {
  kIo,
  kMalformedScan,
  kMalformedTensor,
  kLabelMismatch,
  kOverflow,
  kMissingCalibration,
  kParse,
  kInvalidRatio,
  kMissingPseudo,
  kInvalidPoint,
  kInvalidArgument,
  kUnlabeledInput,
  kNotEnoughFrames,
  kInvalidIndex,
  kShape,
  kInvalidAnchor,
  kInvalidClass,
};

// Stable lower-case name, e.g. "label-mismatch". Used in CLI diagnostics
// and as the Python exception attribute.
std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library is an Error carrying one of the codes
// above. The message is a single line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace latentlab

#endif  // LATENTLAB_ERROR_H_
