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

#ifndef LATENTLAB_SRC_LITTLE_ENDIAN_H_
#define LATENTLAB_SRC_LITTLE_ENDIAN_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace latentlab::internal {

inline void AppendU32(std::string* out, std::uint32_t value) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFFu);
  }
  out->append(bytes, 4);
}

inline void AppendF32(std::string* out, float value) {
  AppendU32(out, std::bit_cast<std::uint32_t>(value));
}

// Caller guarantees at least 4 bytes at offset.
inline std::uint32_t LoadU32(std::string_view bytes, std::size_t offset) {
  std::uint32_t value = 0;
  for (int i = 3; i >= 0; --i) {
    value = (value << 8) |
            static_cast<unsigned char>(bytes[offset + static_cast<std::size_t>(i)]);
  }
  return value;
}

inline float LoadF32(std::string_view bytes, std::size_t offset) {
  return std::bit_cast<float>(LoadU32(bytes, offset));
}

}  // namespace latentlab::internal

#endif  // LATENTLAB_SRC_LITTLE_ENDIAN_H_
