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

#include "latentlab/tensor.h"

#include <limits>
#include <string>
#include <utility>

#include "latentlab/error.h"
#include "latentlab/file_util.h"
#include "little_endian.h"

namespace latentlab {
namespace {

constexpr std::string_view kMagic = "LLT1";
// Guards against absurd headers in corrupt files.
constexpr std::uint32_t kMaxRank = 16;

}  // namespace

std::size_t NumElements(std::span<const std::uint32_t> dims) {
  std::size_t count = 1;
  for (std::uint32_t d : dims) {
    if (d != 0 && count > std::numeric_limits<std::size_t>::max() / d) {
      throw Error(ErrorCode::kShape, "tensor shape overflows");
    }
    count *= d;
  }
  return count;
}

Tensor::Tensor(std::vector<std::uint32_t> shape)
    : dims(std::move(shape)), data(NumElements(dims), 0.0f) {}

Tensor::Tensor(std::vector<std::uint32_t> shape, std::vector<float> values)
    : dims(std::move(shape)), data(std::move(values)) {
  if (data.size() != NumElements(dims)) {
    throw Error(ErrorCode::kShape,
                "tensor payload has " + std::to_string(data.size()) +
                    " values, shape needs " +
                    std::to_string(NumElements(dims)));
  }
}

std::size_t Tensor::numel() const { return NumElements(dims); }

std::string EncodeTensor(const Tensor& tensor) {
  if (tensor.data.size() != tensor.numel()) {
    throw Error(ErrorCode::kShape, "tensor payload does not match its shape");
  }
  std::string out;
  out.reserve(8 + 4 * tensor.dims.size() + 4 * tensor.data.size());
  out.append(kMagic);
  internal::AppendU32(&out, static_cast<std::uint32_t>(tensor.dims.size()));
  for (std::uint32_t d : tensor.dims) internal::AppendU32(&out, d);
  for (float v : tensor.data) internal::AppendF32(&out, v);
  return out;
}

Tensor DecodeTensor(std::string_view bytes, std::size_t* offset) {
  std::size_t pos = *offset;
  auto need = [&](std::size_t n) {
    if (bytes.size() - pos < n) {
      throw Error(ErrorCode::kMalformedTensor, "truncated LLT1 record");
    }
  };
  need(8);
  if (bytes.substr(pos, 4) != kMagic) {
    throw Error(ErrorCode::kMalformedTensor, "missing LLT1 magic");
  }
  const std::uint32_t rank = internal::LoadU32(bytes, pos + 4);
  pos += 8;
  if (rank > kMaxRank) {
    throw Error(ErrorCode::kMalformedTensor,
                "LLT1 rank " + std::to_string(rank) + " is too large");
  }
  need(4 * static_cast<std::size_t>(rank));
  Tensor tensor;
  tensor.dims.resize(rank);
  for (std::uint32_t i = 0; i < rank; ++i) {
    tensor.dims[i] = internal::LoadU32(bytes, pos);
    pos += 4;
  }
  const std::size_t count = NumElements(tensor.dims);
  if (count > (bytes.size() - pos) / 4) {
    throw Error(ErrorCode::kMalformedTensor, "truncated LLT1 payload");
  }
  tensor.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    tensor.data[i] = internal::LoadF32(bytes, pos);
    pos += 4;
  }
  *offset = pos;
  return tensor;
}

Tensor ReadTensor(const std::filesystem::path& path) {
  const std::string bytes = ReadFileBytes(path);
  std::size_t offset = 0;
  Tensor tensor = DecodeTensor(bytes, &offset);
  if (offset != bytes.size()) {
    throw Error(ErrorCode::kMalformedTensor,
                "trailing bytes after LLT1 record in " + path.string());
  }
  return tensor;
}

void WriteTensor(const std::filesystem::path& path, const Tensor& tensor) {
  WriteFileAtomic(path, EncodeTensor(tensor));
}

std::vector<Tensor> ReadTensorBundle(const std::filesystem::path& path) {
  const std::string bytes = ReadFileBytes(path);
  std::vector<Tensor> tensors;
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    tensors.push_back(DecodeTensor(bytes, &offset));
  }
  return tensors;
}

void WriteTensorBundle(const std::filesystem::path& path,
                       std::span<const Tensor> tensors) {
  std::string bytes;
  for (const Tensor& t : tensors) bytes += EncodeTensor(t);
  WriteFileAtomic(path, bytes);
}

}  // namespace latentlab
