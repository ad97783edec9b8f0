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

#ifndef LATENTLAB_TENSOR_H_
#define LATENTLAB_TENSOR_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace latentlab {

// Dense row-major float32 tensor. This is the in-memory form of the LLT1
// exchange format:
//
//   "LLT1" | uint32 ndim | ndim x uint32 dims | float32 payload
//
// All integers and floats are little-endian.
struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::uint32_t> shape);
  Tensor(std::vector<std::uint32_t> shape, std::vector<float> values);

  std::size_t rank() const { return dims.size(); }
  std::size_t numel() const;
  std::uint32_t dim(std::size_t axis) const { return dims.at(axis); }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

std::size_t NumElements(std::span<const std::uint32_t> dims);

std::string EncodeTensor(const Tensor& tensor);
// Decodes one record starting at *offset and advances it past the record.
Tensor DecodeTensor(std::string_view bytes, std::size_t* offset);

Tensor ReadTensor(const std::filesystem::path& path);
void WriteTensor(const std::filesystem::path& path, const Tensor& tensor);

// A bundle is several LLT1 records concatenated in one file.
std::vector<Tensor> ReadTensorBundle(const std::filesystem::path& path);
void WriteTensorBundle(const std::filesystem::path& path,
                       std::span<const Tensor> tensors);

}  // namespace latentlab

#endif  // LATENTLAB_TENSOR_H_
