// Copyright 2026 The stgraph Authors. All Rights Reserved.
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace stgraph {

// Interchange format shared with external processes:
//   "STGT" | u32 version (=1) | u32 rank (<= 4) | u32 dims[rank] |
//   float32 payload, row-major
// All integers and floats little-endian.
struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const;
};

inline constexpr std::uint32_t kTensorVersion = 1;
inline constexpr std::size_t kMaxTensorRank = 4;

Tensor read_tensor(const std::filesystem::path& path);
/// Written atomically (temporary file, then rename).
void write_tensor(const std::filesystem::path& path, const Tensor& tensor);

}  // namespace stgraph
