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

#include "stgraph/tensor_file.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "stgraph/error.hpp"
#include "stgraph/netpbm.hpp"

namespace stgraph {

namespace {

constexpr char kMagic[4] = {'S', 'T', 'G', 'T'};

std::uint32_t load_u32(const std::vector<char>& buf, std::size_t pos) {
  std::uint32_t v;
  std::memcpy(&v, buf.data() + pos, sizeof(v));
  return v;
}

void store_u32(std::vector<char>& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.insert(out.end(), b, b + 4);
}

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t count = 1;
  for (auto d : dims) count *= d;
  return count;
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (buf.size() < 4 || std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, path.string());
  }
  if (buf.size() < 12) throw Error(ErrorCode::kTruncated, path.string() + ": short header");
  const std::uint32_t version = load_u32(buf, 4);
  if (version != kTensorVersion) {
    throw Error(ErrorCode::kBadMagic,
                path.string() + ": unsupported version " + std::to_string(version));
  }
  const std::uint32_t rank = load_u32(buf, 8);
  if (rank > kMaxTensorRank) {
    throw Error(ErrorCode::kBadMagic, path.string() + ": rank " + std::to_string(rank) + " > 4");
  }
  const std::size_t header = 12 + 4 * static_cast<std::size_t>(rank);
  if (buf.size() < header) throw Error(ErrorCode::kTruncated, path.string() + ": short dims");

  Tensor t;
  for (std::uint32_t i = 0; i < rank; ++i) t.dims.push_back(load_u32(buf, 12 + 4 * i));
  const std::size_t payload = t.element_count() * sizeof(float);
  if (buf.size() - header < payload) throw Error(ErrorCode::kTruncated, path.string());
  if (buf.size() - header > payload) {
    throw Error(ErrorCode::kShapeMismatch, path.string() + ": trailing bytes after payload");
  }
  t.values.resize(t.element_count());
  std::memcpy(t.values.data(), buf.data() + header, payload);
  return t;
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  if (t.dims.size() > kMaxTensorRank) {
    throw Error(ErrorCode::kInvalidSpec, "tensor rank must be <= 4");
  }
  if (t.values.size() != t.element_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "tensor payload does not match its dims");
  }
  std::vector<char> bytes(kMagic, kMagic + 4);
  store_u32(bytes, kTensorVersion);
  store_u32(bytes, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) store_u32(bytes, d);
  const char* raw = reinterpret_cast<const char*>(t.values.data());
  bytes.insert(bytes.end(), raw, raw + t.values.size() * sizeof(float));
  write_file_atomic(path, bytes);
}

}  // namespace stgraph
