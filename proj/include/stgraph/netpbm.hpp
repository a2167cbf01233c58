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
#include <string>
#include <vector>

namespace stgraph {

// Binary netpbm images, 8 bits per sample.
struct Image8 {
  int h = 0;
  int w = 0;
  int channels = 1;  // 1 for P5, 3 for P6
  std::vector<std::uint8_t> data;
};

Image8 read_netpbm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, int h, int w, const std::uint8_t* data);
void write_ppm(const std::filesystem::path& path, int h, int w, const std::uint8_t* rgb);

/// Write to a sibling temporary file, then rename over the destination.
void write_file_atomic(const std::filesystem::path& path, const std::vector<char>& bytes);

/// Regular files in `dir` whose name starts with `prefix` and ends with `ext`,
/// sorted by name.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir,
                                              const std::string& prefix,
                                              const std::string& ext);

}  // namespace stgraph
