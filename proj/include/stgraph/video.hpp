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

#include <cstddef>
#include <cstdint>

namespace stgraph {

using NodeId = std::uint32_t;

// Shape of a space-time volume. Nodes are numbered frame-major, then row-major
// inside each frame: id = (t * h + r) * w + c.
struct VideoDims {
  int m = 0;
  int h = 0;
  int w = 0;

  std::size_t frame_size() const { return static_cast<std::size_t>(h) * w; }
  std::size_t n() const { return frame_size() * m; }

  NodeId node(int t, int r, int c) const {
    return static_cast<NodeId>((static_cast<std::size_t>(t) * h + r) * w + c);
  }
  int frame_of(NodeId id) const { return static_cast<int>(id / frame_size()); }
  int row_of(NodeId id) const { return static_cast<int>((id % frame_size()) / w); }
  int col_of(NodeId id) const { return static_cast<int>(id % w); }

  bool in_frame(int r, int c) const { return r >= 0 && r < h && c >= 0 && c < w; }

  friend bool operator==(const VideoDims&, const VideoDims&) = default;
};

}  // namespace stgraph
