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

#include "stgraph/video.hpp"

namespace stgraph {

/// RGB frames with intensities in [0, 1], stored m x h x w x 3.
struct VideoVolume {
  VideoDims dims;
  std::vector<float> pixels;

  float at(int t, int r, int c, int ch) const {
    return pixels[dims.node(t, r, c) * 3 + ch];
  }
};

/// One dense flow field, h x w x 2, interleaved (u, v) with u horizontal.
struct FlowPlane {
  int h = 0;
  int w = 0;
  std::vector<float> data;

  FlowPlane() = default;
  FlowPlane(int height, int width)
      : h(height), w(width), data(static_cast<std::size_t>(height) * width * 2, 0.0f) {}

  float u(int r, int c) const { return data[(static_cast<std::size_t>(r) * w + c) * 2]; }
  float v(int r, int c) const { return data[(static_cast<std::size_t>(r) * w + c) * 2 + 1]; }
  void set(int r, int c, float du, float dv) {
    const std::size_t i = (static_cast<std::size_t>(r) * w + c) * 2;
    data[i] = du;
    data[i + 1] = dv;
  }

  friend bool operator==(const FlowPlane&, const FlowPlane&) = default;
};

/// forward[i] maps frame i to i+1 and lives on the grid of frame i.
/// backward[i] maps frame i+1 to i and lives on the grid of frame i+1.
struct FlowField {
  VideoDims dims;
  std::vector<FlowPlane> forward;
  std::vector<FlowPlane> backward;
};

/// Binary labels, m x h x w, values in {0, 1}.
struct GroundTruthMasks {
  VideoDims dims;
  std::vector<std::uint8_t> labels;
};

enum class ObjectShape { kRectangle, kDisk };

struct Velocity {
  double dx = 0.0;  // columns per frame
  double dy = 0.0;  // rows per frame

  friend bool operator==(const Velocity&, const Velocity&) = default;
};

struct SynthSceneSpec {
  int m = 10;
  int h = 48;
  int w = 64;
  ObjectShape shape = ObjectShape::kRectangle;
  // Rectangle: width x height. Disk: size_x is the radius, size_y unused.
  double size_x = 16.0;
  double size_y = 12.0;
  // Top-left corner for rectangles, center for disks, at frame 0.
  double x0 = 8.0;
  double y0 = 8.0;
  Velocity object_velocity{2.0, 1.0};
  Velocity background_velocity{0.0, 0.0};
  double noise = 0.05;
  std::uint64_t seed = 42;
};

struct SynthScene {
  VideoVolume video;
  FlowField flow;
  GroundTruthMasks gt;
};

FlowPlane read_flo(const std::filesystem::path& path);
void write_flo(const FlowPlane& plane, const std::filesystem::path& path);

/// Rigidly translating object over a rigidly translating textured background.
/// Throws ObjectLeavesFrame if any part of the object exits the frame.
SynthScene synth_scene(const SynthSceneSpec& spec);

/// Object membership of pixel (r, c) at frame t, by pixel-center test.
bool object_covers(const SynthSceneSpec& spec, int t, int r, int c);

/// Randomized spec with a visible moving object; used to build test corpora.
/// With camera_motion the background also translates, in a direction not
/// parallel to the object's. Throws InvalidSpec when no admissible object
/// velocity keeps the trajectory in frame.
SynthSceneSpec random_scene_spec(int m, int h, int w, std::uint64_t seed,
                                 bool camera_motion = true);

// On-disk workspace: frames/frame_%04d.ppm, flow/{forward,backward}_%04d.flo,
// gt/gt_%04d.pgm.
void save_scene(const SynthScene& scene, const std::filesystem::path& dir);
VideoVolume load_frames(const std::filesystem::path& dir);
FlowField load_flow(const std::filesystem::path& dir, const VideoDims& dims);
GroundTruthMasks load_masks(const std::filesystem::path& dir);

}  // namespace stgraph
