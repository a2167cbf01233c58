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

#include "stgraph/flow_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "stgraph/error.hpp"
#include "stgraph/netpbm.hpp"

namespace stgraph {

namespace fs = std::filesystem;

namespace {

constexpr float kFloMagic = 202021.25f;

static_assert(std::endian::native == std::endian::little,
              ".flo and TensorFile I/O assume a little-endian host");

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void store_le(std::vector<char>& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

std::string indexed_name(const char* prefix, int i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04d%s", prefix, i, ext);
  return buf;
}

// Deterministic texture value in [-1, 1] for an integer texel.
double texel(std::uint64_t seed, std::uint64_t layer, std::int64_t x, std::int64_t y) {
  std::uint64_t z = seed ^ (layer * 0x9E3779B97F4A7C15ull) ^
                    (static_cast<std::uint64_t>(x) * 0xBF58476D1CE4E5B9ull) ^
                    (static_cast<std::uint64_t>(y) * 0x94D049BB133111EBull);
  // splitmix64 finalizer
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) / static_cast<double>(1ull << 53) * 2.0 - 1.0;
}

void validate_spec(const SynthSceneSpec& s) {
  if (s.m < 2 || s.h < 1 || s.w < 1) {
    throw Error(ErrorCode::kInvalidSpec, "scene needs m >= 2 and a non-empty frame");
  }
  if (!(s.size_x > 0.0) || (s.shape == ObjectShape::kRectangle && !(s.size_y > 0.0))) {
    throw Error(ErrorCode::kInvalidSpec, "object size must be positive");
  }
  if (!(s.noise >= 0.0)) throw Error(ErrorCode::kInvalidSpec, "noise amplitude must be >= 0");

  for (int t = 0; t < s.m; ++t) {
    const double ox = s.x0 + t * s.object_velocity.dx;
    const double oy = s.y0 + t * s.object_velocity.dy;
    double left, right, top, bottom;
    if (s.shape == ObjectShape::kRectangle) {
      left = ox;
      right = ox + s.size_x;
      top = oy;
      bottom = oy + s.size_y;
    } else {
      left = ox - s.size_x;
      right = ox + s.size_x;
      top = oy - s.size_x;
      bottom = oy + s.size_x;
    }
    if (left < 0.0 || top < 0.0 || right > s.w || bottom > s.h) {
      throw Error(ErrorCode::kObjectLeavesFrame,
                  "object leaves the frame at t=" + std::to_string(t));
    }
  }
}

}  // namespace

FlowPlane read_flo(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 4 || load_le<float>(buf.data()) != kFloMagic) {
    throw Error(ErrorCode::kBadMagic, path.string());
  }
  if (buf.size() < 12) throw Error(ErrorCode::kTruncated, path.string() + ": missing header");
  const std::int32_t w = load_le<std::int32_t>(buf.data() + 4);
  const std::int32_t h = load_le<std::int32_t>(buf.data() + 8);
  if (w <= 0 || h <= 0) {
    throw Error(ErrorCode::kBadMagic, path.string() + ": non-positive dimensions");
  }
  const std::size_t count = static_cast<std::size_t>(w) * h * 2;
  if (buf.size() - 12 < count * sizeof(float)) {
    throw Error(ErrorCode::kTruncated, path.string());
  }
  FlowPlane plane(h, w);
  std::memcpy(plane.data.data(), buf.data() + 12, count * sizeof(float));
  return plane;
}

void write_flo(const FlowPlane& plane, const fs::path& path) {
  if (plane.data.size() != static_cast<std::size_t>(plane.h) * plane.w * 2) {
    throw Error(ErrorCode::kDimensionMismatch, "flow plane payload does not match h x w x 2");
  }
  for (float f : plane.data) {
    if (!std::isfinite(f)) throw Error(ErrorCode::kNonFinite, "refusing to write " + path.string());
  }
  std::vector<char> bytes;
  bytes.reserve(12 + plane.data.size() * sizeof(float));
  store_le(bytes, kFloMagic);
  store_le(bytes, static_cast<std::int32_t>(plane.w));
  store_le(bytes, static_cast<std::int32_t>(plane.h));
  const char* raw = reinterpret_cast<const char*>(plane.data.data());
  bytes.insert(bytes.end(), raw, raw + plane.data.size() * sizeof(float));
  write_file_atomic(path, bytes);
}

bool object_covers(const SynthSceneSpec& s, int t, int r, int c) {
  const double px = c + 0.5;
  const double py = r + 0.5;
  const double ox = s.x0 + t * s.object_velocity.dx;
  const double oy = s.y0 + t * s.object_velocity.dy;
  if (s.shape == ObjectShape::kRectangle) {
    return px >= ox && px < ox + s.size_x && py >= oy && py < oy + s.size_y;
  }
  const double ddx = px - ox;
  const double ddy = py - oy;
  return ddx * ddx + ddy * ddy <= s.size_x * s.size_x;
}

SynthScene synth_scene(const SynthSceneSpec& s) {
  validate_spec(s);

  SynthScene scene;
  const VideoDims dims{s.m, s.h, s.w};
  scene.video.dims = dims;
  scene.video.pixels.resize(dims.n() * 3);
  scene.gt.dims = dims;
  scene.gt.labels.resize(dims.n());
  scene.flow.dims = dims;

  static constexpr double kObjectColor[3] = {0.85, 0.35, 0.20};
  static constexpr double kBackgroundColor[3] = {0.30, 0.45, 0.55};

  for (int t = 0; t < s.m; ++t) {
    for (int r = 0; r < s.h; ++r) {
      for (int c = 0; c < s.w; ++c) {
        const bool obj = object_covers(s, t, r, c);
        const NodeId id = dims.node(t, r, c);
        scene.gt.labels[id] = obj ? 1 : 0;
        // Texture is attached to the moving surface, so it is sampled at the
        // pixel's position in that surface's frame-0 coordinates.
        const Velocity& vel = obj ? s.object_velocity : s.background_velocity;
        const auto tx = static_cast<std::int64_t>(std::floor(c - t * vel.dx));
        const auto ty = static_cast<std::int64_t>(std::floor(r - t * vel.dy));
        const double* base = obj ? kObjectColor : kBackgroundColor;
        for (int ch = 0; ch < 3; ++ch) {
          const double value = base[ch] + s.noise * texel(s.seed, (obj ? 8 : 0) + ch, tx, ty);
          scene.video.pixels[id * 3 + ch] = static_cast<float>(std::clamp(value, 0.0, 1.0));
        }
      }
    }
  }

  const auto fo = s.object_velocity;
  const auto fb = s.background_velocity;
  for (int t = 0; t + 1 < s.m; ++t) {
    FlowPlane fwd(s.h, s.w);
    FlowPlane bwd(s.h, s.w);
    for (int r = 0; r < s.h; ++r) {
      for (int c = 0; c < s.w; ++c) {
        const Velocity& vf = scene.gt.labels[dims.node(t, r, c)] ? fo : fb;
        fwd.set(r, c, static_cast<float>(vf.dx), static_cast<float>(vf.dy));
        const Velocity& vb = scene.gt.labels[dims.node(t + 1, r, c)] ? fo : fb;
        bwd.set(r, c, static_cast<float>(-vb.dx), static_cast<float>(-vb.dy));
      }
    }
    scene.flow.forward.push_back(std::move(fwd));
    scene.flow.backward.push_back(std::move(bwd));
  }
  return scene;
}

SynthSceneSpec random_scene_spec(int m, int h, int w, std::uint64_t seed, bool camera_motion) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  auto uniform_int = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  SynthSceneSpec s;
  s.m = m;
  s.h = h;
  s.w = w;
  s.seed = seed;
  s.noise = 0.05;
  const int max_step_x = std::max(0, std::min(2, (w / 2) / std::max(1, m - 1)));
  const int max_step_y = std::max(0, std::min(2, (h / 2) / std::max(1, m - 1)));
  // With a moving background the two velocities must not be parallel, or the
  // flow features cannot tell the regions apart without an intercept.
  auto admissible = [&](const Velocity& o, const Velocity& bg) {
    if (o == Velocity{0.0, 0.0}) return false;
    return !camera_motion || o.dx * bg.dy - o.dy * bg.dx != 0.0;
  };
  auto any_admissible = [&](const Velocity& bg) {
    for (int dx = -max_step_x; dx <= max_step_x; ++dx) {
      for (int dy = -max_step_y; dy <= max_step_y; ++dy) {
        if (admissible(Velocity{double(dx), double(dy)}, bg)) return true;
      }
    }
    return false;
  };

  bool feasible = false;
  if (camera_motion) {
    for (int bx = -1; bx <= 1; ++bx) {
      for (int by = -1; by <= 1; ++by) {
        if (bx != 0 || by != 0) feasible = feasible || any_admissible(Velocity{double(bx), double(by)});
      }
    }
  } else {
    feasible = any_admissible(Velocity{0.0, 0.0});
  }
  if (!feasible) {
    throw Error(ErrorCode::kInvalidSpec, "no object velocity keeps a " + std::to_string(m) +
                                             "-frame " + std::to_string(h) + "x" +
                                             std::to_string(w) + " trajectory in frame");
  }

  s.background_velocity = {0.0, 0.0};
  if (camera_motion) {
    do {
      s.background_velocity = {static_cast<double>(uniform_int(-1, 1)),
                               static_cast<double>(uniform_int(-1, 1))};
    } while (s.background_velocity == Velocity{0.0, 0.0} ||
             !any_admissible(s.background_velocity));
  }

  const Velocity& b = s.background_velocity;
  for (;;) {
    s.object_velocity = {static_cast<double>(uniform_int(-max_step_x, max_step_x)),
                         static_cast<double>(uniform_int(-max_step_y, max_step_y))};
    if (admissible(s.object_velocity, b)) break;
  }

  const double travel_x = std::abs(s.object_velocity.dx) * (m - 1);
  const double travel_y = std::abs(s.object_velocity.dy) * (m - 1);
  s.shape = uniform_int(0, 1) == 0 ? ObjectShape::kRectangle : ObjectShape::kDisk;

  double extent_x, extent_y;
  if (s.shape == ObjectShape::kRectangle) {
    s.size_x = std::max(2, uniform_int(w / 5, w / 3));
    s.size_y = std::max(2, uniform_int(h / 5, h / 3));
    s.size_x = std::min(s.size_x, w - travel_x);
    s.size_y = std::min(s.size_y, h - travel_y);
    extent_x = s.size_x;
    extent_y = s.size_y;
  } else {
    const int lo = std::max(1, std::min(w, h) / 8);
    const int hi = std::max(lo, std::min(w, h) / 5);
    s.size_x = uniform_int(lo, hi);
    s.size_x = std::min({s.size_x, (w - travel_x) / 2.0, (h - travel_y) / 2.0});
    s.size_y = s.size_x;
    extent_x = extent_y = 2.0 * s.size_x;
  }

  // Start so the whole trajectory stays inside the frame.
  const double lo_x = s.object_velocity.dx < 0 ? travel_x : 0.0;
  const double lo_y = s.object_velocity.dy < 0 ? travel_y : 0.0;
  const double span_x = std::max(0.0, w - extent_x - travel_x);
  const double span_y = std::max(0.0, h - extent_y - travel_y);
  const double start_x = lo_x + std::floor(std::uniform_real_distribution<double>(0.0, 1.0)(rng) * span_x);
  const double start_y = lo_y + std::floor(std::uniform_real_distribution<double>(0.0, 1.0)(rng) * span_y);
  if (s.shape == ObjectShape::kRectangle) {
    s.x0 = start_x;
    s.y0 = start_y;
  } else {
    s.x0 = start_x + s.size_x;
    s.y0 = start_y + s.size_x;
  }
  return s;
}

void save_scene(const SynthScene& scene, const fs::path& dir) {
  const VideoDims& d = scene.video.dims;
  fs::create_directories(dir / "frames");
  fs::create_directories(dir / "flow");
  fs::create_directories(dir / "gt");

  std::vector<std::uint8_t> rgb(d.frame_size() * 3);
  std::vector<std::uint8_t> mask(d.frame_size());
  for (int t = 0; t < d.m; ++t) {
    const std::size_t off = static_cast<std::size_t>(t) * d.frame_size();
    for (std::size_t i = 0; i < d.frame_size() * 3; ++i) {
      rgb[i] = static_cast<std::uint8_t>(std::lround(scene.video.pixels[off * 3 + i] * 255.0f));
    }
    for (std::size_t i = 0; i < d.frame_size(); ++i) {
      mask[i] = scene.gt.labels[off + i] ? 255 : 0;
    }
    write_ppm(dir / "frames" / indexed_name("frame", t, ".ppm"), d.h, d.w, rgb.data());
    write_pgm(dir / "gt" / indexed_name("gt", t, ".pgm"), d.h, d.w, mask.data());
  }
  for (int t = 0; t + 1 < d.m; ++t) {
    write_flo(scene.flow.forward[t], dir / "flow" / indexed_name("forward", t, ".flo"));
    write_flo(scene.flow.backward[t], dir / "flow" / indexed_name("backward", t, ".flo"));
  }
}

VideoVolume load_frames(const fs::path& dir) {
  const auto files = list_files(dir, "", ".ppm");
  if (files.size() < 2) {
    throw Error(ErrorCode::kInvalidSpec, "need at least two .ppm frames in " + dir.string());
  }
  VideoVolume video;
  for (std::size_t t = 0; t < files.size(); ++t) {
    const Image8 img = read_netpbm(files[t]);
    if (img.channels != 3) {
      throw Error(ErrorCode::kBadMagic, files[t].string() + " is not a P6 image");
    }
    if (t == 0) {
      video.dims = VideoDims{static_cast<int>(files.size()), img.h, img.w};
      video.pixels.reserve(video.dims.n() * 3);
    } else if (img.h != video.dims.h || img.w != video.dims.w) {
      throw Error(ErrorCode::kShapeMismatch, files[t].string() + " differs in size from frame 0");
    }
    for (std::uint8_t b : img.data) video.pixels.push_back(b / 255.0f);
  }
  return video;
}

FlowField load_flow(const fs::path& dir, const VideoDims& dims) {
  FlowField flow;
  flow.dims = dims;
  for (int t = 0; t + 1 < dims.m; ++t) {
    for (const char* kind : {"forward", "backward"}) {
      const fs::path path = dir / indexed_name(kind, t, ".flo");
      if (!fs::exists(path)) throw Error(ErrorCode::kIo, "missing flow file " + path.string());
      FlowPlane plane = read_flo(path);
      if (plane.h != dims.h || plane.w != dims.w) {
        throw Error(ErrorCode::kShapeMismatch, path.string() + " does not match the frame size");
      }
      for (float f : plane.data) {
        if (!std::isfinite(f)) throw Error(ErrorCode::kNonFinite, path.string());
      }
      (std::string(kind) == "forward" ? flow.forward : flow.backward).push_back(std::move(plane));
    }
  }
  return flow;
}

GroundTruthMasks load_masks(const fs::path& dir) {
  const auto files = list_files(dir, "", ".pgm");
  if (files.empty()) throw Error(ErrorCode::kIo, "no .pgm masks in " + dir.string());
  GroundTruthMasks gt;
  for (std::size_t t = 0; t < files.size(); ++t) {
    const Image8 img = read_netpbm(files[t]);
    if (img.channels != 1) throw Error(ErrorCode::kBadMagic, files[t].string() + " is not P5");
    if (t == 0) {
      gt.dims = VideoDims{static_cast<int>(files.size()), img.h, img.w};
    } else if (img.h != gt.dims.h || img.w != gt.dims.w) {
      throw Error(ErrorCode::kShapeMismatch, files[t].string() + " differs in size from mask 0");
    }
    for (std::uint8_t b : img.data) gt.labels.push_back(b > 127 ? 1 : 0);
  }
  return gt;
}

}  // namespace stgraph
