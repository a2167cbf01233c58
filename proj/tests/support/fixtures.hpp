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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "stgraph/flow_io.hpp"
#include "stgraph/motion_graph.hpp"

namespace stgraph::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("stgraph_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline FlowField zero_flow(const VideoDims& dims) {
  FlowField f;
  f.dims = dims;
  for (int t = 0; t + 1 < dims.m; ++t) {
    f.forward.emplace_back(dims.h, dims.w);
    f.backward.emplace_back(dims.h, dims.w);
  }
  return f;
}

// Independent per-pixel random displacements in [-spread, spread], so chains
// merge, split and leave the frame.
inline FlowField random_flow(const VideoDims& dims, std::uint64_t seed, double spread = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(static_cast<float>(-spread), static_cast<float>(spread));
  FlowField f = zero_flow(dims);
  for (int t = 0; t + 1 < dims.m; ++t) {
    for (int r = 0; r < dims.h; ++r) {
      for (int c = 0; c < dims.w; ++c) {
        f.forward[t].set(r, c, u(rng), u(rng));
        f.backward[t].set(r, c, u(rng), u(rng));
      }
    }
  }
  return f;
}

// Chain walker written against the flow directly, without ChainIndex.
inline long step_node(const FlowField& f, long node, int dir) {
  const VideoDims& d = f.dims;
  const long fs = static_cast<long>(d.h) * d.w;
  const int t = static_cast<int>(node / fs);
  const int r = static_cast<int>((node % fs) / d.w);
  const int c = static_cast<int>(node % d.w);
  if (dir > 0 && t + 1 >= d.m) return -1;
  if (dir < 0 && t == 0) return -1;
  const FlowPlane& p = dir > 0 ? f.forward[t] : f.backward[t - 1];
  const double nr = r + static_cast<double>(p.v(r, c));
  const double nc = c + static_cast<double>(p.u(r, c));
  // Nearest pixel, halves away from zero.
  const long rr = static_cast<long>(nr < 0 ? -std::floor(-nr + 0.5) : std::floor(nr + 0.5));
  const long cc = static_cast<long>(nc < 0 ? -std::floor(-nc + 0.5) : std::floor(nc + 0.5));
  if (rr < 0 || rr >= d.h || cc < 0 || cc >= d.w) return -1;
  return (t + dir) * fs + rr * d.w + cc;
}

// Every (a, b) pair linked by walking 1..p chain steps in either direction,
// symmetrized.
inline std::set<std::pair<long, long>> brute_force_edges(const FlowField& f, int p) {
  std::set<std::pair<long, long>> edges;
  const long n = static_cast<long>(f.dims.n());
  for (long a = 0; a < n; ++a) {
    for (int dir : {1, -1}) {
      long cur = a;
      for (int s = 0; s < p; ++s) {
        cur = step_node(f, cur, dir);
        if (cur < 0) break;
        edges.insert({a, cur});
        edges.insert({cur, a});
      }
    }
  }
  return edges;
}

inline Eigen::MatrixXd dense_m(const MotionGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.n());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto nb = g.neighbors(static_cast<NodeId>(a));
    const auto wt = g.weights(static_cast<NodeId>(a));
    for (std::size_t k = 0; k < nb.size(); ++k) m(a, nb[k]) = wt[k];
  }
  return m;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

inline Eigen::Map<const Eigen::VectorXd> as_eigen(const std::vector<double>& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

inline double relative_error(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
  const double scale = want.norm();
  return scale == 0.0 ? got.norm() : (got - want).norm() / scale;
}

// Oracle-scale instance with camera motion: 5 frames of 16x16, object and
// background translating in non-parallel directions, so the flow features
// have full column rank and lambda = 0 is usable.
inline SynthScene oracle_instance(std::uint64_t seed) {
  return synth_scene(random_scene_spec(5, 16, 16, seed, true));
}

}  // namespace stgraph::testing
