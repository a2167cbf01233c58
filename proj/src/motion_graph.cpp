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

#include "stgraph/motion_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "stgraph/error.hpp"
#include "stgraph/parallel.hpp"

namespace stgraph {

int round_half_away(double v) { return static_cast<int>(std::round(v)); }

ChainIndex build_chains(const FlowField& flow) {
  const VideoDims& d = flow.dims;
  if (flow.forward.size() + 1 != static_cast<std::size_t>(d.m) ||
      flow.backward.size() + 1 != static_cast<std::size_t>(d.m)) {
    throw Error(ErrorCode::kDimensionMismatch, "flow field needs m-1 forward and backward planes");
  }
  ChainIndex chains;
  chains.dims = d;
  chains.fwd.assign(d.n(), ChainIndex::kNoLink);
  chains.bwd.assign(d.n(), ChainIndex::kNoLink);

  for (int t = 0; t + 1 < d.m; ++t) {
    const FlowPlane& fwd = flow.forward[t];
    const FlowPlane& bwd = flow.backward[t];
    for (int r = 0; r < d.h; ++r) {
      for (int c = 0; c < d.w; ++c) {
        const int fr = round_half_away(r + fwd.v(r, c));
        const int fc = round_half_away(c + fwd.u(r, c));
        if (d.in_frame(fr, fc)) chains.fwd[d.node(t, r, c)] = d.node(t + 1, fr, fc);

        const int br = round_half_away(r + bwd.v(r, c));
        const int bc = round_half_away(c + bwd.u(r, c));
        if (d.in_frame(br, bc)) chains.bwd[d.node(t + 1, r, c)] = d.node(t, br, bc);
      }
    }
  }
  return chains;
}

double temporal_kernel(double dt, double sigma_t) {
  if (!(sigma_t > 0.0)) {
    throw Error(ErrorCode::kNonPositiveBandwidth, "sigma_t must be > 0");
  }
  return std::exp(-(dt * dt) / (2.0 * sigma_t * sigma_t));
}

MotionGraph build_motion_graph(const ChainIndex& chains, int p, double sigma_t) {
  if (p < 1) throw Error(ErrorCode::kInvalidConfig, "propagation radius p must be >= 1");
  std::vector<double> kernel(p + 1);
  for (int dt = 0; dt <= p; ++dt) kernel[dt] = temporal_kernel(dt, sigma_t);

  const std::size_t n = chains.dims.n();
  std::vector<std::uint64_t> pairs;
  pairs.reserve(n * static_cast<std::size_t>(p) * 4);
  auto add = [&pairs](NodeId a, NodeId b) {
    pairs.push_back((static_cast<std::uint64_t>(a) << 32) | b);
    pairs.push_back((static_cast<std::uint64_t>(b) << 32) | a);
  };
  for (NodeId a = 0; a < n; ++a) {
    NodeId cur = a;
    for (int step = 0; step < p && chains.fwd[cur] != ChainIndex::kNoLink; ++step) {
      cur = chains.fwd[cur];
      add(a, cur);
    }
    cur = a;
    for (int step = 0; step < p && chains.bwd[cur] != ChainIndex::kNoLink; ++step) {
      cur = chains.bwd[cur];
      add(a, cur);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  MotionGraph g;
  g.dims_ = chains.dims;
  g.radius_ = p;
  g.sigma_t_ = sigma_t;
  g.offsets_.assign(n + 1, 0);
  g.neighbors_.reserve(pairs.size());
  g.weights_.reserve(pairs.size());
  const std::size_t frame = chains.dims.frame_size();
  for (std::uint64_t key : pairs) {
    const auto a = static_cast<NodeId>(key >> 32);
    const auto b = static_cast<NodeId>(key & 0xFFFFFFFFu);
    const auto ta = static_cast<long>(a / frame);
    const auto tb = static_cast<long>(b / frame);
    ++g.offsets_[a + 1];
    g.neighbors_.push_back(b);
    g.weights_.push_back(kernel[std::abs(ta - tb)]);
  }
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  return g;
}

std::vector<double> MotionGraph::multiply(std::span<const double> x, std::size_t threads) const {
  std::vector<double> y(n());
  multiply(x, y, threads);
  return y;
}

void MotionGraph::multiply(std::span<const double> x, std::span<double> y,
                           std::size_t threads) const {
  if (x.size() != n() || y.size() != n()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "matvec expects vectors of length " + std::to_string(n()));
  }
  parallel_for(n(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) {
      double acc = 0.0;
      for (std::size_t k = offsets_[a]; k < offsets_[a + 1]; ++k) {
        acc += weights_[k] * x[neighbors_[k]];
      }
      y[a] = acc;
    }
  });
}

void MotionGraph::dump_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.precision(17);
  out << "a,b,weight\n";
  for (std::size_t a = 0; a < n(); ++a) {
    for (std::size_t k = offsets_[a]; k < offsets_[a + 1]; ++k) {
      out << a << ',' << neighbors_[k] << ',' << weights_[k] << '\n';
    }
  }
}

}  // namespace stgraph
