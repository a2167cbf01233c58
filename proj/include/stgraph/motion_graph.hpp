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
#include <optional>
#include <span>
#include <vector>

#include "stgraph/flow_io.hpp"
#include "stgraph/video.hpp"

namespace stgraph {

/// Per-node outgoing motion-chain links. kNoLink marks a chain that ends
/// (video boundary or flow pointing outside the frame).
struct ChainIndex {
  static constexpr NodeId kNoLink = 0xFFFFFFFFu;

  VideoDims dims;
  std::vector<NodeId> fwd;  // successor in frame t+1
  std::vector<NodeId> bwd;  // predecessor in frame t-1

  std::optional<NodeId> next(NodeId a) const {
    return fwd[a] == kNoLink ? std::nullopt : std::optional<NodeId>(fwd[a]);
  }
  std::optional<NodeId> prev(NodeId a) const {
    return bwd[a] == kNoLink ? std::nullopt : std::optional<NodeId>(bwd[a]);
  }
};

/// Rounds to the nearest integer with ties away from zero.
int round_half_away(double v);

ChainIndex build_chains(const FlowField& flow);

/// Gaussian weight of a temporal distance: exp(-dt^2 / (2 sigma_t^2)).
double temporal_kernel(double dt, double sigma_t);

/// Sparse symmetric motion matrix M in compressed-row form. Row a lists its
/// neighbors in increasing id order; weights depend only on frame distance.
class MotionGraph {
 public:
  MotionGraph() = default;

  std::size_t n() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  /// Directed entry count (each undirected edge is stored twice).
  std::size_t nnz() const { return neighbors_.size(); }
  std::size_t edge_count() const { return nnz() / 2; }
  const VideoDims& dims() const { return dims_; }
  int radius() const { return radius_; }
  double sigma_t() const { return sigma_t_; }

  std::span<const NodeId> neighbors(NodeId a) const {
    return {neighbors_.data() + offsets_[a], neighbors_.data() + offsets_[a + 1]};
  }
  std::span<const double> weights(NodeId a) const {
    return {weights_.data() + offsets_[a], weights_.data() + offsets_[a + 1]};
  }

  /// y = M x. Each output entry is summed in neighbor order, so the result is
  /// independent of `threads`.
  std::vector<double> multiply(std::span<const double> x, std::size_t threads = 1) const;
  void multiply(std::span<const double> x, std::span<double> y, std::size_t threads = 1) const;

  /// Edge list as CSV `a,b,weight`, one line per directed entry.
  void dump_csv(const std::filesystem::path& path) const;

 private:
  friend MotionGraph build_motion_graph(const ChainIndex&, int, double);

  VideoDims dims_;
  int radius_ = 0;
  double sigma_t_ = 0.0;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<double> weights_;
};

/// Connects every node to the nodes reached by walking 1..p steps along its
/// forward chain and 1..p steps along its backward chain, then symmetrizes and
/// collapses duplicates.
MotionGraph build_motion_graph(const ChainIndex& chains, int p, double sigma_t);

}  // namespace stgraph
