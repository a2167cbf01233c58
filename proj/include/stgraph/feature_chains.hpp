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

#include <span>
#include <string>
#include <vector>

#include "stgraph/flow_io.hpp"
#include "stgraph/motion_graph.hpp"

namespace stgraph {

/// Largest supported feature dimension (exclusive bound is 100).
inline constexpr int kMaxFeatureDim = 99;

/// One per-pixel feature plane stack: m x h x w x channels.
struct FeatureSource {
  std::string name;
  int channels = 0;
  std::vector<double> values;
};

/// Per-pixel feature planes shared by every source; a pixel's feature vector
/// is the concatenation of all sources in insertion order.
class FeatureMapSet {
 public:
  explicit FeatureMapSet(VideoDims dims) : dims_(dims) {}

  void add(FeatureSource source);

  const VideoDims& dims() const { return dims_; }
  int channels() const { return channels_; }
  const std::vector<FeatureSource>& sources() const { return sources_; }

  /// Writes the concatenated feature vector of `node` into `out`.
  void gather(NodeId node, double* out) const;

 private:
  VideoDims dims_;
  int channels_ = 0;
  std::vector<FeatureSource> sources_;
};

/// Flow displacement (u, v) per pixel. The last frame has no forward flow, so
/// it uses the negated backward flow into the previous frame.
FeatureSource flow_features(const FlowField& flow);

/// Single-channel source from a length-n per-node vector.
FeatureSource scalar_features(std::string name, std::span<const double> values);

/// Dense n x d matrix, row-major.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Row j concatenates pixel features met along node j's chains, in temporal
/// order: q backward steps, j itself, q forward steps. A chain that ends early
/// repeats its last node's features in the remaining slots.
/// `reserved` extra columns (e.g. a bias) count toward the dimension limit.
FeatureMatrix collect_features(const ChainIndex& chains, const FeatureMapSet& maps, int q,
                               int reserved = 0, std::size_t threads = 1);

/// Zero-mean, unit (population) standard deviation columns; zero-variance
/// columns become 0. Optionally appends an all-ones bias column.
FeatureMatrix standardize_columns(const FeatureMatrix& f, bool append_bias = true);

FeatureMatrix append_bias_column(const FeatureMatrix& f);

struct FeatureOptions {
  int q = 0;
  bool standardize = false;
  bool bias = false;
};

/// collect_features followed by the optional conditioning steps.
FeatureMatrix build_feature_matrix(const ChainIndex& chains, const FeatureMapSet& maps,
                                   const FeatureOptions& options, std::size_t threads = 1);

}  // namespace stgraph
