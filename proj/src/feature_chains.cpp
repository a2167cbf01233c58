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

#include "stgraph/feature_chains.hpp"

#include <cmath>

#include "stgraph/error.hpp"
#include "stgraph/parallel.hpp"

namespace stgraph {

void FeatureMapSet::add(FeatureSource source) {
  if (source.channels < 1 || source.values.size() != dims_.n() * source.channels) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feature source '" + source.name + "' does not match the video shape");
  }
  for (double v : source.values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFinite, "feature source '" + source.name + "'");
    }
  }
  channels_ += source.channels;
  sources_.push_back(std::move(source));
}

void FeatureMapSet::gather(NodeId node, double* out) const {
  for (const auto& s : sources_) {
    const double* src = s.values.data() + static_cast<std::size_t>(node) * s.channels;
    for (int c = 0; c < s.channels; ++c) *out++ = src[c];
  }
}

FeatureSource flow_features(const FlowField& flow) {
  const VideoDims& d = flow.dims;
  FeatureSource src{"flow", 2, std::vector<double>(d.n() * 2)};
  for (int t = 0; t < d.m; ++t) {
    const bool last = t + 1 == d.m;
    const FlowPlane& plane = last ? flow.backward[t - 1] : flow.forward[t];
    const double sign = last ? -1.0 : 1.0;
    for (int r = 0; r < d.h; ++r) {
      for (int c = 0; c < d.w; ++c) {
        const NodeId id = d.node(t, r, c);
        src.values[id * 2] = sign * plane.u(r, c);
        src.values[id * 2 + 1] = sign * plane.v(r, c);
      }
    }
  }
  return src;
}

FeatureSource scalar_features(std::string name, std::span<const double> values) {
  return FeatureSource{std::move(name), 1, std::vector<double>(values.begin(), values.end())};
}

FeatureMatrix collect_features(const ChainIndex& chains, const FeatureMapSet& maps, int q,
                               int reserved, std::size_t threads) {
  if (!(chains.dims == maps.dims())) {
    throw Error(ErrorCode::kDimensionMismatch, "feature maps and chains disagree on video shape");
  }
  if (q < 0) throw Error(ErrorCode::kInvalidConfig, "q must be >= 0");
  const int c = maps.channels();
  const long d = static_cast<long>(2 * q + 1) * c + reserved;
  if (d > kMaxFeatureDim) {
    throw Error(ErrorCode::kFeatureDimOverflow,
                "feature dimension " + std::to_string(d) + " exceeds " +
                    std::to_string(kMaxFeatureDim));
  }

  const std::size_t n = chains.dims.n();
  FeatureMatrix f(n, static_cast<std::size_t>((2 * q + 1) * c));
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      double* row = f.row(j).data();
      const auto node = static_cast<NodeId>(j);
      maps.gather(node, row + static_cast<std::size_t>(q) * c);
      NodeId cur = node;
      for (int k = 1; k <= q; ++k) {
        if (chains.bwd[cur] != ChainIndex::kNoLink) cur = chains.bwd[cur];
        maps.gather(cur, row + static_cast<std::size_t>(q - k) * c);
      }
      cur = node;
      for (int k = 1; k <= q; ++k) {
        if (chains.fwd[cur] != ChainIndex::kNoLink) cur = chains.fwd[cur];
        maps.gather(cur, row + static_cast<std::size_t>(q + k) * c);
      }
    }
  });
  return f;
}

FeatureMatrix standardize_columns(const FeatureMatrix& f, bool append_bias) {
  const std::size_t n = f.rows();
  const std::size_t d = f.cols();
  if (n < 2) throw Error(ErrorCode::kDimensionMismatch, "standardization needs at least 2 rows");

  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += f(i, j);
  }
  for (double& v : mean) v /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double e = f(i, j) - mean[j];
      var[j] += e * e;
    }
  }
  std::vector<double> inv_std(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    // Relative test: a column that is constant up to rounding has no signal.
    const double scale = std::max(std::abs(mean[j]), 1.0);
    inv_std[j] = sd > 1e-12 * scale ? 1.0 / sd : 0.0;
  }

  FeatureMatrix out(n, d + (append_bias ? 1 : 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) out(i, j) = (f(i, j) - mean[j]) * inv_std[j];
    if (append_bias) out(i, d) = 1.0;
  }
  return out;
}

FeatureMatrix append_bias_column(const FeatureMatrix& f) {
  FeatureMatrix out(f.rows(), f.cols() + 1);
  for (std::size_t i = 0; i < f.rows(); ++i) {
    for (std::size_t j = 0; j < f.cols(); ++j) out(i, j) = f(i, j);
    out(i, f.cols()) = 1.0;
  }
  return out;
}

FeatureMatrix build_feature_matrix(const ChainIndex& chains, const FeatureMapSet& maps,
                                   const FeatureOptions& options, std::size_t threads) {
  FeatureMatrix f = collect_features(chains, maps, options.q, options.bias ? 1 : 0, threads);
  if (options.standardize) return standardize_columns(f, options.bias);
  if (options.bias) return append_bias_column(f);
  return f;
}

}  // namespace stgraph
