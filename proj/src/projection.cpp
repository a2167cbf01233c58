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

#include "stgraph/projection.hpp"

#include <cmath>
#include <string>

#include "stgraph/error.hpp"
#include "stgraph/parallel.hpp"

namespace stgraph {

namespace {

constexpr std::size_t kBlockRows = 4096;

std::size_t block_count(std::size_t n) { return (n + kBlockRows - 1) / kBlockRows; }

}  // namespace

std::vector<double> gram_matrix(const FeatureMatrix& f, std::size_t threads) {
  const std::size_t n = f.rows();
  const std::size_t d = f.cols();
  const std::size_t blocks = block_count(n);
  std::vector<std::vector<double>> partial(blocks, std::vector<double>(d * d, 0.0));

  parallel_for(blocks, threads, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      double* g = partial[b].data();
      const std::size_t end = std::min(n, (b + 1) * kBlockRows);
      for (std::size_t i = b * kBlockRows; i < end; ++i) {
        const double* row = f.row(i).data();
        for (std::size_t j = 0; j < d; ++j) {
          const double fj = row[j];
          double* gj = g + j * d;
          for (std::size_t k = j; k < d; ++k) gj[k] += fj * row[k];
        }
      }
    }
  });

  std::vector<double> gram(d * d, 0.0);
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < d * d; ++i) gram[i] += p[i];
  }
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < j; ++k) gram[j * d + k] = gram[k * d + j];
  }
  return gram;
}

double default_ridge(const FeatureMatrix& f) {
  if (f.cols() == 0) return 0.0;
  double trace = 0.0;
  for (double v : f.data()) trace += v * v;
  return 1e-4 * trace / static_cast<double>(f.cols());
}

RidgeSolveCache build_cache(const FeatureMatrix& f, double lambda, std::size_t threads) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidConfig, "ridge strength must be finite and >= 0");
  }
  if (f.cols() == 0) throw Error(ErrorCode::kDimensionMismatch, "feature matrix has no columns");

  RidgeSolveCache cache;
  const std::size_t d = f.cols();
  cache.d_ = d;
  cache.lambda_ = lambda;
  cache.gram_ = gram_matrix(f, threads);
  for (std::size_t j = 0; j < d; ++j) cache.gram_[j * d + j] += lambda;

  // Cholesky, G = L L^T.
  std::vector<double>& l = cache.chol_;
  l.assign(d * d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double pivot = cache.gram_[j * d + j];
    for (std::size_t k = 0; k < j; ++k) pivot -= l[j * d + k] * l[j * d + k];
    if (!(pivot > 1e-13 * cache.gram_[j * d + j])) {
      throw Error(ErrorCode::kSingularGram,
                  "regularized Gram matrix is not positive definite at column " +
                      std::to_string(j) + " (lambda=" + std::to_string(lambda) + ")");
    }
    const double ljj = std::sqrt(pivot);
    l[j * d + j] = ljj;
    for (std::size_t i = j + 1; i < d; ++i) {
      double s = cache.gram_[i * d + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * d + k] * l[j * d + k];
      l[i * d + j] = s / ljj;
    }
  }
  return cache;
}

std::vector<double> RidgeSolveCache::solve(std::span<const double> rhs) const {
  if (rhs.size() != d_) throw Error(ErrorCode::kDimensionMismatch, "rhs length must equal d");
  std::vector<double> y(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < d_; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= chol_[i * d_ + k] * y[k];
    y[i] /= chol_[i * d_ + i];
  }
  for (std::size_t i = d_; i-- > 0;) {
    for (std::size_t k = i + 1; k < d_; ++k) y[i] -= chol_[k * d_ + i] * y[k];
    y[i] /= chol_[i * d_ + i];
  }
  return y;
}

std::vector<double> fit_weights(const RidgeSolveCache& cache, const FeatureMatrix& f,
                                std::span<const double> x, std::size_t threads) {
  if (x.size() != f.rows() || cache.dim() != f.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "label vector, features and cache disagree");
  }
  const std::size_t n = f.rows();
  const std::size_t d = f.cols();
  const std::size_t blocks = block_count(n);
  std::vector<std::vector<double>> partial(blocks, std::vector<double>(d, 0.0));
  parallel_for(blocks, threads, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      double* acc = partial[b].data();
      const std::size_t end = std::min(n, (b + 1) * kBlockRows);
      for (std::size_t i = b * kBlockRows; i < end; ++i) {
        const double* row = f.row(i).data();
        const double xi = x[i];
        for (std::size_t j = 0; j < d; ++j) acc[j] += row[j] * xi;
      }
    }
  });
  std::vector<double> rhs(d, 0.0);
  for (const auto& p : partial) {
    for (std::size_t j = 0; j < d; ++j) rhs[j] += p[j];
  }
  return cache.solve(rhs);
}

std::vector<double> project(const RidgeSolveCache& cache, const FeatureMatrix& f,
                            std::span<const double> x, std::size_t threads) {
  const std::vector<double> w = fit_weights(cache, f, x, threads);
  const std::size_t d = f.cols();
  std::vector<double> y(f.rows());
  parallel_for(f.rows(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double* row = f.row(i).data();
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += row[j] * w[j];
      y[i] = acc;
    }
  });
  return y;
}

}  // namespace stgraph
