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
#include <vector>

#include "stgraph/feature_chains.hpp"

namespace stgraph {

/// Factorized ridge normal equations (F^T F + lambda I) for a fixed F. The
/// projector P = F (F^T F + lambda I)^-1 F^T is never formed.
class RidgeSolveCache {
 public:
  std::size_t dim() const { return d_; }
  double lambda() const { return lambda_; }
  /// Row-major F^T F + lambda I.
  const std::vector<double>& regularized_gram() const { return gram_; }

  /// Solves (F^T F + lambda I) w = rhs through the cached Cholesky factor.
  std::vector<double> solve(std::span<const double> rhs) const;

 private:
  friend RidgeSolveCache build_cache(const FeatureMatrix&, double, std::size_t);

  std::size_t d_ = 0;
  double lambda_ = 0.0;
  std::vector<double> gram_;
  std::vector<double> chol_;  // lower-triangular, row-major
};

/// F^T F accumulated in fixed 4096-row blocks and reduced in block order, so
/// the result is bitwise independent of `threads`. Row-major d x d.
std::vector<double> gram_matrix(const FeatureMatrix& f, std::size_t threads = 1);

/// 1e-4 * trace(F^T F) / d.
double default_ridge(const FeatureMatrix& f);

/// Throws SingularGram when a Cholesky pivot is not safely positive, which for
/// lambda = 0 means F is (numerically) rank-deficient.
RidgeSolveCache build_cache(const FeatureMatrix& f, double lambda, std::size_t threads = 1);

/// w = (F^T F + lambda I)^-1 F^T x
std::vector<double> fit_weights(const RidgeSolveCache& cache, const FeatureMatrix& f,
                                std::span<const double> x, std::size_t threads = 1);

/// P x = F w; for lambda = 0 the orthogonal projection onto col(F).
std::vector<double> project(const RidgeSolveCache& cache, const FeatureMatrix& f,
                            std::span<const double> x, std::size_t threads = 1);

}  // namespace stgraph
