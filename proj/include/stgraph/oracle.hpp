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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "stgraph/feature_chains.hpp"
#include "stgraph/motion_graph.hpp"

namespace stgraph::oracle {

// Dense reference implementation for small instances. Everything here builds
// the matrices the production path avoids, and is meant for verification only.

inline constexpr std::size_t kMaxDenseNodes = 8192;

struct ExplicitGraph {
  Eigen::MatrixXd M;
  Eigen::MatrixXd P;
  Eigen::MatrixXd A;
};

/// M from the neighbor lists, P = F (F^T F + lambda I)^-1 F^T, A = P M P.
ExplicitGraph build_explicit(const MotionGraph& g, const FeatureMatrix& f, double lambda);

Eigen::MatrixXd to_dense(const FeatureMatrix& f);

struct PowerResult {
  Eigen::VectorXd vector;
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  // False when a second eigenvalue of (numerically) equal magnitude exists, so
  // the returned direction is not unique.
  bool gap_ok = true;

  bool ok() const { return converged && gap_ok; }
};

/// Plain x <- A x / ||A x|| until ||A x - theta x|| <= max(tol |theta|, 1e-12).
/// On failure the last iterate is returned with converged = false.
PowerResult dense_power_iteration(const Eigen::MatrixXd& a, const Eigen::VectorXd& x0,
                                  int max_iters, double tol, bool check_gap = false);

struct SpectrumReport {
  std::vector<double> eigenvalues;  // descending
  std::vector<Eigen::VectorXd> eigenvectors;
  std::vector<double> residuals;    // ||A v - lambda v|| / |lambda_max|
  bool converged = true;

  double eigengap() const;
  /// lambda_1 / lambda_2, or +inf when lambda_2 <= 1e-12 |lambda_1|.
  double ratio() const;
};

/// Top-k eigenpairs by value from a full symmetric eigendecomposition.
SpectrumReport spectrum(const Eigen::MatrixXd& a, int k);

struct PerturbationReport {
  double e_frobenius = 0.0;
  double a_frobenius = 0.0;
  double epsilon = 0.0;  // 8 ||E||_F / ||A*||_F
};

PerturbationReport perturbation_bound(const Eigen::MatrixXd& a_star, const Eigen::MatrixXd& e);

/// Symmetric Gaussian noise scaled to the given Frobenius norm.
Eigen::MatrixXd random_symmetric(std::size_t n, double frobenius, std::uint64_t seed);

/// Angle in radians between two directions, ignoring sign.
double rotation_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Permutation putting nodes with labels[i] != 0 first (stable), and the
/// matrix with rows and columns reordered accordingly.
std::vector<std::size_t> object_first_order(std::span<const std::uint8_t> labels);
Eigen::MatrixXd reorder(const Eigen::MatrixXd& a, const std::vector<std::size_t>& order);

/// Raw float32 TensorFile of shape (n, n).
void dump_matrix(const Eigen::MatrixXd& a, const std::filesystem::path& path);
/// CSV `index,eigenvalue`.
void write_eigenvalues_csv(const SpectrumReport& report, const std::filesystem::path& path);

}  // namespace stgraph::oracle
