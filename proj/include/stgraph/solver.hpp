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

#include "stgraph/feature_chains.hpp"
#include "stgraph/motion_graph.hpp"
#include "stgraph/projection.hpp"

namespace stgraph {

enum class InitMode { kUniform, kConstant, kGaussianPrior, kFromFile };

InitMode parse_init_mode(const std::string& name);
std::string to_string(InitMode mode);

struct SolverConfig {
  int p = 5;               // propagation radius, frames
  int q = 0;               // feature half-window, frames
  double sigma_t = 2.0;    // temporal kernel bandwidth, frames
  std::optional<double> lambda;  // ridge strength; unset means default_ridge(F)
  double tol = 1e-6;
  int max_iters = 20;
  InitMode init = InitMode::kUniform;
  std::uint64_t seed = 42;
  std::filesystem::path init_file;
  bool standardize = false;
  bool bias = false;
  std::size_t threads = 1;

  /// Throws InvalidConfig on the first violated constraint.
  void validate() const;
  FeatureOptions feature_options() const { return {q, standardize, bias}; }
};

struct IterationRecord {
  int iter = 0;
  double rayleigh = 0.0;   // x^T (P M P) x for the iterate produced
  double step_norm = 0.0;  // ||x(t) - x(t-1)||_2
  double ms = 0.0;         // wall time of the propagate/project/normalize step
};

struct SolveDiagnostics {
  std::vector<IterationRecord> iterations;
  bool converged = false;
  int iterations_used = 0;
  double negative_fraction = 0.0;  // share of entries < 0 in the final vector
};

struct SolveResult {
  std::vector<double> x;  // unit L2 norm, sign fixed so that sum(x) >= 0
  SolveDiagnostics diagnostics;
};

/// Everything that stays fixed across power iterations for one video.
struct GraphProblem {
  ChainIndex chains;
  MotionGraph graph;
  FeatureMatrix features;
  RidgeSolveCache cache;
};

GraphProblem build_problem(const FlowField& flow, const FeatureMapSet& maps,
                           const SolverConfig& config);

/// Unit-norm starting vector. Uniform draws iid U(0,1) from `seed`; the
/// Gaussian prior is a centered 2D bump repeated on every frame; from-file
/// loads a TensorFile holding exactly n values.
std::vector<double> init_labels(const VideoDims& dims, InitMode mode, std::uint64_t seed,
                                const std::filesystem::path& init_file = {});

/// Scales x in place to unit L2 norm and returns the norm it had.
double normalize(std::span<double> x);

/// One propagate / project / normalize step.
std::vector<double> iterate_once(const MotionGraph& g, const FeatureMatrix& f,
                                 const RidgeSolveCache& cache, std::span<const double> x,
                                 std::size_t threads = 1);

/// x^T (P M P) x evaluated without forming P or M.
double rayleigh_quotient(const MotionGraph& g, const FeatureMatrix& f,
                         const RidgeSolveCache& cache, std::span<const double> x,
                         std::size_t threads = 1);

/// Runs iterate_once until the step norm drops below config.tol or
/// config.max_iters is reached, starting from init_labels(config) or `x0`.
SolveResult solve(const MotionGraph& g, const FeatureMatrix& f, const RidgeSolveCache& cache,
                  const SolverConfig& config, std::optional<std::vector<double>> x0 = {});

void write_diagnostics_csv(const SolveDiagnostics& diag, const std::filesystem::path& path);

}  // namespace stgraph
