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

#include "stgraph/solver.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "stgraph/error.hpp"
#include "stgraph/tensor_file.hpp"

namespace stgraph {

InitMode parse_init_mode(const std::string& name) {
  if (name == "uniform") return InitMode::kUniform;
  if (name == "constant") return InitMode::kConstant;
  if (name == "gaussian") return InitMode::kGaussianPrior;
  if (name == "file") return InitMode::kFromFile;
  throw Error(ErrorCode::kInvalidConfig,
              "unknown init mode '" + name + "' (uniform|constant|gaussian|file)");
}

std::string to_string(InitMode mode) {
  switch (mode) {
    case InitMode::kUniform: return "uniform";
    case InitMode::kConstant: return "constant";
    case InitMode::kGaussianPrior: return "gaussian";
    case InitMode::kFromFile: return "file";
  }
  return "uniform";
}

void SolverConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidConfig, msg); };
  if (p < 1) fail("p must be >= 1");
  if (q < 0) fail("q must be >= 0");
  if (!(sigma_t > 0.0)) fail("sigma_t must be > 0");
  if (lambda && !(*lambda >= 0.0)) fail("lambda must be >= 0");
  if (!(tol > 0.0)) fail("tol must be > 0");
  if (max_iters < 1) fail("max_iters must be >= 1");
  if (threads < 1) fail("threads must be >= 1");
  if (init == InitMode::kFromFile && init_file.empty()) fail("init mode 'file' needs an init file");
}

GraphProblem build_problem(const FlowField& flow, const FeatureMapSet& maps,
                           const SolverConfig& config) {
  config.validate();
  GraphProblem prob;
  prob.chains = build_chains(flow);
  prob.graph = build_motion_graph(prob.chains, config.p, config.sigma_t);
  prob.features = build_feature_matrix(prob.chains, maps, config.feature_options(), config.threads);
  const double lambda = config.lambda.value_or(default_ridge(prob.features));
  prob.cache = build_cache(prob.features, lambda, config.threads);
  return prob;
}

double normalize(std::span<double> x) {
  double sq = 0.0;
  for (double v : x) sq += v * v;
  const double norm = std::sqrt(sq);
  if (norm > 0.0) {
    for (double& v : x) v /= norm;
  }
  return norm;
}

std::vector<double> init_labels(const VideoDims& dims, InitMode mode, std::uint64_t seed,
                                const std::filesystem::path& init_file) {
  const std::size_t n = dims.n();
  if (n == 0) throw Error(ErrorCode::kDimensionMismatch, "cannot initialize an empty vector");
  std::vector<double> x(n);
  switch (mode) {
    case InitMode::kUniform: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      for (double& v : x) v = u01(rng);
      break;
    }
    case InitMode::kConstant:
      std::fill(x.begin(), x.end(), 1.0);
      break;
    case InitMode::kGaussianPrior: {
      const double cy = dims.h / 2.0;
      const double cx = dims.w / 2.0;
      const double sy = std::max(dims.h / 4.0, 0.5);
      const double sx = std::max(dims.w / 4.0, 0.5);
      for (int t = 0; t < dims.m; ++t) {
        for (int r = 0; r < dims.h; ++r) {
          for (int c = 0; c < dims.w; ++c) {
            const double dy = (r + 0.5 - cy) / sy;
            const double dx = (c + 0.5 - cx) / sx;
            x[dims.node(t, r, c)] = std::exp(-0.5 * (dx * dx + dy * dy));
          }
        }
      }
      break;
    }
    case InitMode::kFromFile: {
      Tensor t;
      try {
        t = read_tensor(init_file);
      } catch (const Error& e) {
        throw Error(ErrorCode::kBadInitFile, e.what());
      }
      if (t.values.size() != n) {
        throw Error(ErrorCode::kBadInitFile, init_file.string() + " holds " +
                                                 std::to_string(t.values.size()) +
                                                 " values, expected " + std::to_string(n));
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(t.values[i])) {
          throw Error(ErrorCode::kBadInitFile, init_file.string() + ": non-finite value");
        }
        x[i] = t.values[i];
      }
      break;
    }
  }
  if (normalize(x) == 0.0) throw Error(ErrorCode::kBadInitFile, "initial vector is all zeros");
  return x;
}

std::vector<double> iterate_once(const MotionGraph& g, const FeatureMatrix& f,
                                 const RidgeSolveCache& cache, std::span<const double> x,
                                 std::size_t threads) {
  const std::vector<double> propagated = g.multiply(x, threads);
  std::vector<double> projected = project(cache, f, propagated, threads);
  const double norm = normalize(projected);
  if (!(norm >= 1e-30)) {
    throw Error(ErrorCode::kCollapsedSolution, "||PMx|| fell below 1e-30");
  }
  return projected;
}

double rayleigh_quotient(const MotionGraph& g, const FeatureMatrix& f,
                         const RidgeSolveCache& cache, std::span<const double> x,
                         std::size_t threads) {
  const std::vector<double> px = project(cache, f, x, threads);
  const std::vector<double> mpx = g.multiply(px, threads);
  return std::inner_product(px.begin(), px.end(), mpx.begin(), 0.0);
}

SolveResult solve(const MotionGraph& g, const FeatureMatrix& f, const RidgeSolveCache& cache,
                  const SolverConfig& config, std::optional<std::vector<double>> x0) {
  config.validate();
  SolveResult result;
  std::vector<double> x;
  if (x0) {
    x = std::move(*x0);
    if (x.size() != g.n()) {
      throw Error(ErrorCode::kDimensionMismatch, "initial vector length differs from node count");
    }
    if (normalize(x) == 0.0) throw Error(ErrorCode::kBadInitFile, "initial vector is all zeros");
  } else {
    x = init_labels(g.dims(), config.init, config.seed, config.init_file);
  }

  auto& diag = result.diagnostics;
  for (int it = 1; it <= config.max_iters; ++it) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<double> next = iterate_once(g, f, cache, x, config.threads);
    const auto stop = std::chrono::steady_clock::now();

    double step = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) step += (next[i] - x[i]) * (next[i] - x[i]);
    step = std::sqrt(step);
    x = std::move(next);

    IterationRecord rec;
    rec.iter = it;
    rec.step_norm = step;
    rec.ms = std::chrono::duration<double, std::milli>(stop - start).count();
    rec.rayleigh = rayleigh_quotient(g, f, cache, x, config.threads);
    diag.iterations.push_back(rec);
    diag.iterations_used = it;
    if (step < config.tol) {
      diag.converged = true;
      break;
    }
  }

  const double sum = std::accumulate(x.begin(), x.end(), 0.0);
  if (sum < 0.0) {
    for (double& v : x) v = -v;
  }
  const auto negatives = std::count_if(x.begin(), x.end(), [](double v) { return v < 0.0; });
  diag.negative_fraction = static_cast<double>(negatives) / static_cast<double>(x.size());
  result.x = std::move(x);
  return result;
}

void write_diagnostics_csv(const SolveDiagnostics& diag, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.precision(17);
  out << "iter,rayleigh,step_norm,ms\n";
  for (const auto& r : diag.iterations) {
    out << r.iter << ',' << r.rayleigh << ',' << r.step_norm << ',' << r.ms << '\n';
  }
}

}  // namespace stgraph
