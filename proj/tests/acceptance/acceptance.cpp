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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any of them fails.
//
// Instance families:
//   oracle   5 frames of 16x16, object and background both translating, q = 0,
//            lambda = 0 (full-rank flow features, P an exact projection)
//   corpus   10 frames of 64x48, static background, default solver settings,
//            seeds 1000..1009
//   corpus at oracle scale: the corpus generator at 5 frames of 16x16

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fixtures.hpp"
#include "stgraph/ike_loop.hpp"
#include "stgraph/oracle.hpp"
#include "stgraph/solver.hpp"

namespace {

using namespace stgraph;
using namespace stgraph::testing;
using Clock = std::chrono::steady_clock;

constexpr int kOracleInstances = 20;
constexpr int kCorpusVideos = 10;
constexpr std::uint64_t kCorpusSeed = 1000;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double abs_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

int failures = 0;
std::string transcript;

void say(const std::string& line) {
  std::printf("%s\n", line.c_str());
  std::fflush(stdout);
  transcript += line + '\n';
}

void report(int id, bool pass, const std::string& detail) {
  say("criterion " + std::to_string(id) + ": " + (pass ? "PASS" : "FAIL") + "  " + detail);
  failures += pass ? 0 : 1;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

SolverConfig oracle_config() {
  SolverConfig cfg;
  cfg.lambda = 0.0;
  cfg.tol = 1e-12;
  cfg.max_iters = 1000;
  return cfg;
}

FeatureMapSet flow_maps(const FlowField& flow) {
  FeatureMapSet maps(flow.dims);
  maps.add(flow_features(flow));
  return maps;
}

SynthScene corpus_video(int i) {
  return synth_scene(random_scene_spec(10, 48, 64, kCorpusSeed + i, false));
}

SynthScene corpus_video_small(int i) {
  return synth_scene(random_scene_spec(5, 16, 16, kCorpusSeed + i, false));
}

// 1 and 3 share the same solves.
void oracle_equivalence_and_rayleigh() {
  double worst_cos = 1.0;
  double worst_drop = 0.0;
  bool all_converged = true;
  const auto t0 = Clock::now();
  for (int i = 0; i < kOracleInstances; ++i) {
    const SynthScene sc = oracle_instance(static_cast<std::uint64_t>(i));
    const SolverConfig cfg = oracle_config();
    const GraphProblem prob = build_problem(sc.flow, flow_maps(sc.flow), cfg);
    const SolveResult r = solve(prob.graph, prob.features, prob.cache, cfg);
    const auto ex = oracle::build_explicit(prob.graph, prob.features, 0.0);
    const auto x0 = init_labels(sc.flow.dims, cfg.init, cfg.seed);
    const oracle::PowerResult dense =
        oracle::dense_power_iteration(ex.A, as_eigen(x0), 5000, 1e-12);
    all_converged = all_converged && r.diagnostics.converged && dense.converged;
    worst_cos = std::min(worst_cos, abs_cosine(as_eigen(r.x), dense.vector));

    const auto& its = r.diagnostics.iterations;
    for (std::size_t k = 2; k < its.size(); ++k) {
      worst_drop = std::max(worst_drop, its[k - 1].rayleigh - its[k].rayleigh);
    }
  }
  const double elapsed = seconds_since(t0);
  report(1, all_converged && worst_cos >= 1 - 1e-6 && elapsed < 5.0,
         "instances " + std::to_string(kOracleInstances) + fmt(" min cosine %.15f", worst_cos) +
             fmt(" runtime %.2f s", elapsed) + (all_converged ? "" : " (not all converged)"));
  report(3, worst_drop <= 1e-9, fmt("largest drop of x'Ax from iteration 2 on %.3e", worst_drop));
}

void init_invariance() {
  double worst = 1.0;
  int worst_iters = 0;
  bool all_converged = true;
  for (int i = 0; i < kCorpusVideos; ++i) {
    const SynthScene sc = corpus_video(i);
    SolverConfig cfg;
    const GraphProblem prob = build_problem(sc.flow, flow_maps(sc.flow), cfg);
    std::vector<Eigen::VectorXd> xs;
    for (InitMode mode : {InitMode::kUniform, InitMode::kConstant, InitMode::kGaussianPrior}) {
      cfg.init = mode;
      const SolveResult r = solve(prob.graph, prob.features, prob.cache, cfg);
      all_converged = all_converged && r.diagnostics.converged;
      worst_iters = std::max(worst_iters, r.diagnostics.iterations_used);
      xs.push_back(as_eigen(r.x));
    }
    for (std::size_t a = 0; a < xs.size(); ++a) {
      for (std::size_t b = a + 1; b < xs.size(); ++b) worst = std::min(worst, abs_cosine(xs[a], xs[b]));
    }
  }
  report(2, all_converged && worst >= 0.999,
         fmt("min pairwise cosine %.9f", worst) + " max iterations " +
             std::to_string(worst_iters) + " of 20" + (all_converged ? "" : " (not converged)"));
}

void matvec_exactness() {
  double worst_rel = 0.0;
  double worst_sym = 0.0;
  int instances = 0;
  auto check = [&](const FlowField& flow) {
    const MotionGraph g = build_motion_graph(build_chains(flow), 5, 2.0);
    const Eigen::MatrixXd m = dense_m(g);
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto x = random_vector(g.n(), 2 * s);
      const auto y = random_vector(g.n(), 2 * s + 1);
      const Eigen::VectorXd want = m * as_eigen(x);
      worst_rel = std::max(worst_rel, relative_error(as_eigen(g.multiply(x)), want));
      const double a = as_eigen(y).dot(as_eigen(g.multiply(x)));
      const double b = as_eigen(x).dot(as_eigen(g.multiply(y)));
      worst_sym = std::max(worst_sym, std::abs(a - b) / std::max(std::abs(a), 1e-300));
    }
    ++instances;
  };
  for (int i = 0; i < kOracleInstances; ++i) check(oracle_instance(i).flow);
  for (std::uint64_t s = 0; s < 4; ++s) check(random_flow(VideoDims{4, 32, 32}, s, 2.5));
  report(4, worst_rel <= 1e-12 && worst_sym <= 1e-10,
         "instances " + std::to_string(instances) + fmt(" max relative error %.3e", worst_rel) +
             fmt(" max symmetry defect %.3e", worst_sym));
}

void projection_correctness() {
  double worst_dense = 0.0, worst_idem = 0.0, worst_rescale = 0.0;
  for (int i = 0; i < kOracleInstances; ++i) {
    const SynthScene sc = oracle_instance(i);
    const ChainIndex ch = build_chains(sc.flow);
    const FeatureMatrix f = collect_features(ch, flow_maps(sc.flow), 0);
    const auto cache = build_cache(f, 0.0);
    const Eigen::MatrixXd fd = oracle::to_dense(f);
    const Eigen::MatrixXd p = fd * (fd.transpose() * fd).inverse() * fd.transpose();
    FeatureMatrix g = f;
    for (std::size_t r = 0; r < g.rows(); ++r) {
      g(r, 0) *= -3.5;
      g(r, 1) *= 1e-3;
    }
    const auto gcache = build_cache(g, 0.0);
    const auto x = random_vector(f.rows(), i);
    const auto px = project(cache, f, x);
    worst_dense = std::max(worst_dense, relative_error(as_eigen(px), p * as_eigen(x)));
    worst_idem = std::max(worst_idem, relative_error(as_eigen(project(cache, f, px)), as_eigen(px)));
    worst_rescale =
        std::max(worst_rescale, relative_error(as_eigen(project(gcache, g, x)), as_eigen(px)));
  }
  report(5, worst_dense <= 1e-8 && worst_idem <= 1e-8 && worst_rescale <= 1e-8,
         fmt("vs dense %.3e", worst_dense) + fmt(" idempotence %.3e", worst_idem) +
             fmt(" rescale %.3e", worst_rescale));
}

void object_recovery() {
  const auto t0 = Clock::now();
  double sum = 0.0, worst = 1.0;
  for (int i = 0; i < kCorpusVideos; ++i) {
    const SynthScene sc = corpus_video(i);
    const SolverConfig cfg;
    const GraphProblem prob = build_problem(sc.flow, flow_maps(sc.flow), cfg);
    const SolveResult r = solve(prob.graph, prob.features, prob.cache, cfg);
    const double j = evaluate(to_masks(r.x, sc.flow.dims), sc.gt).jmean;
    sum += j;
    worst = std::min(worst, j);
  }
  const double elapsed = seconds_since(t0);
  const double mean = sum / kCorpusVideos;
  report(6, mean >= 0.85 && worst >= 0.75 && elapsed < 60.0,
         fmt("mean J %.4f", mean) + fmt(" min J %.4f", worst) + fmt(" runtime %.2f s", elapsed));
}

void eigengap() {
  double worst_ratio = std::numeric_limits<double>::infinity();
  double worst_margin = std::numeric_limits<double>::infinity();  // epsilon - rotation
  double eps_seen = 0.0, rot_seen = 0.0;
  for (int i = 0; i < kCorpusVideos; ++i) {
    const SynthScene sc = corpus_video_small(i);
    const SolverConfig cfg;
    const GraphProblem prob = build_problem(sc.flow, flow_maps(sc.flow), cfg);
    const auto ex = oracle::build_explicit(prob.graph, prob.features, prob.cache.lambda());
    const auto spec = oracle::spectrum(ex.A, 2);
    worst_ratio = std::min(worst_ratio, spec.ratio());

    const Eigen::MatrixXd e = oracle::random_symmetric(ex.A.rows(), 0.01 * ex.A.norm(), 77 + i);
    const double eps = oracle::perturbation_bound(ex.A, e).epsilon;
    const auto noisy = oracle::spectrum(ex.A + e, 1);
    const double rot = oracle::rotation_angle(spec.eigenvectors[0], noisy.eigenvectors[0]);
    if (eps - rot < worst_margin) {
      worst_margin = eps - rot;
      eps_seen = eps;
      rot_seen = rot;
    }
  }
  report(7, worst_ratio >= 2.0 && worst_margin >= 0.0,
         fmt("min ratio %.4g", worst_ratio) + fmt(" tightest case rotation %.4g", rot_seen) +
             fmt(" <= epsilon %.4g", eps_seen));
}

// Timings alternate between the small and the large case, one call each, and
// the median of the paired ratios is kept, so bursts of load from other
// processes hit both sides of a pair alike.
double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

// A long, narrow scene with a static background and a slow object, so almost
// every node has its full 2p temporal neighbors and edges grow with n.
GraphProblem long_scene_problem(int frames) {
  SynthSceneSpec spec;
  spec.m = frames;
  spec.h = 24;
  spec.w = 160;
  spec.x0 = 4.0;
  spec.y0 = 6.0;
  spec.object_velocity = {1.0, 0.0};
  const SynthScene sc = synth_scene(spec);
  return build_problem(sc.flow, flow_maps(sc.flow), SolverConfig{});
}

double iteration_ratio() {
  const GraphProblem a = long_scene_problem(64);
  const GraphProblem b = long_scene_problem(128);
  std::vector<double> xa(a.graph.n(), 1.0);
  std::vector<double> xb(b.graph.n(), 1.0);
  std::vector<double> ratios;
  for (int rep = 0; rep < 41; ++rep) {
    auto t0 = Clock::now();
    xa = iterate_once(a.graph, a.features, a.cache, xa);
    const double ta = seconds_since(t0);
    t0 = Clock::now();
    xb = iterate_once(b.graph, b.features, b.cache, xb);
    ratios.push_back(seconds_since(t0) / ta);
  }
  return median(ratios);
}

FeatureMatrix random_features(std::size_t n, std::size_t d) {
  FeatureMatrix f(n, d);
  const auto v = random_vector(n * d, d);
  std::copy(v.begin(), v.end(), const_cast<double*>(f.data().data()));
  return f;
}

// d = 48 against 96. At d = 24 the per-row cost of streaming the features
// is still a sizable share of the d^2 accumulation.
double gram_ratio() {
  const FeatureMatrix f1 = random_features(100000, 48);
  const FeatureMatrix f2 = random_features(100000, 96);
  std::vector<double> ratios;
  for (int rep = 0; rep < 15; ++rep) {
    auto t0 = Clock::now();
    const double g1 = gram_matrix(f1)[0];
    const double ta = seconds_since(t0);
    t0 = Clock::now();
    const double g2 = gram_matrix(f2)[0];
    if (g1 > 0.0 && g2 > 0.0) ratios.push_back(seconds_since(t0) / ta);
  }
  return median(ratios);
}

void complexity_scaling() {
  const double rn = iteration_ratio();
  const double rd = gram_ratio();
  report(8, rn >= 1.6 && rn <= 2.6 && rd >= 3.2 && rd <= 5.2,
         fmt("iteration time x%.3f when frames double", rn) +
             fmt(", Gram time x%.3f when d doubles", rd));
}

void self_loop() {
  const std::filesystem::path root =
      std::filesystem::temp_directory_path() / ("stgraph_acceptance_" + std::to_string(::getpid()));
  double sum_change = 0.0;
  int transitions = 0;
  double worst_step = std::numeric_limits<double>::infinity();
  std::vector<double> cycle_mean(3, 0.0);
  for (int i = 0; i < kCorpusVideos; ++i) {
    const SynthScene sc = corpus_video(i);
    IkeConfig cfg;
    cfg.cycles = 3;
    cfg.workspace = root / ("video_" + std::to_string(i));
    const IkeResult r = run_ike(sc.flow, cfg, &sc.gt);
    for (int c = 0; c < 3; ++c) cycle_mean[c] += r.cycles[c].metrics->jmean / kCorpusVideos;
    for (int c = 1; c < 3; ++c) {
      const double step = r.cycles[c].metrics->jmean - r.cycles[c - 1].metrics->jmean;
      sum_change += step;
      worst_step = std::min(worst_step, step);
      ++transitions;
    }
  }
  std::filesystem::remove_all(root);
  const double change12 = cycle_mean[1] - cycle_mean[0];
  const double change23 = cycle_mean[2] - cycle_mean[1];
  report(9, change12 >= -0.01 && change23 >= -0.01,
         fmt("mean J per cycle %.4f", cycle_mean[0]) + fmt(" %.4f", cycle_mean[1]) +
             fmt(" %.4f", cycle_mean[2]) + fmt(", mean change per cycle %.4f", sum_change / transitions) +
             fmt(", worst single-video step %.4f", worst_step));
}

}  // namespace

// An optional argument names a file that receives a copy of the report.
int main(int argc, char** argv) {
  const std::vector<std::function<void()>> checks{
      oracle_equivalence_and_rayleigh, init_invariance, matvec_exactness,
      projection_correctness,          object_recovery, eigengap,
      complexity_scaling,              self_loop,
  };
  for (const auto& check : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      say(std::string("error: ") + e.what());
      ++failures;
    }
  }
  say(std::to_string(failures) + " failing");
  if (argc > 1) std::ofstream(argv[1]) << transcript;
  return failures == 0 ? 0 : 1;
}
