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

#include "stgraph/ike_loop.hpp"

#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <thread>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "stgraph/error.hpp"
#include "stgraph/netpbm.hpp"
#include "stgraph/tensor_file.hpp"

namespace stgraph {

namespace fs = std::filesystem;

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') {
      out += "'\\''";
    } else {
      out += ch;
    }
  }
  return out + "'";
}

std::string frame_name(const std::string& prefix, int t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04d.stgt", prefix.c_str(), t);
  return buf;
}

fs::path cycle_dir(const fs::path& workspace, int c) {
  return workspace / ("cycle_" + std::to_string(c));
}

void touch(const fs::path& path) {
  write_file_atomic(path, std::vector<char>{'o', 'k', '\n'});
}

SegmentationMasks masks_from_labels(const std::vector<double>& labels, const VideoDims& dims,
                                    double tau) {
  SegmentationMasks m;
  m.dims = dims;
  m.tau = tau;
  m.soft = labels;
  m.binary.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) m.binary[i] = labels[i] >= tau ? 1 : 0;
  return m;
}

}  // namespace

std::string expand_command(const std::string& tmpl, const fs::path& frames_dir,
                           const fs::path& labels_dir, const fs::path& out_dir) {
  const std::pair<std::string, std::string> subs[] = {
      {"{frames_dir}", shell_quote(frames_dir.string())},
      {"{labels_dir}", shell_quote(labels_dir.string())},
      {"{out_dir}", shell_quote(out_dir.string())},
  };
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    bool hit = false;
    for (const auto& [key, value] : subs) {
      if (tmpl.compare(i, key.size(), key) == 0) {
        out += value;
        i += key.size();
        hit = true;
        break;
      }
    }
    if (!hit) out += tmpl[i++];
  }
  return out;
}

void run_network(const NetworkInvocation& net, const fs::path& frames_dir,
                 const fs::path& labels_dir, const fs::path& out_dir) {
  const std::string cmd = expand_command(net.command, frames_dir, labels_dir, out_dir);
  const pid_t pid = fork();
  if (pid < 0) throw Error(ErrorCode::kNetworkFailed, "fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);

  const auto deadline = std::chrono::steady_clock::now() + net.timeout;
  int status = 0;
  for (;;) {
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0) throw Error(ErrorCode::kNetworkFailed, "waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      waitpid(pid, &status, 0);
      throw Error(ErrorCode::kNetworkFailed,
                  "network command timed out after " + std::to_string(net.timeout.count()) + " s");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  if (WIFSIGNALED(status)) {
    throw Error(ErrorCode::kNetworkFailed,
                "network command killed by signal " + std::to_string(WTERMSIG(status)));
  }
  if (WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::kNetworkFailed,
                "network command exited with status " + std::to_string(WEXITSTATUS(status)));
  }
}

void IkeConfig::validate() const {
  solver.validate();
  if (cycles < 1) throw Error(ErrorCode::kInvalidConfig, "cycles must be >= 1");
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "tau must be in [0, 1]");
  if (workspace.empty()) throw Error(ErrorCode::kInvalidConfig, "workspace directory not set");
  if (network) {
    if (network->command.empty()) throw Error(ErrorCode::kInvalidConfig, "empty network command");
    if (network->timeout.count() <= 0) {
      throw Error(ErrorCode::kInvalidConfig, "network timeout must be positive");
    }
  }
}

void write_planes(std::span<const double> values, const VideoDims& dims, const fs::path& dir,
                  const std::string& prefix) {
  if (values.size() != dims.n()) {
    throw Error(ErrorCode::kDimensionMismatch, "plane data does not match m*h*w");
  }
  fs::create_directories(dir);
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(dims.h), static_cast<std::uint32_t>(dims.w)};
  t.values.resize(dims.frame_size());
  for (int f = 0; f < dims.m; ++f) {
    const std::size_t off = static_cast<std::size_t>(f) * dims.frame_size();
    for (std::size_t i = 0; i < dims.frame_size(); ++i) {
      t.values[i] = static_cast<float>(values[off + i]);
    }
    write_tensor(dir / frame_name(prefix, f), t);
  }
}

std::vector<double> read_planes(const VideoDims& dims, const fs::path& dir,
                                const std::string& prefix) {
  std::vector<double> out(dims.n());
  for (int f = 0; f < dims.m; ++f) {
    const fs::path path = dir / frame_name(prefix, f);
    if (!fs::exists(path)) throw Error(ErrorCode::kIo, "missing " + path.string());
    const Tensor t = read_tensor(path);
    if (t.dims.size() != 2 || t.dims[0] != static_cast<std::uint32_t>(dims.h) ||
        t.dims[1] != static_cast<std::uint32_t>(dims.w)) {
      std::string shape;
      for (std::size_t i = 0; i < t.dims.size(); ++i) {
        shape += (i ? "," : "") + std::to_string(t.dims[i]);
      }
      throw Error(ErrorCode::kShapeMismatch, "frame " + std::to_string(f) + " (" +
                                                 path.filename().string() + ") has shape (" +
                                                 shape + "), expected (" + std::to_string(dims.h) +
                                                 "," + std::to_string(dims.w) + ")");
    }
    const std::size_t off = static_cast<std::size_t>(f) * dims.frame_size();
    for (std::size_t i = 0; i < t.values.size(); ++i) {
      if (!std::isfinite(t.values[i])) {
        throw Error(ErrorCode::kNonFinite, "non-finite value in " + path.string());
      }
      out[off + i] = t.values[i];
    }
  }
  return out;
}

std::vector<double> export_pseudo_labels(const SegmentationMasks& masks, const fs::path& dir) {
  write_planes(masks.soft, masks.dims, dir, "x");
  write_masks(masks, dir / "masks");
  // Hand back what a reader of the files will see.
  std::vector<double> stored(masks.soft.size());
  for (std::size_t i = 0; i < stored.size(); ++i) {
    stored[i] = static_cast<float>(masks.soft[i]);
  }
  return stored;
}

std::vector<double> import_predictions(const VideoDims& dims, const fs::path& dir) {
  return read_planes(dims, dir, "s");
}

CycleState run_cycle(int c, const CycleState* prev, const FlowField& flow,
                     const IkeConfig& config, const GroundTruthMasks* gt) {
  if (c < 1) throw Error(ErrorCode::kInvalidConfig, "cycle index starts at 1");
  if ((c == 1) != (prev == nullptr)) {
    throw Error(ErrorCode::kInvalidConfig, "cycle > 1 needs the previous cycle's state");
  }
  const VideoDims& dims = flow.dims;

  FeatureMapSet maps(dims);
  maps.add(flow_features(flow));
  if (prev) {
    maps.add(scalar_features("x", prev->labels));
    if (prev->predictions) maps.add(scalar_features("s", *prev->predictions));
  }

  CycleState state;
  state.cycle = c;
  state.dir = cycle_dir(config.workspace, c);
  fs::create_directories(state.dir);

  GraphProblem problem = build_problem(flow, maps, config.solver);
  state.feature_dim = problem.features.cols();
  SolveResult res = solve(problem.graph, problem.features, problem.cache, config.solver);
  state.x = std::move(res.x);
  state.diagnostics = std::move(res.diagnostics);
  state.masks = to_masks(state.x, dims, config.tau);
  state.labels = export_pseudo_labels(state.masks, state.dir);
  if (gt) {
    state.metrics = evaluate(state.masks, *gt);
    write_metrics_csv(*state.metrics, state.dir / "metrics.csv");
  }
  write_diagnostics_csv(state.diagnostics, state.dir / "diagnostics.csv");
  touch(state.dir / "graph.done");
  return state;
}

namespace {

// Rebuilds a finished cycle from its files. The raw x is not stored, so the
// reloaded state carries the pseudo-labels and masks only.
std::optional<CycleState> load_cycle(int c, const VideoDims& dims, const IkeConfig& config,
                                     const GroundTruthMasks* gt) {
  CycleState state;
  state.cycle = c;
  state.dir = cycle_dir(config.workspace, c);
  if (!fs::exists(state.dir / "graph.done")) return std::nullopt;
  state.labels = read_planes(dims, state.dir, "x");
  state.masks = masks_from_labels(state.labels, dims, config.tau);
  if (gt) state.metrics = evaluate(state.masks, *gt);
  if (fs::exists(state.dir / "network.done")) state.predictions = import_predictions(dims, state.dir);
  return state;
}

void invoke_network(CycleState& state, const IkeConfig& config, const VideoDims& dims) {
  const fs::path out = state.dir;
  try {
    run_network(*config.network, config.frames_dir, state.dir, out);
    state.predictions = import_predictions(dims, out);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNetworkFailed) throw;
    throw Error(ErrorCode::kNetworkFailed,
                "cycle " + std::to_string(state.cycle) + ": malformed network output: " + e.what());
  }
  touch(state.dir / "network.done");
}

}  // namespace

IkeResult run_ike(const FlowField& flow, const IkeConfig& config, const GroundTruthMasks* gt) {
  config.validate();
  if (gt && !(gt->dims == flow.dims)) {
    throw Error(ErrorCode::kDimensionMismatch, "ground truth does not match the flow field");
  }
  fs::create_directories(config.workspace);

  IkeResult result;
  for (int c = 1; c <= config.cycles; ++c) {
    const CycleState* prev = result.cycles.empty() ? nullptr : &result.cycles.back();
    std::optional<CycleState> loaded;
    if (config.resume) loaded = load_cycle(c, flow.dims, config, gt);
    CycleState state = loaded ? std::move(*loaded) : run_cycle(c, prev, flow, config, gt);

    const bool wants_network = config.network && c < config.cycles;
    if (wants_network && !state.predictions) invoke_network(state, config, flow.dims);
    if (!config.network) state.predictions.reset();
    result.cycles.push_back(std::move(state));
  }
  return result;
}

}  // namespace stgraph
