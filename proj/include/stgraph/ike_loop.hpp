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

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stgraph/flow_io.hpp"
#include "stgraph/masks.hpp"
#include "stgraph/solver.hpp"

namespace stgraph {

// Outer teacher/student cycles. Each cycle solves the graph, exports its soft
// masks as pseudo-labels, optionally hands them to an external network
// process, and feeds both back as per-pixel features for the next cycle.
//
// Workspace, one directory per video:
//   cycle_<c>/x_%04d.stgt   graph soft masks, shape (h, w)
//   cycle_<c>/s_%04d.stgt   network predictions, shape (h, w)
//   cycle_<c>/masks/        PGM previews
//   cycle_<c>/metrics.csv   when ground truth was supplied
//   cycle_<c>/graph.done, cycle_<c>/network.done   checkpoint markers

/// External network process. The command runs under /bin/sh with
/// {frames_dir}, {labels_dir} and {out_dir} replaced by quoted paths and must
/// leave s_%04d.stgt files of shape (h, w) in out_dir.
struct NetworkInvocation {
  std::string command;
  std::chrono::seconds timeout{600};
};

/// Replaces each placeholder with a single-quoted path.
std::string expand_command(const std::string& tmpl, const std::filesystem::path& frames_dir,
                           const std::filesystem::path& labels_dir,
                           const std::filesystem::path& out_dir);

/// Runs the command and waits. Throws NetworkFailed on a nonzero exit, a
/// signal, or when the timeout expires (the process group is killed).
void run_network(const NetworkInvocation& net, const std::filesystem::path& frames_dir,
                 const std::filesystem::path& labels_dir, const std::filesystem::path& out_dir);

struct CycleState {
  int cycle = 0;
  std::filesystem::path dir;
  std::vector<double> x;   // graph output for this cycle (raw, unit norm)
  SegmentationMasks masks;
  // Pseudo-labels as they were written to disk (float32 soft masks), which is
  // exactly what the next cycle reads as its x feature.
  std::vector<double> labels;
  std::optional<std::vector<double>> predictions;  // s#c
  std::optional<MetricsReport> metrics;
  SolveDiagnostics diagnostics;
  std::size_t feature_dim = 0;
};

struct IkeConfig {
  SolverConfig solver;
  double tau = 0.5;
  int cycles = 3;
  std::optional<NetworkInvocation> network;
  std::filesystem::path workspace;   // work/<video>
  std::filesystem::path frames_dir;  // passed to the network as {frames_dir}
  bool resume = false;

  void validate() const;
};

/// Per-frame soft planes as `<prefix>_%04d.stgt` (h, w) files.
void write_planes(std::span<const double> values, const VideoDims& dims,
                  const std::filesystem::path& dir, const std::string& prefix);
/// Throws ShapeMismatch naming the frame when a file is not (h, w), Io when
/// one is missing, NonFinite on NaN or infinity.
std::vector<double> read_planes(const VideoDims& dims, const std::filesystem::path& dir,
                                const std::string& prefix);

/// Writes x_%04d.stgt and PGM previews into dir; returns the values as stored.
std::vector<double> export_pseudo_labels(const SegmentationMasks& masks,
                                         const std::filesystem::path& dir);
/// s_%04d.stgt from dir.
std::vector<double> import_predictions(const VideoDims& dims, const std::filesystem::path& dir);

/// Cycle `c` given the previous cycle's state (absent for c = 1). Cycle 1 uses
/// flow features only; later cycles add the previous pseudo-labels and, when
/// present, the previous network predictions. Results are written to
/// workspace/cycle_<c>. Ground truth, when given, is scored into metrics.
CycleState run_cycle(int c, const CycleState* prev, const FlowField& flow, const IkeConfig& config,
                     const GroundTruthMasks* gt = nullptr);

struct IkeResult {
  std::vector<CycleState> cycles;
  const CycleState& final() const { return cycles.back(); }
};

/// Runs config.cycles cycles. After every cycle but the last the network, if
/// configured, is invoked on that cycle's pseudo-labels. With resume set,
/// cycles whose checkpoint markers exist are reloaded instead of recomputed.
IkeResult run_ike(const FlowField& flow, const IkeConfig& config,
                  const GroundTruthMasks* gt = nullptr);

}  // namespace stgraph
