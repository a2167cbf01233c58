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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stgraph/solver.hpp"

namespace stgraph {

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Everything a subcommand can be configured with. Filled from an optional
/// `key = value` file first, then from flags, through the same setters.
struct RunConfig {
  SolverConfig solver;
  std::filesystem::path frames, flow, out, gt, pred, corpus;
  std::filesystem::path dump_diagnostics;
  double tau = 0.5;
  int cycles = 3;
  std::string network_cmd;
  int network_timeout = 600;
  bool resume = false;
  int k = 6;
  std::optional<double> perturb;
  std::vector<int> q_list{0, 1, 2};
  int videos = 1;
  int m = 10, h = 48, w = 64;
  bool camera_motion = false;
};

/// Applies one key/value pair. Throws InvalidConfig for unknown keys and
/// malformed values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Reads `key = value` lines; `#` starts a comment, blank lines are skipped.
void load_config_file(RunConfig& config, const std::filesystem::path& path);

/// Entry point of the `stgraph` binary.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stgraph
