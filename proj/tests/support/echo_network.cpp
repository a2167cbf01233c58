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

// Stand-in for the external network used by the IKE tests.
//
//   echo_network MODE LABELS_DIR OUT_DIR [LOG]
//
// copy     writes s_NNNN.stgt equal to each x_NNNN.stgt
// fail     exits with status 3
// sleep    sleeps for a minute
// badshape writes s planes one row taller than the labels
// LOG, when given, gets one line appended per invocation.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "stgraph/tensor_file.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  if (argc < 4) {
    std::cerr << "usage: echo_network MODE LABELS_DIR OUT_DIR [LOG]\n";
    return 2;
  }
  const std::string mode = argv[1];
  const fs::path labels = argv[2];
  const fs::path out = argv[3];
  if (argc > 4) std::ofstream(argv[4], std::ios::app) << mode << '\n';

  if (mode == "fail") return 3;
  if (mode == "sleep") {
    std::this_thread::sleep_for(std::chrono::seconds(60));
    return 0;
  }
  fs::create_directories(out);
  char name[32];
  for (int t = 0;; ++t) {
    std::snprintf(name, sizeof(name), "x_%04d.stgt", t);
    if (!fs::exists(labels / name)) break;
    stgraph::Tensor x = stgraph::read_tensor(labels / name);
    if (mode == "badshape") {
      x.dims[0] += 1;
      x.values.resize(x.element_count(), 0.0f);
    }
    std::snprintf(name, sizeof(name), "s_%04d.stgt", t);
    stgraph::write_tensor(out / name, x);
  }
  return 0;
}
