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

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "stgraph/cli.hpp"
#include "stgraph/error.hpp"
#include "stgraph/ike_loop.hpp"
#include "stgraph/tensor_file.hpp"

namespace stgraph {
namespace {

using namespace stgraph::testing;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "stgraph");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Synthesizes one small static-background video into dir/video_000.
std::filesystem::path synth_one(const TempDir& dir, int m = 6) {
  const CliRun r = run({"synth", "--out", (dir / "syn").string(), "--length", std::to_string(m),
                     "--height", "24", "--width", "32", "--seed", "1000"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  return dir / "syn" / "video_000";
}

std::string value_after(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  for (std::string tok; in >> tok;) {
    if (tok == key) {
      std::string v;
      in >> v;
      return v;
    }
  }
  return {};
}

TEST(Settings, ParsesAndRejects) {
  RunConfig cfg;
  apply_setting(cfg, "q", "2");
  apply_setting(cfg, "lambda", "0.5");
  apply_setting(cfg, "init", "gaussian");
  apply_setting(cfg, "q_list", "0,3,5");
  apply_setting(cfg, "camera_motion", "true");
  EXPECT_EQ(cfg.solver.q, 2);
  EXPECT_EQ(cfg.solver.lambda, 0.5);
  EXPECT_EQ(cfg.solver.init, InitMode::kGaussianPrior);
  EXPECT_EQ(cfg.q_list, (std::vector<int>{0, 3, 5}));
  EXPECT_TRUE(cfg.camera_motion);
  apply_setting(cfg, "lambda", "auto");
  EXPECT_FALSE(cfg.solver.lambda);
  EXPECT_THROW(apply_setting(cfg, "bogus", "1"), Error);
  EXPECT_THROW(apply_setting(cfg, "q", "two"), Error);
  EXPECT_THROW(apply_setting(cfg, "tol", "1e-3x"), Error);
}

TEST(Settings, ConfigFile) {
  TempDir dir("cfg");
  {
    std::ofstream f(dir / "a.conf");
    f << "# solver\np = 3\n\nsigma_t = 1.5   # frames\n";
  }
  RunConfig cfg;
  load_config_file(cfg, dir / "a.conf");
  EXPECT_EQ(cfg.solver.p, 3);
  EXPECT_EQ(cfg.solver.sigma_t, 1.5);
  {
    std::ofstream f(dir / "b.conf");
    f << "p 3\n";
  }
  EXPECT_THROW(load_config_file(cfg, dir / "b.conf"), Error);
  EXPECT_THROW(load_config_file(cfg, dir / "missing.conf"), Error);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"segment", "--no-such-flag"}).code, kExitUsage);
  TempDir dir("cli");
  const CliRun r = run({"segment", "--frames", (dir / "nope").string(), "--flow",
                     (dir / "nope").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("--frames"), std::string::npos);
  EXPECT_EQ(run({"segment", "--p", "0"}).code, kExitUsage);
  EXPECT_EQ(run({"oracle", "--q", "-1"}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, SegmentWritesOutputs) {
  TempDir dir("cli");
  const auto video = synth_one(dir);
  const auto out = dir / "seg";
  const CliRun r = run({"segment", "--frames", (video / "frames").string(), "--flow",
                     (video / "flow").string(), "--gt", (video / "gt").string(), "--out",
                     out.string(), "--dump-diagnostics", (dir / "diag.csv").string(),
                     "--max-iters", "5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(std::filesystem::exists(out / "x_0005.stgt"));
  EXPECT_TRUE(std::filesystem::exists(out / "masks" / "mask_0000.pgm"));
  EXPECT_TRUE(std::filesystem::exists(out / "metrics.csv"));
  EXPECT_GE(std::stod(value_after(r.out, "jmean")), 0.85);

  std::ifstream in(dir / "diag.csv");
  int rows = -1;
  for (std::string line; std::getline(in, line);) rows += !line.empty();
  EXPECT_GE(rows, 1);
  EXPECT_LE(rows, 5);
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  TempDir dir("cli");
  const auto video = synth_one(dir);
  {
    std::ofstream f(dir / "run.conf");
    f << "max_iters = 1\ntol = 1e-300\n";
  }
  const std::vector<std::string> base{"segment", "--frames", (video / "frames").string(),
                                      "--flow",  (video / "flow").string(),
                                      "--out",   (dir / "o").string(),
                                      "--config", (dir / "run.conf").string()};
  const CliRun from_file = run(base);
  ASSERT_EQ(from_file.code, kExitOk) << from_file.err;
  EXPECT_EQ(value_after(from_file.out, "iterations"), "1");
  auto with_flag = base;
  with_flag.insert(with_flag.end(), {"--max-iters", "3"});
  const CliRun overridden = run(with_flag);
  ASSERT_EQ(overridden.code, kExitOk) << overridden.err;
  EXPECT_EQ(value_after(overridden.out, "iterations"), "3");

  {
    std::ofstream f(dir / "bad.conf");
    f << "colour = blue\n";
  }
  auto bad = base;
  bad.back() = (dir / "bad.conf").string();
  EXPECT_EQ(run(bad).code, kExitUsage);
}

TEST(Cli, SingleCycleIkeMatchesSegment) {
  TempDir dir("cli");
  const auto video = synth_one(dir);
  const std::vector<std::string> io{"--frames", (video / "frames").string(), "--flow",
                                    (video / "flow").string()};
  auto seg = std::vector<std::string>{"segment"};
  seg.insert(seg.end(), io.begin(), io.end());
  seg.insert(seg.end(), {"--out", (dir / "seg").string()});
  auto ike = std::vector<std::string>{"ike", "--cycles", "1"};
  ike.insert(ike.end(), io.begin(), io.end());
  ike.insert(ike.end(), {"--out", (dir / "ike").string()});
  ASSERT_EQ(run(seg).code, kExitOk);
  const CliRun r = run(ike);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const VideoDims d{6, 24, 32};
  EXPECT_EQ(read_planes(d, dir / "seg", "x"), read_planes(d, dir / "ike" / "cycle_1", "x"));
}

TEST(Cli, IkeWithNetworkAndFailure) {
  TempDir dir("cli");
  const auto video = synth_one(dir);
  const std::string echo = std::string("'") + STGRAPH_ECHO_NETWORK + "' ";
  std::vector<std::string> args{"ike",    "--frames", (video / "frames").string(),
                                "--flow", (video / "flow").string(),
                                "--gt",   (video / "gt").string(),
                                "--out",  (dir / "w").string(),
                                "--network-cmd", echo + "copy {labels_dir} {out_dir}"};
  const CliRun ok = run(args);
  ASSERT_EQ(ok.code, kExitOk) << ok.err;
  EXPECT_NE(ok.out.find("cycle 3"), std::string::npos);

  args[8] = (dir / "w2").string();
  args[10] = echo + "fail {labels_dir} {out_dir}";
  const CliRun bad = run(args);
  EXPECT_EQ(bad.code, kExitRuntime);
  EXPECT_NE(bad.err.find("NetworkFailed"), std::string::npos) << bad.err;
}

TEST(Cli, MetricsOnIdenticalMasks) {
  TempDir dir("cli");
  const auto video = synth_one(dir);
  const CliRun r = run({"metrics", "--pred", (video / "gt").string(), "--gt", (video / "gt").string(),
                     "--out", (dir / "m.csv").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(std::stod(value_after(r.out, "jmean")), 1.0);
  EXPECT_EQ(std::stod(value_after(r.out, "mae")), 0.0);
  EXPECT_TRUE(std::filesystem::exists(dir / "m.csv"));
}

TEST(Cli, OracleAgreesAndDumps) {
  TempDir dir("cli");
  const CliRun r = run({"oracle", "--seed", "3", "--k", "3", "--out", (dir / "o").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_GE(std::stod(value_after(r.out, "cosine")), 1 - 1e-6);
  const Tensor a = read_tensor(dir / "o" / "A.stgt");
  EXPECT_EQ(a.dims, (std::vector<std::uint32_t>{1280, 1280}));
  EXPECT_TRUE(std::filesystem::exists(dir / "o" / "eigenvalues.csv"));
}

TEST(Cli, SweepQ) {
  TempDir dir("cli");
  const CliRun r = run({"sweep-q", "--videos", "2", "--length", "6", "--height", "24", "--width",
                     "32", "--q-list", "0,1,2", "--out", (dir / "s.csv").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "q,jmean");
  int rows = 0;
  while (std::getline(in, line)) {
    const double j = std::stod(line.substr(line.find(',') + 1));
    EXPECT_GE(j, 0.0);
    EXPECT_LE(j, 1.0);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
  EXPECT_TRUE(std::filesystem::exists(dir / "s.csv"));

  std::filesystem::create_directories(dir / "empty");
  const CliRun empty = run({"sweep-q", "--corpus", (dir / "empty").string()});
  EXPECT_EQ(empty.code, kExitUsage);
  EXPECT_NE(empty.err.find("empty corpus"), std::string::npos);
}

// Longer feature chains should not hurt on scenes with a static background and
// one object in uniform motion. Chains clamp at the frame border but are not
// cut at occlusions, so pixels the object is about to cover or has just
// uncovered collect both object and background flow once q >= 1.
TEST(Cli, SweepLongerChainsDoNotHurtStaticScenes) {
  const CliRun r = run({"sweep-q", "--q-list", "0,1,2,3", "--seed", "1000"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  std::vector<double> j;
  while (std::getline(in, line)) j.push_back(std::stod(line.substr(line.find(',') + 1)));
  ASSERT_EQ(j.size(), 4u);
  for (std::size_t i = 1; i < j.size(); ++i) {
    EXPECT_GE(j[i], j[i - 1] - 0.02) << "q " << i - 1 << " -> " << i << "\n" << r.out;
  }
}

}  // namespace
}  // namespace stgraph
