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

#include "stgraph/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "stgraph/error.hpp"
#include "stgraph/flow_io.hpp"
#include "stgraph/ike_loop.hpp"
#include "stgraph/masks.hpp"
#include "stgraph/netpbm.hpp"
#include "stgraph/oracle.hpp"

namespace stgraph {

namespace fs = std::filesystem;

namespace {

// Bad invocation rather than a failed computation; maps to exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::kInvalidConfig, "invalid value '" + value + "' for " + key);
}

template <typename T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value);
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != value.size() || !std::isfinite(out)) bad_value(key, value);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  bad_value(key, value);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"p", [](RunConfig& c, auto& k, auto& v) { c.solver.p = parse_integer<int>(k, v); }},
      {"q", [](RunConfig& c, auto& k, auto& v) { c.solver.q = parse_integer<int>(k, v); }},
      {"sigma_t", [](RunConfig& c, auto& k, auto& v) { c.solver.sigma_t = parse_double(k, v); }},
      {"lambda",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "auto") {
           c.solver.lambda.reset();
         } else {
           c.solver.lambda = parse_double(k, v);
         }
       }},
      {"tol", [](RunConfig& c, auto& k, auto& v) { c.solver.tol = parse_double(k, v); }},
      {"max_iters",
       [](RunConfig& c, auto& k, auto& v) { c.solver.max_iters = parse_integer<int>(k, v); }},
      {"init",
       [](RunConfig& c, auto&, auto& v) { c.solver.init = parse_init_mode(v); }},
      {"seed",
       [](RunConfig& c, auto& k, auto& v) { c.solver.seed = parse_integer<std::uint64_t>(k, v); }},
      {"init_file", [](RunConfig& c, auto&, auto& v) { c.solver.init_file = v; }},
      {"standardize",
       [](RunConfig& c, auto& k, auto& v) { c.solver.standardize = parse_bool(k, v); }},
      {"bias", [](RunConfig& c, auto& k, auto& v) { c.solver.bias = parse_bool(k, v); }},
      {"threads",
       [](RunConfig& c, auto& k, auto& v) { c.solver.threads = parse_integer<std::size_t>(k, v); }},
      {"tau", [](RunConfig& c, auto& k, auto& v) { c.tau = parse_double(k, v); }},
      {"cycles", [](RunConfig& c, auto& k, auto& v) { c.cycles = parse_integer<int>(k, v); }},
      {"network_cmd", [](RunConfig& c, auto&, auto& v) { c.network_cmd = v; }},
      {"network_timeout",
       [](RunConfig& c, auto& k, auto& v) { c.network_timeout = parse_integer<int>(k, v); }},
      {"resume", [](RunConfig& c, auto& k, auto& v) { c.resume = parse_bool(k, v); }},
      {"dump_diagnostics", [](RunConfig& c, auto&, auto& v) { c.dump_diagnostics = v; }},
      {"frames", [](RunConfig& c, auto&, auto& v) { c.frames = v; }},
      {"flow", [](RunConfig& c, auto&, auto& v) { c.flow = v; }},
      {"out", [](RunConfig& c, auto&, auto& v) { c.out = v; }},
      {"gt", [](RunConfig& c, auto&, auto& v) { c.gt = v; }},
      {"pred", [](RunConfig& c, auto&, auto& v) { c.pred = v; }},
      {"corpus", [](RunConfig& c, auto&, auto& v) { c.corpus = v; }},
      {"k", [](RunConfig& c, auto& k, auto& v) { c.k = parse_integer<int>(k, v); }},
      {"perturb", [](RunConfig& c, auto& k, auto& v) { c.perturb = parse_double(k, v); }},
      {"q_list",
       [](RunConfig& c, auto& k, auto& v) {
         c.q_list.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) c.q_list.push_back(parse_integer<int>(k, item));
         if (c.q_list.empty()) bad_value(k, v);
       }},
      {"videos", [](RunConfig& c, auto& k, auto& v) { c.videos = parse_integer<int>(k, v); }},
      {"length", [](RunConfig& c, auto& k, auto& v) { c.m = parse_integer<int>(k, v); }},
      {"height", [](RunConfig& c, auto& k, auto& v) { c.h = parse_integer<int>(k, v); }},
      {"width", [](RunConfig& c, auto& k, auto& v) { c.w = parse_integer<int>(k, v); }},
      {"camera_motion",
       [](RunConfig& c, auto& k, auto& v) { c.camera_motion = parse_bool(k, v); }},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string flag_name(std::string key) {
  for (char& ch : key) {
    if (ch == '_') ch = '-';
  }
  return "--" + key;
}

// ---------------------------------------------------------------------------

void require_dir(const fs::path& dir, const char* flag) {
  if (dir.empty()) throw UsageError(std::string(flag) + " is required");
  if (!fs::is_directory(dir)) {
    throw UsageError(std::string(flag) + ": no such directory: " + dir.string());
  }
}

void require_set(const fs::path& p, const char* flag) {
  if (p.empty()) throw UsageError(std::string(flag) + " is required");
}

struct Loaded {
  VideoVolume video;
  FlowField flow;
  std::optional<GroundTruthMasks> gt;
};

Loaded load_video(const RunConfig& cfg) {
  require_dir(cfg.frames, "--frames");
  require_dir(cfg.flow, "--flow");
  if (!cfg.gt.empty()) require_dir(cfg.gt, "--gt");
  Loaded l;
  l.video = load_frames(cfg.frames);
  l.flow = load_flow(cfg.flow, l.video.dims);
  if (!cfg.gt.empty()) {
    l.gt = load_masks(cfg.gt);
    if (!(l.gt->dims == l.video.dims)) {
      throw Error(ErrorCode::kDimensionMismatch, "ground truth and frames differ in shape");
    }
  }
  return l;
}

IkeConfig ike_config(const RunConfig& cfg) {
  IkeConfig ike;
  ike.solver = cfg.solver;
  ike.tau = cfg.tau;
  ike.cycles = cfg.cycles;
  ike.workspace = cfg.out;
  ike.frames_dir = cfg.frames;
  ike.resume = cfg.resume;
  if (!cfg.network_cmd.empty()) {
    ike.network = NetworkInvocation{cfg.network_cmd, std::chrono::seconds(cfg.network_timeout)};
  }
  return ike;
}

int cmd_segment(const RunConfig& cfg, std::ostream& out) {
  cfg.solver.validate();
  require_set(cfg.out, "--out");
  if (!(cfg.tau >= 0.0 && cfg.tau <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "tau must be in [0, 1]");
  const Loaded l = load_video(cfg);

  FeatureMapSet maps(l.video.dims);
  maps.add(flow_features(l.flow));
  const GraphProblem problem = build_problem(l.flow, maps, cfg.solver);
  const SolveResult res = solve(problem.graph, problem.features, problem.cache, cfg.solver);
  const SegmentationMasks masks = to_masks(res.x, l.video.dims, cfg.tau);

  fs::create_directories(cfg.out);
  export_pseudo_labels(masks, cfg.out);
  if (!cfg.dump_diagnostics.empty()) write_diagnostics_csv(res.diagnostics, cfg.dump_diagnostics);

  out << "nodes " << l.video.dims.n() << " edges " << problem.graph.edge_count() << " features "
      << problem.features.cols() << " lambda " << problem.cache.lambda() << '\n';
  out << "iterations " << res.diagnostics.iterations_used << " converged "
      << (res.diagnostics.converged ? 1 : 0) << '\n';
  if (l.gt) {
    const MetricsReport report = evaluate(masks, *l.gt);
    write_metrics_csv(report, cfg.out / "metrics.csv");
    out << "jmean " << report.jmean << " mae " << report.mae << '\n';
  }
  return kExitOk;
}

int cmd_ike(const RunConfig& cfg, std::ostream& out) {
  require_set(cfg.out, "--out");
  const IkeConfig ike = ike_config(cfg);
  ike.validate();
  const Loaded l = load_video(cfg);
  const IkeResult res = run_ike(l.flow, ike, l.gt ? &*l.gt : nullptr);
  for (const CycleState& c : res.cycles) {
    out << "cycle " << c.cycle;
    if (!c.x.empty()) {
      out << " features " << c.feature_dim << " iterations " << c.diagnostics.iterations_used
          << " converged " << (c.diagnostics.converged ? 1 : 0);
    } else {
      out << " resumed";
    }
    if (c.metrics) out << " jmean " << c.metrics->jmean << " mae " << c.metrics->mae;
    out << '\n';
  }
  write_masks(res.final().masks, cfg.out / "final");
  return kExitOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  cfg.solver.validate();
  if (cfg.k < 1) throw Error(ErrorCode::kInvalidConfig, "k must be >= 1");
  if (cfg.perturb && !(*cfg.perturb >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "perturb must be >= 0");
  }

  FlowField flow;
  if (!cfg.frames.empty() || !cfg.flow.empty()) {
    flow = load_video(cfg).flow;
  } else {
    flow = synth_scene(random_scene_spec(cfg.m, cfg.h, cfg.w, cfg.solver.seed, cfg.camera_motion))
               .flow;
  }
  if (flow.dims.n() > oracle::kMaxDenseNodes) {
    throw UsageError("instance has " + std::to_string(flow.dims.n()) +
                     " nodes; the dense oracle handles at most " +
                     std::to_string(oracle::kMaxDenseNodes));
  }

  FeatureMapSet maps(flow.dims);
  maps.add(flow_features(flow));
  const GraphProblem problem = build_problem(flow, maps, cfg.solver);
  const SolveResult res = solve(problem.graph, problem.features, problem.cache, cfg.solver);

  const oracle::ExplicitGraph ex =
      oracle::build_explicit(problem.graph, problem.features, problem.cache.lambda());
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(ex.A.rows());
  const oracle::PowerResult dense =
      oracle::dense_power_iteration(ex.A, x0, cfg.solver.max_iters, cfg.solver.tol);
  const Eigen::Map<const Eigen::VectorXd> xi(res.x.data(), static_cast<Eigen::Index>(res.x.size()));
  const double cosine = std::abs(xi.dot(dense.vector)) / (xi.norm() * dense.vector.norm());

  const int k = std::min<int>(cfg.k, static_cast<int>(ex.A.rows()));
  const oracle::SpectrumReport spec = oracle::spectrum(ex.A, k);

  out.precision(12);
  out << "nodes " << flow.dims.n() << " features " << problem.features.cols() << " lambda "
      << problem.cache.lambda() << '\n';
  out << "implicit iterations " << res.diagnostics.iterations_used << " converged "
      << (res.diagnostics.converged ? 1 : 0) << '\n';
  out << "dense iterations " << dense.iterations << " converged " << (dense.converged ? 1 : 0)
      << '\n';
  out << "cosine " << cosine << '\n';
  for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
    out << "eigenvalue " << i + 1 << ' ' << spec.eigenvalues[i] << '\n';
  }
  out << "eigengap " << spec.eigengap() << " ratio " << spec.ratio() << '\n';

  if (cfg.perturb) {
    const double frob = *cfg.perturb * ex.A.norm();
    const Eigen::MatrixXd e = oracle::random_symmetric(ex.A.rows(), frob, cfg.solver.seed);
    const oracle::PerturbationReport pr = oracle::perturbation_bound(ex.A, e);
    const oracle::SpectrumReport moved = oracle::spectrum(ex.A + e, 1);
    const double angle = oracle::rotation_angle(spec.eigenvectors[0], moved.eigenvectors[0]);
    out << "perturbation e_frobenius " << pr.e_frobenius << " a_frobenius " << pr.a_frobenius
        << " epsilon " << pr.epsilon << " rotation " << angle << '\n';
  }

  if (!cfg.out.empty()) {
    fs::create_directories(cfg.out);
    oracle::dump_matrix(ex.A, cfg.out / "A.stgt");
    oracle::write_eigenvalues_csv(spec, cfg.out / "eigenvalues.csv");
  }
  return cosine >= 1.0 - 1e-6 ? kExitOk : kExitRuntime;
}

struct CorpusVideo {
  FlowField flow;
  GroundTruthMasks gt;
};

std::vector<CorpusVideo> load_corpus(const RunConfig& cfg) {
  std::vector<CorpusVideo> videos;
  if (!cfg.corpus.empty()) {
    require_dir(cfg.corpus, "--corpus");
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(cfg.corpus)) {
      if (entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const fs::path& d : dirs) {
      const VideoVolume video = load_frames(d / "frames");
      CorpusVideo v{load_flow(d / "flow", video.dims), load_masks(d / "gt")};
      if (!(v.gt.dims == video.dims)) {
        throw Error(ErrorCode::kDimensionMismatch, d.string() + ": ground truth shape differs");
      }
      videos.push_back(std::move(v));
    }
  } else {
    for (int i = 0; i < cfg.videos; ++i) {
      SynthScene s = synth_scene(
          random_scene_spec(cfg.m, cfg.h, cfg.w, cfg.solver.seed + i, cfg.camera_motion));
      videos.push_back({std::move(s.flow), std::move(s.gt)});
    }
  }
  if (videos.empty()) throw UsageError("empty corpus");
  return videos;
}

int cmd_sweep_q(const RunConfig& cfg, std::ostream& out) {
  cfg.solver.validate();
  for (int q : cfg.q_list) {
    if (q < 0) throw Error(ErrorCode::kInvalidConfig, "q values must be >= 0");
  }
  const std::vector<CorpusVideo> videos = load_corpus(cfg);

  std::ostringstream csv;
  csv.precision(10);
  csv << "q,jmean\n";
  for (int q : cfg.q_list) {
    SolverConfig sc = cfg.solver;
    sc.q = q;
    double sum = 0.0;
    for (const CorpusVideo& v : videos) {
      FeatureMapSet maps(v.flow.dims);
      maps.add(flow_features(v.flow));
      const GraphProblem problem = build_problem(v.flow, maps, sc);
      const SolveResult res = solve(problem.graph, problem.features, problem.cache, sc);
      sum += evaluate(to_masks(res.x, v.flow.dims, cfg.tau), v.gt).jmean;
    }
    csv << q << ',' << sum / static_cast<double>(videos.size()) << '\n';
  }
  out << csv.str();
  if (!cfg.out.empty()) {
    if (cfg.out.has_parent_path()) fs::create_directories(cfg.out.parent_path());
    std::ofstream f(cfg.out);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + cfg.out.string());
    f << csv.str();
  }
  return kExitOk;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  require_set(cfg.out, "--out");
  if (cfg.videos < 1) throw Error(ErrorCode::kInvalidConfig, "videos must be >= 1");
  for (int i = 0; i < cfg.videos; ++i) {
    const SynthSceneSpec spec =
        random_scene_spec(cfg.m, cfg.h, cfg.w, cfg.solver.seed + i, cfg.camera_motion);
    char name[32];
    std::snprintf(name, sizeof(name), "video_%03d", i);
    const fs::path dir = cfg.out / name;
    save_scene(synth_scene(spec), dir);
    out << dir.string() << " object (" << spec.object_velocity.dx << ',' << spec.object_velocity.dy
        << ") background (" << spec.background_velocity.dx << ','
        << spec.background_velocity.dy << ")\n";
  }
  return kExitOk;
}

// PGM stack from dir, preferring files named <prefix>*.pgm when any exist.
std::pair<VideoDims, std::vector<std::uint8_t>> read_pgm_stack(const fs::path& dir,
                                                               const std::string& prefix) {
  auto files = list_files(dir, prefix, ".pgm");
  if (files.empty()) files = list_files(dir, "", ".pgm");
  if (files.empty()) throw Error(ErrorCode::kIo, "no .pgm files in " + dir.string());
  VideoDims dims;
  std::vector<std::uint8_t> data;
  for (std::size_t t = 0; t < files.size(); ++t) {
    const Image8 img = read_netpbm(files[t]);
    if (img.channels != 1) throw Error(ErrorCode::kBadMagic, files[t].string() + " is not P5");
    if (t == 0) {
      dims = VideoDims{static_cast<int>(files.size()), img.h, img.w};
    } else if (img.h != dims.h || img.w != dims.w) {
      throw Error(ErrorCode::kShapeMismatch, files[t].string() + " differs in size from the first");
    }
    data.insert(data.end(), img.data.begin(), img.data.end());
  }
  return {dims, std::move(data)};
}

int cmd_metrics(const RunConfig& cfg, std::ostream& out) {
  require_dir(cfg.pred, "--pred");
  require_dir(cfg.gt, "--gt");
  const auto [gdims, graw] = read_pgm_stack(cfg.gt, "gt_");
  const auto [pdims, praw] = read_pgm_stack(cfg.pred, "mask_");
  if (!(gdims == pdims)) {
    throw Error(ErrorCode::kDimensionMismatch, "prediction and ground truth stacks differ in shape");
  }
  GroundTruthMasks gt;
  gt.dims = gdims;
  for (std::uint8_t b : graw) gt.labels.push_back(b > 127 ? 1 : 0);

  SegmentationMasks masks;
  masks.dims = pdims;
  for (std::uint8_t b : praw) masks.binary.push_back(b > 127 ? 1 : 0);
  // Soft maps, when written next to the binary masks, drive the MAE.
  if (!list_files(cfg.pred, "soft_", ".pgm").empty()) {
    const auto [sdims, sraw] = read_pgm_stack(cfg.pred, "soft_");
    if (!(sdims == pdims)) throw Error(ErrorCode::kDimensionMismatch, "soft and binary masks differ");
    for (std::uint8_t b : sraw) masks.soft.push_back(b / 255.0);
  } else {
    for (std::uint8_t b : praw) masks.soft.push_back(b / 255.0);
  }

  const MetricsReport report = evaluate(masks, gt);
  out.precision(10);
  out << "jmean " << report.jmean << " mae " << report.mae << '\n';
  if (!cfg.out.empty()) {
    if (cfg.out.has_parent_path()) fs::create_directories(cfg.out.parent_path());
    write_metrics_csv(report, cfg.out);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

const std::vector<std::string> kSolverKeys = {"p",    "q",    "sigma_t",   "lambda",
                                              "tol",  "max_iters", "init",  "seed",
                                              "init_file", "standardize", "bias", "threads"};
const std::vector<std::string> kBoolKeys = {"standardize", "bias", "resume", "camera_motion"};

struct Command {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> raw;
  std::map<std::string, bool> flags;
  std::map<std::string, CLI::Option*> options;
  std::string config_file;
  std::function<void(RunConfig&)> defaults;
  std::function<int(const RunConfig&, std::ostream&)> run;
};

void add_keys(Command& cmd, const std::vector<std::string>& keys) {
  for (const std::string& key : keys) {
    const bool is_bool =
        std::find(kBoolKeys.begin(), kBoolKeys.end(), key) != kBoolKeys.end();
    if (is_bool) {
      cmd.options[key] = cmd.app->add_flag(flag_name(key), cmd.flags[key]);
    } else {
      cmd.options[key] = cmd.app->add_option(flag_name(key), cmd.raw[key]);
    }
  }
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidSpec:
    case ErrorCode::kNonPositiveBandwidth:
    case ErrorCode::kObjectLeavesFrame:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

}  // namespace

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw Error(ErrorCode::kInvalidConfig, "unknown key '" + key + "'");
  it->second(config, key, value);
}

void load_config_file(RunConfig& config, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot read config file " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidConfig,
                  path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Space-time graph video object segmentation"};
  app.require_subcommand(1);

  std::vector<std::unique_ptr<Command>> commands;
  auto make = [&](const char* name, const char* help, const std::vector<std::string>& keys,
                  std::function<int(const RunConfig&, std::ostream&)> run,
                  std::function<void(RunConfig&)> defaults = {}) {
    auto cmd = std::make_unique<Command>();
    cmd->app = app.add_subcommand(name, help);
    cmd->app->add_option("--config", cmd->config_file, "key = value file; flags override it");
    add_keys(*cmd, keys);
    cmd->run = std::move(run);
    cmd->defaults = std::move(defaults);
    commands.push_back(std::move(cmd));
  };

  const auto segment_keys =
      concat(kSolverKeys, {"frames", "flow", "out", "gt", "tau", "dump_diagnostics"});
  make("segment", "Segment one video with the graph solver", segment_keys, cmd_segment);
  make("ike", "Run teacher/student cycles",
       concat(segment_keys, {"cycles", "network_cmd", "network_timeout", "resume"}), cmd_ike);
  make("oracle", "Check the implicit solver against the dense matrices",
       concat(kSolverKeys, {"frames", "flow", "out", "k", "perturb", "length", "height", "width",
                            "camera_motion"}),
       cmd_oracle, [](RunConfig& c) {
         c.m = 5;
         c.h = 16;
         c.w = 16;
         c.camera_motion = true;
         c.solver.max_iters = 1000;
         c.solver.tol = 1e-10;
         // With a ridge term P is no longer a projection and the implicit loop
         // targets P M instead of P M P; the equivalence is exact at zero.
         c.solver.lambda = 0.0;
       });
  make("sweep-q", "J Mean across feature half-windows",
       concat(kSolverKeys,
              {"corpus", "videos", "q_list", "tau", "out", "length", "height", "width", "camera_motion"}),
       cmd_sweep_q, [](RunConfig& c) { c.videos = 10; });
  make("synth", "Write synthetic videos with flow and ground truth",
       {"out", "videos", "length", "height", "width", "seed", "camera_motion"}, cmd_synth);
  make("metrics", "J Mean and MAE of PGM masks against ground truth", {"pred", "gt", "out"},
       cmd_metrics);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (auto& cmd : commands) {
    if (!cmd->app->parsed()) continue;
    try {
      RunConfig cfg;
      if (cmd->defaults) cmd->defaults(cfg);
      if (!cmd->config_file.empty()) load_config_file(cfg, cmd->config_file);
      for (const auto& [key, opt] : cmd->options) {
        if (opt->count() == 0) continue;
        const auto f = cmd->flags.find(key);
        apply_setting(cfg, key, f != cmd->flags.end() ? (f->second ? "true" : "false")
                                                      : cmd->raw[key]);
      }
      return cmd->run(cfg, out);
    } catch (const UsageError& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return exit_code_for(e.code());
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitRuntime;
    }
  }
  return kExitUsage;
}

}  // namespace stgraph
