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

#include "stgraph/masks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "stgraph/error.hpp"
#include "stgraph/netpbm.hpp"

namespace stgraph {

namespace {

void require_same(std::size_t got, const GroundTruthMasks& gt) {
  if (got != gt.dims.n() || gt.labels.size() != gt.dims.n()) {
    throw Error(ErrorCode::kDimensionMismatch, "prediction has " + std::to_string(got) +
                                                   " pixels, ground truth has " +
                                                   std::to_string(gt.labels.size()));
  }
}

std::vector<FrameScore> score_frames(std::span<const std::uint8_t> pred,
                                     std::span<const double> soft, const GroundTruthMasks& gt) {
  const VideoDims& d = gt.dims;
  std::vector<FrameScore> frames(d.m);
  for (int t = 0; t < d.m; ++t) {
    std::size_t inter = 0, uni = 0;
    double abs_err = 0.0;
    const std::size_t off = static_cast<std::size_t>(t) * d.frame_size();
    for (std::size_t i = off; i < off + d.frame_size(); ++i) {
      const bool p = pred[i] != 0;
      const bool g = gt.labels[i] != 0;
      inter += p && g;
      uni += p || g;
      abs_err += std::abs(soft[i] - (g ? 1.0 : 0.0));
    }
    FrameScore& f = frames[t];
    f.empty_union = uni == 0;
    f.iou = f.empty_union ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    f.mae = abs_err / static_cast<double>(d.frame_size());
  }
  return frames;
}

}  // namespace

SegmentationMasks to_masks(std::span<const double> x, const VideoDims& dims, double tau) {
  if (x.size() != dims.n()) {
    throw Error(ErrorCode::kDimensionMismatch, "label vector length differs from m*h*w");
  }
  SegmentationMasks out;
  out.dims = dims;
  out.tau = tau;
  out.soft.resize(x.size());
  out.binary.resize(x.size());

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : x) {
    const double c = std::max(v, 0.0);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  const double range = hi - lo;
  if (!(range > 0.0)) {
    out.constant = true;
    std::fill(out.soft.begin(), out.soft.end(), 0.5);
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) out.soft[i] = (std::max(x[i], 0.0) - lo) / range;
  }
  for (std::size_t i = 0; i < x.size(); ++i) out.binary[i] = out.soft[i] >= tau ? 1 : 0;
  return out;
}

double jmean(std::span<const std::uint8_t> pred, const GroundTruthMasks& gt) {
  require_same(pred.size(), gt);
  const std::vector<double> dummy(pred.size(), 0.0);
  const auto frames = score_frames(pred, dummy, gt);
  double sum = 0.0;
  for (const auto& f : frames) sum += f.iou;
  return sum / static_cast<double>(frames.size());
}

double mae(std::span<const double> pred_soft, const GroundTruthMasks& gt) {
  require_same(pred_soft.size(), gt);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred_soft.size(); ++i) {
    sum += std::abs(pred_soft[i] - (gt.labels[i] ? 1.0 : 0.0));
  }
  return sum / static_cast<double>(pred_soft.size());
}

MetricsReport evaluate(const SegmentationMasks& masks, const GroundTruthMasks& gt) {
  require_same(masks.binary.size(), gt);
  if (!(masks.dims == gt.dims)) {
    throw Error(ErrorCode::kDimensionMismatch, "mask and ground-truth shapes differ");
  }
  MetricsReport report;
  report.frames = score_frames(masks.binary, masks.soft, gt);
  for (const auto& f : report.frames) report.jmean += f.iou;
  report.jmean /= static_cast<double>(report.frames.size());
  report.mae = mae(masks.soft, gt);
  return report;
}

double relative_change(double v1, double v2) {
  if (v1 == 0.0) throw Error(ErrorCode::kZeroBaseline, "relative change from a zero baseline");
  return 100.0 * (v2 - v1) / v1;
}

void write_masks(const SegmentationMasks& masks, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const VideoDims& d = masks.dims;
  std::vector<std::uint8_t> soft(d.frame_size());
  std::vector<std::uint8_t> bin(d.frame_size());
  char name[64];
  for (int t = 0; t < d.m; ++t) {
    const std::size_t off = static_cast<std::size_t>(t) * d.frame_size();
    for (std::size_t i = 0; i < d.frame_size(); ++i) {
      soft[i] = static_cast<std::uint8_t>(std::lround(masks.soft[off + i] * 255.0));
      bin[i] = masks.binary[off + i] ? 255 : 0;
    }
    std::snprintf(name, sizeof(name), "soft_%04d.pgm", t);
    write_pgm(dir / name, d.h, d.w, soft.data());
    std::snprintf(name, sizeof(name), "mask_%04d.pgm", t);
    write_pgm(dir / name, d.h, d.w, bin.data());
  }
}

void write_metrics_csv(const MetricsReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.precision(10);
  out << "frame,iou,mae,empty_union\n";
  for (std::size_t t = 0; t < report.frames.size(); ++t) {
    const auto& f = report.frames[t];
    out << t << ',' << f.iou << ',' << f.mae << ',' << (f.empty_union ? 1 : 0) << '\n';
  }
  out << "mean," << report.jmean << ',' << report.mae << ",\n";
}

}  // namespace stgraph
