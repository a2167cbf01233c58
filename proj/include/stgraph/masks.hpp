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
#include <span>
#include <vector>

#include "stgraph/flow_io.hpp"

namespace stgraph {

struct SegmentationMasks {
  VideoDims dims;
  std::vector<double> soft;           // [0, 1]
  std::vector<std::uint8_t> binary;   // soft >= tau
  double tau = 0.5;
  bool constant = false;  // input carried no contrast; soft is 0.5 everywhere
};

/// Clamps negatives to zero, min-max normalizes over the whole video and
/// thresholds at tau.
SegmentationMasks to_masks(std::span<const double> x, const VideoDims& dims, double tau = 0.5);

struct FrameScore {
  double iou = 0.0;
  double mae = 0.0;
  bool empty_union = false;  // neither mask has foreground; iou counted as 1
};

struct MetricsReport {
  double jmean = 0.0;
  double mae = 0.0;
  std::vector<FrameScore> frames;
};

/// Mean over frames of |pred & gt| / |pred | gt|.
double jmean(std::span<const std::uint8_t> pred, const GroundTruthMasks& gt);
/// Mean |pred - gt| over every pixel of every frame.
double mae(std::span<const double> pred_soft, const GroundTruthMasks& gt);
MetricsReport evaluate(const SegmentationMasks& masks, const GroundTruthMasks& gt);

/// 100 (v2 - v1) / v1
double relative_change(double v1, double v2);

/// soft_%04d.pgm (8-bit soft) and mask_%04d.pgm (0/255) per frame.
void write_masks(const SegmentationMasks& masks, const std::filesystem::path& dir);
/// CSV `frame,iou,mae,empty_union` followed by a `mean` row.
void write_metrics_csv(const MetricsReport& report, const std::filesystem::path& path);

}  // namespace stgraph
