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

#include "stgraph/error.hpp"

namespace stgraph {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kObjectLeavesFrame: return "ObjectLeavesFrame";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kNonPositiveBandwidth: return "NonPositiveBandwidth";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kFeatureDimOverflow: return "FeatureDimOverflow";
    case ErrorCode::kSingularGram: return "SingularGram";
    case ErrorCode::kCollapsedSolution: return "CollapsedSolution";
    case ErrorCode::kBadInitFile: return "BadInitFile";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kConstantVector: return "ConstantVector";
    case ErrorCode::kZeroBaseline: return "ZeroBaseline";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNetworkFailed: return "NetworkFailed";
  }
  return "Unknown";
}

}  // namespace stgraph
