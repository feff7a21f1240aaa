// Copyright 2026 The oversmooth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "oversmooth/core/error.hpp"

namespace oversmooth {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kEmptySpan: return "EmptySpan";
    case ErrorCode::kOverlap: return "Overlap";
    case ErrorCode::kUnsorted: return "Unsorted";
    case ErrorCode::kSpanOutOfRange: return "SpanOutOfRange";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kUnsupportedChannels: return "UnsupportedChannels";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kRateMismatch: return "RateMismatch";
    case ErrorCode::kGridTooSmall: return "GridTooSmall";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kDegenerateRange: return "DegenerateRange";
    case ErrorCode::kEmptySample: return "EmptySample";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kPhonemeAbsent: return "PhonemeAbsent";
    case ErrorCode::kBinOutOfRange: return "BinOutOfRange";
    case ErrorCode::kNoPairs: return "NoPairs";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kAllCellsEmpty: return "AllCellsEmpty";
    case ErrorCode::kBelowFloor: return "BelowFloor";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kUninitialized: return "Uninitialized";
    case ErrorCode::kDegenerateChannel: return "DegenerateChannel";
    case ErrorCode::kDivergence: return "Divergence";
    case ErrorCode::kClipTooSmall: return "ClipTooSmall";
    case ErrorCode::kEmptyScores: return "EmptyScores";
    case ErrorCode::kEmptyCondition: return "EmptyCondition";
    case ErrorCode::kIndistinguishablePrototypes: return "IndistinguishablePrototypes";
    case ErrorCode::kUnknownStrategy: return "UnknownStrategy";
  }
  return "Unknown";
}

}  // namespace oversmooth
