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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oversmooth {

/// Machine-readable failure category carried by every library exception.
enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kBadMagic,
  kDimensionMismatch,
  kNonFinite,
  kParse,
  kEmptySpan,
  kOverlap,
  kUnsorted,
  kSpanOutOfRange,
  kUnsupportedFormat,
  kUnsupportedChannels,
  kTruncated,
  kRateMismatch,
  kGridTooSmall,
  kShapeMismatch,
  kDegenerateRange,
  kEmptySample,
  kZeroVariance,
  kPhonemeAbsent,
  kBinOutOfRange,
  kNoPairs,
  kTooFewSamples,
  kAllCellsEmpty,
  kBelowFloor,
  kInsufficientSamples,
  kUninitialized,
  kDegenerateChannel,
  kDivergence,
  kClipTooSmall,
  kEmptyScores,
  kEmptyCondition,
  kIndistinguishablePrototypes,
  kUnknownStrategy,
};

std::string_view error_code_name(ErrorCode code);

/// Contract or input error. Internal bugs surface as other std::exception types.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace oversmooth
