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

#include "oversmooth/core/spectrogram.hpp"

#include <cmath>
#include <string>

#include "oversmooth/core/error.hpp"

namespace oversmooth {
namespace {

void check_finite(std::span<const float> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::kNonFinite, "spectrogram value " + std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace

Spectrogram::Spectrogram(std::size_t frames, std::size_t bins)
    : frames_(frames), bins_(bins), values_(frames * bins, 0.0f) {
  if (bins_ == 0) throw Error(ErrorCode::kInvalidArgument, "spectrogram needs at least one bin");
}

Spectrogram::Spectrogram(std::size_t frames, std::size_t bins, std::vector<float> values)
    : frames_(frames), bins_(bins), values_(std::move(values)) {
  if (bins_ == 0) throw Error(ErrorCode::kInvalidArgument, "spectrogram needs at least one bin");
  if (values_.size() != frames_ * bins_) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(frames_) + "x" + std::to_string(bins_) + " spectrogram given " +
                    std::to_string(values_.size()) + " values");
  }
  check_finite(values_);
}

void Spectrogram::set(std::size_t t, std::size_t f, float v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "spectrogram value is not finite");
  values_[t * bins_ + f] = v;
}

void Spectrogram::append_frame(std::span<const float> row) {
  if (row.size() != bins_) {
    throw Error(ErrorCode::kDimensionMismatch, "frame has " + std::to_string(row.size()) +
                                                   " bins, expected " + std::to_string(bins_));
  }
  check_finite(row);
  values_.insert(values_.end(), row.begin(), row.end());
  ++frames_;
}

Spectrogram to_spectrogram(const Grid& grid) {
  std::vector<float> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = static_cast<float>(grid.values()[i]);
  return Spectrogram(grid.rows(), grid.cols(), std::move(values));
}

Grid to_grid(const Spectrogram& spec) {
  Grid out(spec.frames(), spec.bins());
  for (std::size_t i = 0; i < spec.size(); ++i) out.values()[i] = spec.values()[i];
  return out;
}

}  // namespace oversmooth
