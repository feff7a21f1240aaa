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

#include <cstddef>
#include <span>
#include <vector>

#include "oversmooth/core/grid.hpp"

namespace oversmooth {

/// T x F grid of log-mel values stored as 32-bit floats, time-major.
///
/// Values are always finite. A zero-frame spectrogram is allowed so that
/// selections such as gather_phoneme_frames can return an empty result; every
/// other producer yields at least one frame.
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(std::size_t frames, std::size_t bins);
  Spectrogram(std::size_t frames, std::size_t bins, std::vector<float> values);

  std::size_t frames() const noexcept { return frames_; }
  std::size_t bins() const noexcept { return bins_; }
  std::size_t size() const noexcept { return values_.size(); }

  float operator()(std::size_t t, std::size_t f) const { return values_[t * bins_ + f]; }
  void set(std::size_t t, std::size_t f, float v);

  std::span<const float> values() const noexcept { return values_; }
  std::span<const float> frame(std::size_t t) const {
    return std::span<const float>(values_).subspan(t * bins_, bins_);
  }

  /// Appends one frame; `row` must have bins() values.
  void append_frame(std::span<const float> row);

  friend bool operator==(const Spectrogram&, const Spectrogram&) = default;

 private:
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::vector<float> values_;
};

/// Rows become frames, columns become bins. Values are rounded to float.
Spectrogram to_spectrogram(const Grid& grid);
Grid to_grid(const Spectrogram& spec);

}  // namespace oversmooth
