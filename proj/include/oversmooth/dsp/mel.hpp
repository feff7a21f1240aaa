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

#include "oversmooth/core/grid.hpp"
#include "oversmooth/core/spectrogram.hpp"
#include "oversmooth/dsp/wav.hpp"

namespace oversmooth::dsp {

inline constexpr double kDefaultSampleRate = 22050.0;
inline constexpr std::size_t kDefaultFrameSize = 1024;
inline constexpr std::size_t kDefaultHop = 256;
inline constexpr std::size_t kDefaultMelBins = 80;
inline constexpr double kDefaultAmplitudeFloor = 1e-5;

/// HTK mel scale: 2595 log10(1 + f/700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

struct MelFilterbankConfig {
  double sample_rate = kDefaultSampleRate;
  std::size_t fft_size = kDefaultFrameSize;
  std::size_t mel_bins = kDefaultMelBins;
  double f_min = 0.0;
  /// Non-positive means sample_rate / 2.
  double f_max = 0.0;
};

/// Unnormalized triangular filters equally spaced on the HTK mel scale.
class MelFilterbank {
 public:
  explicit MelFilterbank(const MelFilterbankConfig& config = {});

  /// mel_bins x (fft_size/2 + 1), all weights >= 0.
  const Grid& weights() const noexcept { return weights_; }
  std::size_t mel_bins() const noexcept { return weights_.rows(); }
  std::size_t fft_size() const noexcept { return config_.fft_size; }
  double sample_rate() const noexcept { return config_.sample_rate; }
  double f_min() const noexcept { return config_.f_min; }
  double f_max() const noexcept { return config_.f_max; }
  /// Frequency (Hz) at which filter `m` peaks.
  double center_hz(std::size_t m) const;

 private:
  MelFilterbankConfig config_;
  Grid weights_;
};

/// log(max(fb * |STFT|, floor)) with natural log; frames x mel_bins.
Spectrogram mel_spectrogram(const AudioClip& clip, const MelFilterbank& fb,
                            std::size_t frame_size = kDefaultFrameSize,
                            std::size_t hop = kDefaultHop,
                            double floor = kDefaultAmplitudeFloor);

}  // namespace oversmooth::dsp
