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

#include "oversmooth/dsp/mel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oversmooth/core/error.hpp"
#include "oversmooth/dsp/stft.hpp"

namespace oversmooth::dsp {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(const MelFilterbankConfig& config) : config_(config) {
  if (config_.f_max <= 0.0) config_.f_max = config_.sample_rate / 2.0;
  if (config_.sample_rate <= 0.0 || config_.fft_size < 2 || config_.mel_bins == 0 ||
      config_.f_min < 0.0 || config_.f_min >= config_.f_max || config_.f_max > config_.sample_rate / 2.0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid mel filterbank configuration");
  }
  const std::size_t n_mels = config_.mel_bins;
  const std::size_t n_freqs = config_.fft_size / 2 + 1;
  const double mel_lo = hz_to_mel(config_.f_min);
  const double mel_hi = hz_to_mel(config_.f_max);

  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / static_cast<double>(n_mels + 1));
  }

  weights_ = Grid(n_mels, n_freqs);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = edges[m];
    const double mid = edges[m + 1];
    const double hi = edges[m + 2];
    bool any = false;
    for (std::size_t k = 0; k < n_freqs; ++k) {
      const double f = config_.sample_rate * static_cast<double>(k) / static_cast<double>(config_.fft_size);
      const double w = std::max(0.0, std::min((f - lo) / (mid - lo), (hi - f) / (hi - mid)));
      weights_(m, k) = w;
      any = any || w > 0.0;
    }
    if (!any) {
      throw Error(ErrorCode::kInvalidArgument,
                  "mel filter " + std::to_string(m) + " covers no FFT bin; use fewer mel bins or a larger FFT");
    }
  }
}

double MelFilterbank::center_hz(std::size_t m) const {
  const double mel_lo = hz_to_mel(config_.f_min);
  const double mel_hi = hz_to_mel(config_.f_max);
  return mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(m + 1) /
                                static_cast<double>(config_.mel_bins + 1));
}

Spectrogram mel_spectrogram(const AudioClip& clip, const MelFilterbank& fb, std::size_t frame_size,
                            std::size_t hop, double floor) {
  if (clip.sample_rate != fb.sample_rate()) {
    throw Error(ErrorCode::kRateMismatch, "clip sample rate " + std::to_string(std::lround(clip.sample_rate)) +
                                              " Hz differs from filterbank rate " +
                                              std::to_string(std::lround(fb.sample_rate())) + " Hz");
  }
  if (frame_size != fb.fft_size()) {
    throw Error(ErrorCode::kInvalidArgument, "frame size " + std::to_string(frame_size) +
                                                 " differs from filterbank FFT size " + std::to_string(fb.fft_size()));
  }
  if (!(floor > 0.0)) throw Error(ErrorCode::kInvalidArgument, "amplitude floor must be positive");

  const Grid mag = stft_magnitude(clip, frame_size, hop);
  const Grid& w = fb.weights();
  std::vector<float> values(mag.rows() * w.rows());
  for (std::size_t t = 0; t < mag.rows(); ++t) {
    const auto spectrum = mag.row(t);
    for (std::size_t m = 0; m < w.rows(); ++m) {
      const auto filt = w.row(m);
      double acc = 0.0;
      for (std::size_t k = 0; k < filt.size(); ++k) acc += filt[k] * spectrum[k];
      values[t * w.rows() + m] = static_cast<float>(std::log(std::max(acc, floor)));
    }
  }
  return Spectrogram(mag.rows(), w.rows(), std::move(values));
}

}  // namespace oversmooth::dsp
