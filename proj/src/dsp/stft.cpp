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

#include "oversmooth/dsp/stft.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "oversmooth/core/error.hpp"

namespace oversmooth::dsp {

void fft_inplace(std::span<std::complex<double>> data) {
  const std::size_t n = data.size();
  if (n == 0 || !std::has_single_bit(n)) {
    throw Error(ErrorCode::kInvalidArgument, "FFT size " + std::to_string(n) + " is not a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t k = 0; k < len / 2; ++k) {
      const std::complex<double> w(std::cos(angle * k), std::sin(angle * k));
      for (std::size_t i = 0; i < n; i += len) {
        const auto u = data[i + k];
        const auto v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
      }
    }
  }
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < static_cast<std::ptrdiff_t>(n) ? i : period - i);
}

Grid stft_magnitude(const AudioClip& clip, std::size_t frame_size, std::size_t hop) {
  if (frame_size == 0 || hop == 0) {
    throw Error(ErrorCode::kInvalidArgument, "frame size and hop must be positive");
  }
  if (!std::has_single_bit(frame_size)) {
    throw Error(ErrorCode::kInvalidArgument, "frame size " + std::to_string(frame_size) + " is not a power of two");
  }
  const std::size_t len = clip.samples.size();
  if (len == 0) throw Error(ErrorCode::kInvalidArgument, "empty audio clip");

  const std::size_t frames = (len + hop - 1) / hop;
  const std::size_t bins = frame_size / 2 + 1;
  const auto window = hann_window(frame_size);
  const auto half = static_cast<std::ptrdiff_t>(frame_size / 2);

  Grid out(frames, bins);
  std::vector<std::complex<double>> buf(frame_size);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto center = static_cast<std::ptrdiff_t>(t * hop);
    for (std::size_t i = 0; i < frame_size; ++i) {
      const auto src = reflect_index(center - half + static_cast<std::ptrdiff_t>(i), len);
      buf[i] = clip.samples[src] * window[i];
    }
    fft_inplace(buf);
    for (std::size_t k = 0; k < bins; ++k) out(t, k) = std::abs(buf[k]);
  }
  return out;
}

}  // namespace oversmooth::dsp
