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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "oversmooth/core/grid.hpp"
#include "oversmooth/dsp/wav.hpp"

namespace oversmooth::dsp {

/// In-place iterative radix-2 FFT; data.size() must be a power of two.
void fft_inplace(std::span<std::complex<double>> data);

/// Periodic Hann window of length n: 0.5 - 0.5 cos(2 pi i / n).
std::vector<double> hann_window(std::size_t n);

/// Mirror index into [0, n) without repeating the edge sample (numpy "reflect"),
/// folding repeatedly when the overhang exceeds the signal.
std::size_t reflect_index(std::ptrdiff_t i, std::size_t n);

/// Centered, reflect-padded, Hann-windowed magnitude STFT.
/// Returns a ceil(len/hop) x (frame_size/2 + 1) grid; frame t is centered on
/// sample t*hop.
Grid stft_magnitude(const AudioClip& clip, std::size_t frame_size, std::size_t hop);

}  // namespace oversmooth::dsp
