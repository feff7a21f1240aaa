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
#include <optional>

#include "oversmooth/core/grid.hpp"
#include "oversmooth/core/spectrogram.hpp"

namespace oversmooth::metrics {

enum class SsimWindow { kBox, kGaussian };

struct DynamicRange {
  double lo = 0.0;
  double hi = 1.0;
};

struct SsimConfig {
  std::size_t window = 11;
  double c1 = 1e-4;
  double c2 = 9e-4;
  /// Fixed input range mapped to [0, 1]. When unset, the joint min/max of the
  /// two grids is used; two identical constant grids skip normalization.
  std::optional<DynamicRange> range;
  SsimWindow kind = SsimWindow::kBox;
  double gaussian_sigma = 1.5;
};

/// Per-cell two-factor SSIM over a W x W window with reflect padding.
/// Not clamped: negative covariance gives negative cells.
Grid ssim_map(const Spectrogram& a, const Spectrogram& b, const SsimConfig& cfg = {});

/// Mean of ssim_map.
double ssim(const Spectrogram& a, const Spectrogram& b, const SsimConfig& cfg = {});

}  // namespace oversmooth::metrics
