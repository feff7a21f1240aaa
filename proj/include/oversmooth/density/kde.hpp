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
#include <span>
#include <utility>
#include <vector>

#include "oversmooth/core/grid.hpp"

namespace oversmooth::density {

inline constexpr std::size_t kGrid1dPoints = 512;
inline constexpr std::size_t kGrid2dPoints = 128;
/// Auto grids extend this many bandwidths beyond the sample range.
inline constexpr double kGridMarginBandwidths = 4.0;

struct Density1D {
  std::vector<double> grid;
  std::vector<double> values;
  double bandwidth = 0.0;
};

struct Density2D {
  std::vector<double> grid_x;
  std::vector<double> grid_y;
  /// values(i, j) is the density at (grid_x[i], grid_y[j]).
  Grid values;
  double bandwidth_x = 0.0;
  double bandwidth_y = 0.0;
};

/// Silverman's rule 1.06 * sd * n^(-1/5) (sample standard deviation).
/// Throws kZeroVariance for a constant sample (including n == 1).
double silverman_bandwidth(std::span<const double> samples);

/// Gaussian KDE. Without a grid, 512 points span [min - 4h, max + 4h].
Density1D kde1d(std::span<const double> samples, std::optional<double> bandwidth = std::nullopt,
                std::optional<std::vector<double>> grid = std::nullopt);

/// Product-Gaussian KDE on a 128 x 128 grid spanning each axis' range +/- 4h.
Density2D kde2d(std::span<const std::pair<double, double>> pairs,
                std::optional<std::pair<double, double>> bandwidths = std::nullopt);

/// Trapezoidal integrals, used to check normalization.
double trapezoid(std::span<const double> x, std::span<const double> y);
double trapezoid2d(const Density2D& density);

}  // namespace oversmooth::density
