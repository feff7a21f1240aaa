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

#include "oversmooth/density/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oversmooth/core/error.hpp"

namespace oversmooth::density {
namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

void check_bandwidth(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::kInvalidArgument, "bandwidth must be positive");
}

// kernel(i, k) = phi((grid[i] - samples[k]) / h) / h, laid out row-major.
std::vector<double> kernel_matrix(std::span<const double> grid, std::span<const double> samples, double h) {
  std::vector<double> out(grid.size() * samples.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const double u = (grid[i] - samples[k]) / h;
      out[i * samples.size() + k] = kInvSqrt2Pi * std::exp(-0.5 * u * u) / h;
    }
  }
  return out;
}

}  // namespace

double silverman_bandwidth(std::span<const double> samples) {
  const auto n = samples.size();
  if (n < 2) throw Error(ErrorCode::kZeroVariance, "bandwidth rule needs at least two samples");
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw Error(ErrorCode::kZeroVariance, "sample has zero variance; pass a bandwidth");
  return 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
}

Density1D kde1d(std::span<const double> samples, std::optional<double> bandwidth,
                std::optional<std::vector<double>> grid) {
  if (samples.empty()) throw Error(ErrorCode::kEmptySample, "KDE of an empty sample");
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(samples);
  check_bandwidth(h);

  Density1D out;
  out.bandwidth = h;
  if (grid) {
    out.grid = std::move(*grid);
  } else {
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    out.grid = linspace(*lo - kGridMarginBandwidths * h, *hi + kGridMarginBandwidths * h, kGrid1dPoints);
  }
  out.values.assign(out.grid.size(), 0.0);
  const double norm = kInvSqrt2Pi / (static_cast<double>(samples.size()) * h);
  for (std::size_t i = 0; i < out.grid.size(); ++i) {
    double acc = 0.0;
    for (double s : samples) {
      const double u = (out.grid[i] - s) / h;
      acc += std::exp(-0.5 * u * u);
    }
    out.values[i] = acc * norm;
  }
  return out;
}

Density2D kde2d(std::span<const std::pair<double, double>> pairs,
                std::optional<std::pair<double, double>> bandwidths) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptySample, "KDE of an empty sample");
  std::vector<double> xs(pairs.size());
  std::vector<double> ys(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    xs[k] = pairs[k].first;
    ys[k] = pairs[k].second;
  }
  Density2D out;
  out.bandwidth_x = bandwidths ? bandwidths->first : silverman_bandwidth(xs);
  out.bandwidth_y = bandwidths ? bandwidths->second : silverman_bandwidth(ys);
  check_bandwidth(out.bandwidth_x);
  check_bandwidth(out.bandwidth_y);

  const auto [xlo, xhi] = std::minmax_element(xs.begin(), xs.end());
  const auto [ylo, yhi] = std::minmax_element(ys.begin(), ys.end());
  out.grid_x = linspace(*xlo - kGridMarginBandwidths * out.bandwidth_x,
                        *xhi + kGridMarginBandwidths * out.bandwidth_x, kGrid2dPoints);
  out.grid_y = linspace(*ylo - kGridMarginBandwidths * out.bandwidth_y,
                        *yhi + kGridMarginBandwidths * out.bandwidth_y, kGrid2dPoints);

  // The product kernel factorizes: density = Kx * Ky^T / n.
  const auto kx = kernel_matrix(out.grid_x, xs, out.bandwidth_x);
  const auto ky = kernel_matrix(out.grid_y, ys, out.bandwidth_y);
  const std::size_t n = pairs.size();
  out.values = Grid(kGrid2dPoints, kGrid2dPoints);
  for (std::size_t i = 0; i < kGrid2dPoints; ++i) {
    for (std::size_t j = 0; j < kGrid2dPoints; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += kx[i * n + k] * ky[j * n + k];
      out.values(i, j) = acc / static_cast<double>(n);
    }
  }
  return out;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return acc;
}

double trapezoid2d(const Density2D& density) {
  std::vector<double> inner(density.grid_x.size());
  for (std::size_t i = 0; i < density.grid_x.size(); ++i) inner[i] = trapezoid(density.grid_y, density.values.row(i));
  return trapezoid(density.grid_x, inner);
}

}  // namespace oversmooth::density
