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

#include "oversmooth/metrics/ssim.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "oversmooth/core/error.hpp"
#include "oversmooth/dsp/stft.hpp"

namespace oversmooth::metrics {
namespace {

void validate(const Spectrogram& a, const Spectrogram& b, const SsimConfig& cfg) {
  if (a.frames() != b.frames() || a.bins() != b.bins()) {
    throw Error(ErrorCode::kShapeMismatch, std::to_string(a.frames()) + "x" + std::to_string(a.bins()) + " vs " +
                                               std::to_string(b.frames()) + "x" + std::to_string(b.bins()));
  }
  if (a.size() == 0) throw Error(ErrorCode::kGridTooSmall, "SSIM of an empty grid");
  if (cfg.window < 3 || cfg.window % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "SSIM window must be odd and >= 3");
  }
  if (!(cfg.c1 > 0.0) || !(cfg.c2 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "C1 and C2 must be positive");
  if (cfg.range && !(cfg.range->lo < cfg.range->hi)) {
    throw Error(ErrorCode::kDegenerateRange, "dynamic range needs lo < hi");
  }
  if (cfg.kind == SsimWindow::kGaussian && !(cfg.gaussian_sigma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Gaussian window sigma must be positive");
  }
}

std::vector<double> window_weights(const SsimConfig& cfg) {
  const std::size_t w = cfg.window;
  std::vector<double> weights(w * w, 1.0);
  if (cfg.kind == SsimWindow::kGaussian) {
    const auto half = static_cast<double>(w / 2);
    for (std::size_t i = 0; i < w; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        const double di = static_cast<double>(i) - half;
        const double dj = static_cast<double>(j) - half;
        weights[i * w + j] = std::exp(-(di * di + dj * dj) / (2.0 * cfg.gaussian_sigma * cfg.gaussian_sigma));
      }
    }
  }
  double total = 0.0;
  for (double v : weights) total += v;
  for (double& v : weights) v /= total;
  return weights;
}

Grid normalized(const Spectrogram& s, double lo, double scale) {
  Grid g(s.frames(), s.bins());
  for (std::size_t i = 0; i < s.size(); ++i) g.values()[i] = (s.values()[i] - lo) * scale;
  return g;
}

}  // namespace

Grid ssim_map(const Spectrogram& a, const Spectrogram& b, const SsimConfig& cfg) {
  validate(a, b, cfg);

  double lo = 0.0;
  double hi = 1.0;
  if (cfg.range) {
    lo = cfg.range->lo;
    hi = cfg.range->hi;
  } else {
    const auto [amin, amax] = std::minmax_element(a.values().begin(), a.values().end());
    const auto [bmin, bmax] = std::minmax_element(b.values().begin(), b.values().end());
    lo = std::min(*amin, *bmin);
    hi = std::max(*amax, *bmax);
    if (!(lo < hi)) {
      // Both grids hold the same constant; identical inputs score 1 under any affine map.
      lo = 0.0;
      hi = 1.0;
    }
  }
  const double scale = 1.0 / (hi - lo);
  const Grid x = normalized(a, lo, scale);
  const Grid y = normalized(b, lo, scale);

  const std::size_t w = cfg.window;
  const auto half = static_cast<std::ptrdiff_t>(w / 2);
  const auto weights = window_weights(cfg);
  const std::size_t rows = x.rows();
  const std::size_t cols = x.cols();

  Grid out(rows, cols);
  std::vector<double> px(w * w);
  std::vector<double> py(w * w);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t i = 0; i < w; ++i) {
        const auto rr = dsp::reflect_index(static_cast<std::ptrdiff_t>(r + i) - half, rows);
        for (std::size_t j = 0; j < w; ++j) {
          const auto cc = dsp::reflect_index(static_cast<std::ptrdiff_t>(c + j) - half, cols);
          px[i * w + j] = x(rr, cc);
          py[i * w + j] = y(rr, cc);
        }
      }
      double mx = 0.0;
      double my = 0.0;
      for (std::size_t k = 0; k < px.size(); ++k) {
        mx += weights[k] * px[k];
        my += weights[k] * py[k];
      }
      double vx = 0.0;
      double vy = 0.0;
      double cov = 0.0;
      for (std::size_t k = 0; k < px.size(); ++k) {
        const double dx = px[k] - mx;
        const double dy = py[k] - my;
        vx += weights[k] * (dx * dx);
        vy += weights[k] * (dy * dy);
        cov += weights[k] * (dx * dy);
      }
      const double luminance = (2.0 * mx * my + cfg.c1) / (mx * mx + my * my + cfg.c1);
      const double structure = (2.0 * cov + cfg.c2) / (vx + vy + cfg.c2);
      out(r, c) = luminance * structure;
    }
  }
  return out;
}

double ssim(const Spectrogram& a, const Spectrogram& b, const SsimConfig& cfg) {
  const Grid map = ssim_map(a, b, cfg);
  double acc = 0.0;
  for (double v : map.values()) acc += v;
  return acc / static_cast<double>(map.size());
}

}  // namespace oversmooth::metrics
