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

#include "oversmooth/probloss/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "cell_math.hpp"
#include "oversmooth/core/error.hpp"

namespace oversmooth::probloss {
namespace {

struct CellFit {
  std::vector<double> logits, means, raw;
  double nll = 0.0;
};

// k-means++ style seeding: first centre uniform over the samples, later
// centres drawn with probability proportional to squared distance.
std::vector<double> seed_centres(std::span<const double> x, std::size_t k, SeededRng& rng) {
  std::vector<double> centres{x[rng.uniform_index(x.size())]};
  std::vector<double> d2(x.size());
  while (centres.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centres) best = std::min(best, (x[i] - c) * (x[i] - c));
      d2[i] = best;
      total += best;
    }
    if (!(total > 0.0)) {
      centres.push_back(x[rng.uniform_index(x.size())]);
      continue;
    }
    double u = rng.uniform() * total;
    std::size_t pick = x.size() - 1;
    for (std::size_t i = 0; i < x.size(); ++i) {
      u -= d2[i];
      if (u < 0.0 && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    centres.push_back(x[pick]);
  }
  return centres;
}

double cell_nll(detail::CellWork& work, std::span<const double> x, double floor) {
  work.prepare(floor);
  double total = 0.0;
  for (double y : x) total += work.accumulate(y);
  return total / static_cast<double>(x.size());
}

CellFit fit_cell(std::span<const double> x, const FitConfig& cfg, SeededRng rng) {
  const std::size_t k = cfg.components;
  const double floor = cfg.scale_floor;
  const auto centres = seed_centres(x, k, rng);

  detail::CellWork work(k);
  std::vector<double> spread(k, 0.0), count(k, 0.0);
  for (double y : x) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j) {
      if (std::abs(y - centres[j]) < std::abs(y - centres[best])) best = j;
    }
    spread[best] += std::abs(y - centres[best]);
    count[best] += 1.0;
  }
  for (std::size_t j = 0; j < k; ++j) {
    const double mad = count[j] > 0.0 ? spread[j] / count[j] : 0.0;
    work.logits[j] = 0.0;
    work.means[j] = centres[j];
    // A cluster with no spread starts at the floor, where the optimum is.
    work.raw[j] = inverse_softplus(std::max(mad - floor, 1e-6 * floor));
  }

  // Adam over the 3K raw parameters, step size decaying linearly to zero.
  const std::size_t n_params = 3 * k;
  std::vector<double> m(n_params, 0.0), v(n_params, 0.0), grad(n_params);
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double inv_n = 1.0 / static_cast<double>(x.size());
  double p1 = 1.0, p2 = 1.0;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    work.prepare(floor);
    work.clear_grad();
    for (double y : x) work.accumulate(y);
    for (std::size_t j = 0; j < k; ++j) {
      grad[j] = work.g_logits[j] * inv_n;
      grad[k + j] = work.g_means[j] * inv_n;
      grad[2 * k + j] = work.g_raw[j] * inv_n;
    }
    p1 *= b1;
    p2 *= b2;
    const double lr =
        cfg.step_size * (1.0 - static_cast<double>(step) / static_cast<double>(cfg.steps));
    for (std::size_t i = 0; i < n_params; ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
      v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
      const double delta = lr * (m[i] / (1.0 - p1)) / (std::sqrt(v[i] / (1.0 - p2)) + eps);
      double& p = i < k ? work.logits[i] : (i < 2 * k ? work.means[i - k] : work.raw[i - 2 * k]);
      p -= delta;
    }
  }
  CellFit out{work.logits, work.means, work.raw, cell_nll(work, x, floor)};
  if (!std::isfinite(out.nll)) throw Error(ErrorCode::kNonFinite, "mixture fit diverged");
  return out;
}

}  // namespace

FitResult fit_lm(std::span<const Spectrogram> samples, const FitConfig& cfg) {
  if (cfg.components == 0) throw Error(ErrorCode::kInvalidArgument, "mixture needs at least one component");
  if (cfg.restarts == 0) throw Error(ErrorCode::kInvalidArgument, "need at least one restart");
  if (!(cfg.step_size > 0.0)) throw Error(ErrorCode::kInvalidArgument, "step size must be positive");
  if (samples.size() < cfg.components) {
    throw Error(ErrorCode::kInsufficientSamples, std::to_string(samples.size()) + " samples per cell for " +
                                                     std::to_string(cfg.components) + " components");
  }
  const std::size_t frames = samples.front().frames();
  const std::size_t bins = samples.front().bins();
  for (const auto& s : samples) {
    if (s.frames() != frames || s.bins() != bins) throw Error(ErrorCode::kShapeMismatch, "sample shapes differ");
  }
  const std::size_t k = cfg.components;
  const std::size_t cells = frames * bins;
  auto params = UnconstrainedMixtureParams::zeros(k, frames, bins, cfg.scale_floor);
  const SeededRng root(cfg.seed, 0x4C4D);
  std::vector<double> x(samples.size());
  double total = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t i = 0; i < samples.size(); ++i) x[i] = samples[i].values()[c];
    const SeededRng cell_rng = root.substream(c);
    CellFit best;
    best.nll = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
      auto fit = fit_cell(x, cfg, cell_rng.substream(r));
      if (fit.nll < best.nll) best = std::move(fit);
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return best.means[a] < best.means[b]; });
    for (std::size_t j = 0; j < k; ++j) {
      params.logits[j * cells + c] = best.logits[order[j]];
      params.means[j * cells + c] = best.means[order[j]];
      params.raw_scales[j * cells + c] = best.raw[order[j]];
    }
    total += best.nll;
  }
  return {to_field(params), total / static_cast<double>(cells)};
}

}  // namespace oversmooth::probloss
