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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace oversmooth::probloss::detail {

inline double log_sum_exp(std::span<const double> terms) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : terms) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double v : terms) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

inline void softmax(std::span<const double> logits, std::span<double> out) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : logits) hi = std::max(hi, v);
  double total = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    out[j] = std::exp(logits[j] - hi);
    total += out[j];
  }
  for (double& v : out) v /= total;
}

inline double stable_softplus(double x) { return x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Scratch state for one cell's K components: raw parameters in, NLL and
/// summed gradients out.
struct CellWork {
  explicit CellWork(std::size_t k)
      : logits(k), means(k), raw(k), pi(k), log_pi(k), beta(k), log_2beta(k), inv_beta(k), dbeta_draw(k),
        terms(k), g_logits(k), g_means(k), g_raw(k) {}

  std::vector<double> logits, means, raw;
  std::vector<double> pi, log_pi, beta, log_2beta, inv_beta, dbeta_draw, terms;
  std::vector<double> g_logits, g_means, g_raw;

  void prepare(double floor) {
    softmax(logits, pi);
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : logits) hi = std::max(hi, v);
    double total = 0.0;
    for (double v : logits) total += std::exp(v - hi);
    const double lse = hi + std::log(total);
    for (std::size_t j = 0; j < logits.size(); ++j) {
      log_pi[j] = logits[j] - lse;
      beta[j] = stable_softplus(raw[j]) + floor;
      log_2beta[j] = std::log(2.0 * beta[j]);
      inv_beta[j] = 1.0 / beta[j];
      dbeta_draw[j] = sigmoid(raw[j]);
    }
  }

  void clear_grad() {
    std::fill(g_logits.begin(), g_logits.end(), 0.0);
    std::fill(g_means.begin(), g_means.end(), 0.0);
    std::fill(g_raw.begin(), g_raw.end(), 0.0);
  }

  /// Adds the gradient of -log p(y) and returns -log p(y).
  double accumulate(double y) {
    const std::size_t k = logits.size();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      terms[j] = log_pi[j] - log_2beta[j] - std::abs(y - means[j]) * inv_beta[j];
      hi = std::max(hi, terms[j]);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      terms[j] = std::exp(terms[j] - hi);
      total += terms[j];
    }
    const double inv_total = 1.0 / total;
    for (std::size_t j = 0; j < k; ++j) {
      const double r = terms[j] * inv_total;
      const double d = y - means[j];
      const double sgn = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
      g_logits[j] += pi[j] - r;
      g_means[j] -= r * sgn * inv_beta[j];
      g_raw[j] += r * (inv_beta[j] - std::abs(d) * inv_beta[j] * inv_beta[j]) * dbeta_draw[j];
    }
    return -(hi + std::log(total));
  }
};

}  // namespace oversmooth::probloss::detail
