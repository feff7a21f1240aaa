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
#include <string>

#include "cell_math.hpp"
#include "oversmooth/core/error.hpp"

namespace oversmooth::probloss {

LaplaceMixtureField::LaplaceMixtureField(std::size_t components, std::size_t frames, std::size_t bins,
                                         double scale_floor)
    : LaplaceMixtureField(components, frames, bins,
                          std::vector<double>(components * frames * bins,
                                              components == 0 ? 0.0 : 1.0 / static_cast<double>(components)),
                          std::vector<double>(components * frames * bins, 0.0),
                          std::vector<double>(components * frames * bins, std::max(1.0, scale_floor)), scale_floor) {}

LaplaceMixtureField::LaplaceMixtureField(std::size_t components, std::size_t frames, std::size_t bins,
                                         std::vector<double> weights, std::vector<double> means,
                                         std::vector<double> scales, double scale_floor)
    : k_(components),
      t_(frames),
      f_(bins),
      floor_(scale_floor),
      weights_(std::move(weights)),
      means_(std::move(means)),
      scales_(std::move(scales)) {
  validate();
}

void LaplaceMixtureField::validate() const {
  if (k_ == 0) throw Error(ErrorCode::kInvalidArgument, "mixture needs at least one component");
  if (!(floor_ > 0.0) || !std::isfinite(floor_)) throw Error(ErrorCode::kInvalidArgument, "scale floor must be positive");
  const std::size_t n = k_ * t_ * f_;
  if (weights_.size() != n || means_.size() != n || scales_.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "mixture planes must hold K*T*F values");
  }
  // Stored fields pass through float32, so the floor is checked with a
  // relative slack of a few float ulps.
  const double floor_check = floor_ * (1.0 - 1e-6);
  for (std::size_t t = 0; t < t_; ++t) {
    for (std::size_t f = 0; f < f_; ++f) {
      double total = 0.0;
      for (std::size_t k = 0; k < k_; ++k) {
        const std::size_t i = index(t, f, k);
        if (!std::isfinite(weights_[i]) || !std::isfinite(means_[i]) || !std::isfinite(scales_[i])) {
          throw Error(ErrorCode::kNonFinite, "mixture parameter is not finite");
        }
        if (weights_[i] < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative mixture weight");
        if (scales_[i] < floor_check) {
          throw Error(ErrorCode::kBelowFloor,
                      "scale " + std::to_string(scales_[i]) + " below floor " + std::to_string(floor_));
        }
        total += weights_[i];
      }
      if (std::abs(total - 1.0) > 1e-6) {
        throw Error(ErrorCode::kInvalidArgument, "weights at cell (" + std::to_string(t) + ", " + std::to_string(f) +
                                                     ") sum to " + std::to_string(total));
      }
    }
  }
}

void LaplaceMixtureField::set_cell(std::size_t t, std::size_t f, std::span<const double> w,
                                   std::span<const double> mu, std::span<const double> beta) {
  if (w.size() != k_ || mu.size() != k_ || beta.size() != k_) {
    throw Error(ErrorCode::kDimensionMismatch, "cell update needs K values per parameter");
  }
  if (t >= t_ || f >= f_) throw Error(ErrorCode::kInvalidArgument, "cell index out of range");
  double total = 0.0;
  for (std::size_t k = 0; k < k_; ++k) {
    if (!std::isfinite(w[k]) || !std::isfinite(mu[k]) || !std::isfinite(beta[k])) {
      throw Error(ErrorCode::kNonFinite, "mixture parameter is not finite");
    }
    if (w[k] < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative mixture weight");
    if (beta[k] < floor_ * (1.0 - 1e-6)) throw Error(ErrorCode::kBelowFloor, "scale below floor");
    total += w[k];
  }
  if (std::abs(total - 1.0) > 1e-6) throw Error(ErrorCode::kInvalidArgument, "cell weights do not sum to 1");
  for (std::size_t k = 0; k < k_; ++k) {
    const std::size_t i = index(t, f, k);
    weights_[i] = w[k];
    means_[i] = mu[k];
    scales_[i] = beta[k];
  }
}

UnconstrainedMixtureParams UnconstrainedMixtureParams::zeros(std::size_t components, std::size_t frames,
                                                             std::size_t bins, double scale_floor) {
  const std::size_t n = components * frames * bins;
  return {components, frames, bins, scale_floor, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
          std::vector<double>(n, 0.0)};
}

double softplus(double x) { return detail::stable_softplus(x); }

double inverse_softplus(double y) {
  if (!(y > 0.0)) throw Error(ErrorCode::kInvalidArgument, "inverse softplus needs a positive value");
  return y + std::log(-std::expm1(-y));
}

namespace {

void check_params(const UnconstrainedMixtureParams& p) {
  const std::size_t n = p.components * p.frames * p.bins;
  if (p.components == 0) throw Error(ErrorCode::kInvalidArgument, "mixture needs at least one component");
  if (p.logits.size() != n || p.means.size() != n || p.raw_scales.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "parameter planes must hold K*T*F values");
  }
  if (!(p.scale_floor > 0.0)) throw Error(ErrorCode::kInvalidArgument, "scale floor must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p.logits[i]) || !std::isfinite(p.means[i]) || !std::isfinite(p.raw_scales[i])) {
      throw Error(ErrorCode::kNonFinite, "mixture parameter is not finite");
    }
  }
}

void check_shape(std::size_t frames, std::size_t bins, const Spectrogram& target) {
  if (frames != target.frames() || bins != target.bins()) {
    throw Error(ErrorCode::kShapeMismatch, "mixture is " + std::to_string(frames) + "x" + std::to_string(bins) +
                                               ", target is " + std::to_string(target.frames()) + "x" +
                                               std::to_string(target.bins()));
  }
}

}  // namespace

LaplaceMixtureField to_field(const UnconstrainedMixtureParams& params) {
  check_params(params);
  const std::size_t k = params.components;
  const std::size_t cells = params.frames * params.bins;
  std::vector<double> w(k * cells), mu(params.means), beta(k * cells);
  std::vector<double> logit(k), pi(k);
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t j = 0; j < k; ++j) logit[j] = params.logits[j * cells + c];
    detail::softmax(logit, pi);
    for (std::size_t j = 0; j < k; ++j) {
      w[j * cells + c] = pi[j];
      beta[j * cells + c] = softplus(params.raw_scales[j * cells + c]) + params.scale_floor;
    }
  }
  return LaplaceMixtureField(k, params.frames, params.bins, std::move(w), std::move(mu), std::move(beta),
                             params.scale_floor);
}

UnconstrainedMixtureParams to_unconstrained(const LaplaceMixtureField& field) {
  auto p = UnconstrainedMixtureParams::zeros(field.components(), field.frames(), field.bins(), field.scale_floor());
  const auto w = field.weights();
  const auto beta = field.scales();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) throw Error(ErrorCode::kInvalidArgument, "zero weight has no finite logit");
    p.logits[i] = std::log(w[i]);
    p.means[i] = field.means()[i];
    p.raw_scales[i] = inverse_softplus(beta[i] - field.scale_floor());
  }
  return p;
}

double lm_nll(const LaplaceMixtureField& field, const Spectrogram& target) {
  check_shape(field.frames(), field.bins(), target);
  const std::size_t k = field.components();
  std::vector<double> terms(k);
  double total = 0.0;
  for (std::size_t t = 0; t < field.frames(); ++t) {
    for (std::size_t f = 0; f < field.bins(); ++f) {
      const double y = target(t, f);
      for (std::size_t j = 0; j < k; ++j) {
        const double pi = field.weight(t, f, j);
        const double beta = field.scale(t, f, j);
        terms[j] = (pi > 0.0 ? std::log(pi) : -std::numeric_limits<double>::infinity()) - std::log(2.0 * beta) -
                   std::abs(y - field.mean(t, f, j)) / beta;
      }
      total -= detail::log_sum_exp(terms);
    }
  }
  if (!std::isfinite(total)) throw Error(ErrorCode::kNonFinite, "mixture NLL is not finite");
  return total / static_cast<double>(target.size());
}

double MixtureGradient::max_abs() const {
  double m = 0.0;
  for (const auto* plane : {&logits, &means, &raw_scales}) {
    for (double v : *plane) m = std::max(m, std::abs(v));
  }
  return m;
}

MixtureGradient lm_nll_grad(const UnconstrainedMixtureParams& params, const Spectrogram& target) {
  check_params(params);
  check_shape(params.frames, params.bins, target);
  const std::size_t k = params.components;
  const std::size_t cells = params.frames * params.bins;
  const double scale = 1.0 / static_cast<double>(cells);
  MixtureGradient g{0.0, std::vector<double>(k * cells), std::vector<double>(k * cells),
                    std::vector<double>(k * cells)};
  detail::CellWork work(k);
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t j = 0; j < k; ++j) {
      work.logits[j] = params.logits[j * cells + c];
      work.means[j] = params.means[j * cells + c];
      work.raw[j] = params.raw_scales[j * cells + c];
    }
    work.prepare(params.scale_floor);
    work.clear_grad();
    g.nll += work.accumulate(target.values()[c]);
    for (std::size_t j = 0; j < k; ++j) {
      g.logits[j * cells + c] = work.g_logits[j] * scale;
      g.means[j * cells + c] = work.g_means[j] * scale;
      g.raw_scales[j * cells + c] = work.g_raw[j] * scale;
    }
  }
  g.nll *= scale;
  if (!std::isfinite(g.nll) || !std::isfinite(g.max_abs())) {
    throw Error(ErrorCode::kNonFinite, "mixture gradient is not finite");
  }
  return g;
}

double laplace_quantile(double mean, double scale, double u) {
  const double d = u - 0.5;
  const double sgn = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  return mean - scale * sgn * std::log(1.0 - 2.0 * std::abs(d));
}

Spectrogram lm_sample(const LaplaceMixtureField& field, SeededRng& rng) {
  Spectrogram out(field.frames(), field.bins());
  const std::size_t k = field.components();
  for (std::size_t t = 0; t < field.frames(); ++t) {
    for (std::size_t f = 0; f < field.bins(); ++f) {
      const double u = rng.uniform();
      std::size_t pick = k - 1;
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        acc += field.weight(t, f, j);
        if (u < acc) {
          pick = j;
          break;
        }
      }
      // Guard against a zero-weight tail component catching rounding slack.
      while (pick > 0 && field.weight(t, f, pick) == 0.0) --pick;
      out.set(t, f,
              static_cast<float>(laplace_quantile(field.mean(t, f, pick), field.scale(t, f, pick), rng.uniform_open())));
    }
  }
  return out;
}

double lm_sample_nll(const LaplaceMixtureField& field, std::span<const Spectrogram> samples) {
  if (samples.empty()) throw Error(ErrorCode::kEmptySample, "no samples");
  double total = 0.0;
  for (const auto& s : samples) total += lm_nll(field, s);
  return total / static_cast<double>(samples.size());
}

}  // namespace oversmooth::probloss
