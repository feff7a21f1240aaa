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
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "oversmooth/core/rng.hpp"
#include "oversmooth/core/spectrogram.hpp"

namespace oversmooth::probloss {

inline constexpr double kDefaultScaleFloor = 1e-3;

/// Per-cell K-component Laplace mixture over a T x F grid.
///
/// Planes are stored component-major: index (k * T + t) * F + f.
class LaplaceMixtureField {
 public:
  LaplaceMixtureField() = default;
  /// Uniform weights, zero means, unit scales.
  LaplaceMixtureField(std::size_t components, std::size_t frames, std::size_t bins,
                      double scale_floor = kDefaultScaleFloor);
  /// Validates the simplex (1e-6) and the scale floor.
  LaplaceMixtureField(std::size_t components, std::size_t frames, std::size_t bins, std::vector<double> weights,
                      std::vector<double> means, std::vector<double> scales, double scale_floor = kDefaultScaleFloor);

  std::size_t components() const noexcept { return k_; }
  std::size_t frames() const noexcept { return t_; }
  std::size_t bins() const noexcept { return f_; }
  double scale_floor() const noexcept { return floor_; }

  std::size_t index(std::size_t t, std::size_t f, std::size_t k) const noexcept { return (k * t_ + t) * f_ + f; }
  double weight(std::size_t t, std::size_t f, std::size_t k) const { return weights_[index(t, f, k)]; }
  double mean(std::size_t t, std::size_t f, std::size_t k) const { return means_[index(t, f, k)]; }
  double scale(std::size_t t, std::size_t f, std::size_t k) const { return scales_[index(t, f, k)]; }

  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> means() const noexcept { return means_; }
  std::span<const double> scales() const noexcept { return scales_; }

  /// Replaces one cell's parameters; `w`, `mu`, `beta` hold K values each.
  void set_cell(std::size_t t, std::size_t f, std::span<const double> w, std::span<const double> mu,
                std::span<const double> beta);

 private:
  void validate() const;

  std::size_t k_ = 0;
  std::size_t t_ = 0;
  std::size_t f_ = 0;
  double floor_ = kDefaultScaleFloor;
  std::vector<double> weights_;
  std::vector<double> means_;
  std::vector<double> scales_;
};

/// Unconstrained parameters: weights = softmax(logits), scale = softplus(raw) + floor.
struct UnconstrainedMixtureParams {
  std::size_t components = 0;
  std::size_t frames = 0;
  std::size_t bins = 0;
  double scale_floor = kDefaultScaleFloor;
  std::vector<double> logits;
  std::vector<double> means;
  std::vector<double> raw_scales;

  static UnconstrainedMixtureParams zeros(std::size_t components, std::size_t frames, std::size_t bins,
                                          double scale_floor = kDefaultScaleFloor);
};

LaplaceMixtureField to_field(const UnconstrainedMixtureParams& params);
/// Inverse map; scales must exceed the floor strictly.
UnconstrainedMixtureParams to_unconstrained(const LaplaceMixtureField& field);

double softplus(double x);
double inverse_softplus(double y);

/// Mean negative log-likelihood per cell, via log-sum-exp.
double lm_nll(const LaplaceMixtureField& field, const Spectrogram& target);

struct MixtureGradient {
  double nll = 0.0;
  std::vector<double> logits;
  std::vector<double> means;
  std::vector<double> raw_scales;

  double max_abs() const;
};

/// lm_nll and its gradient with respect to every raw parameter.
/// The sub-gradient of |y - mu| is taken as 0 at y == mu.
MixtureGradient lm_nll_grad(const UnconstrainedMixtureParams& params, const Spectrogram& target);

/// Inverse-CDF Laplace draw for u in (0, 1).
double laplace_quantile(double mean, double scale, double u);

/// One draw per cell: categorical component, then a Laplace variate.
Spectrogram lm_sample(const LaplaceMixtureField& field, SeededRng& rng);

struct FitConfig {
  std::size_t components = 5;
  std::size_t steps = 400;
  double step_size = 0.05;
  std::size_t restarts = 5;
  double scale_floor = kDefaultScaleFloor;
  std::uint64_t seed = 0;
};

struct FitResult {
  LaplaceMixtureField field;
  /// Mean over cells of the per-cell sample NLL at the returned parameters.
  double nll = 0.0;
};

/// Fits each cell to the values it takes across `samples` (all of one shape).
///
/// Adam with a linearly decaying step size from a seeded k-means++ style
/// start; the best restart is kept per cell and components are ordered by
/// ascending mean.
FitResult fit_lm(std::span<const Spectrogram> samples, const FitConfig& cfg);

/// Mean over cells and samples of the mixture NLL.
double lm_sample_nll(const LaplaceMixtureField& field, std::span<const Spectrogram> samples);

std::vector<std::uint8_t> encode_mixture(const LaplaceMixtureField& field);
LaplaceMixtureField decode_mixture(std::span<const std::uint8_t> bytes, double scale_floor = kDefaultScaleFloor);
void write_mixture(const LaplaceMixtureField& field, const std::filesystem::path& path);
LaplaceMixtureField read_mixture(const std::filesystem::path& path, double scale_floor = kDefaultScaleFloor);
/// Header "t,f,k,pi,mu,beta", one row per cell and component.
std::string mixture_csv(const LaplaceMixtureField& field);

}  // namespace oversmooth::probloss
