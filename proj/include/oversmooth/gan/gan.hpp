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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "oversmooth/core/grid.hpp"
#include "oversmooth/core/rng.hpp"
#include "oversmooth/core/spectrogram.hpp"

namespace oversmooth::gan {

inline constexpr std::size_t kDiscriminatorCount = 3;

struct WindowSpec {
  std::array<std::size_t, kDiscriminatorCount> lengths{32, 64, 128};
};

/// One crop per window length, each min(length, T) frames with a uniform
/// start offset and all bins kept.
std::array<Spectrogram, kDiscriminatorCount> random_windows(const Spectrogram& spec, const WindowSpec& ws,
                                                            SeededRng& rng);

using ScoreSets = std::array<std::vector<double>, kDiscriminatorCount>;

/// Sum over discriminators of mean (real - 1)^2 + mean fake^2.
double lsgan_d_loss(const ScoreSets& real, const ScoreSets& fake);
/// Mean over discriminators of mean (fake - 1)^2.
double lsgan_g_loss(const ScoreSets& fake);

inline constexpr std::size_t kMinClipSide = 8;
inline constexpr double kLeakySlope = 0.2;
inline constexpr double kDropout = 0.1;

/// Three stride-2 3x3 convolution stages (1 -> 8 -> 16 -> 16 channels, zero
/// padding 1, leaky ReLU), global mean pooling, then an affine map to one
/// score. Normalization is the identity at evaluation; dropout applies only
/// when a generator is passed for training-mode scoring.
class TinyDiscriminator {
 public:
  static constexpr std::array<std::size_t, 4> kChannels{1, 8, 16, 16};

  /// All-zero parameters.
  TinyDiscriminator();

  static std::size_t parameter_count();
  std::span<const double> parameters() const noexcept { return params_; }
  void set_parameters(std::span<const double> flat);

  /// Weight for stage s (0-based), output channel o, input channel c, tap (ki, kj).
  double& weight(std::size_t s, std::size_t o, std::size_t c, std::size_t ki, std::size_t kj);
  double& bias(std::size_t s, std::size_t o);
  double& head_weight(std::size_t c);
  double& head_bias();

  static std::size_t weight_offset(std::size_t s);
  static std::size_t bias_offset(std::size_t s);
  static std::size_t head_offset();

 private:
  std::vector<double> params_;
};

/// He-style normal weights from `rng`; zero biases.
TinyDiscriminator make_discriminator(SeededRng& rng);

struct ScoreGradient {
  double score = 0.0;
  /// Same layout as TinyDiscriminator::parameters().
  std::vector<double> params;
  Grid clip;
};

double discriminator_score(const TinyDiscriminator& d, const Grid& clip);
double discriminator_score(const TinyDiscriminator& d, const Spectrogram& clip);
/// Score plus its gradient with respect to the parameters and the clip.
/// With `dropout_rng`, inverted dropout (p = kDropout) follows each stage.
ScoreGradient discriminator_score_grad(const TinyDiscriminator& d, const Grid& clip,
                                       SeededRng* dropout_rng = nullptr);

/// DSC1: magic, stage count, per-stage output channels (u32), parameters as f32.
std::vector<std::uint8_t> encode_discriminator(const TinyDiscriminator& d);
TinyDiscriminator decode_discriminator(std::span<const std::uint8_t> bytes);
void write_discriminator(const TinyDiscriminator& d, const std::filesystem::path& path);
TinyDiscriminator read_discriminator(const std::filesystem::path& path);

}  // namespace oversmooth::gan
