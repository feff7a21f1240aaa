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

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "oversmooth/core/grid.hpp"
#include "oversmooth/core/rng.hpp"

namespace oversmooth::flow {

inline constexpr std::size_t kDefaultFlowSteps = 8;
inline constexpr std::size_t kDefaultHidden = 16;
/// Coupling log-scales are squashed to (-kLogScaleBound, kLogScaleBound).
inline constexpr double kLogScaleBound = 2.0;

struct FlowConfig {
  std::size_t steps = kDefaultFlowSteps;
  std::size_t channels = 0;
  std::size_t frames = 0;
  std::size_t cond_dim = 0;
  std::size_t hidden = kDefaultHidden;

  /// Channels passed through unchanged by each coupling.
  std::size_t first_half() const noexcept { return (channels + 1) / 2; }
  std::size_t second_half() const noexcept { return channels - first_half(); }
  std::size_t conditioner_inputs() const noexcept { return frames * (first_half() + cond_dim); }
  std::size_t conditioner_outputs() const noexcept { return 2 * frames * second_half(); }
  std::size_t dimension() const noexcept { return frames * channels; }

  friend bool operator==(const FlowConfig&, const FlowConfig&) = default;
};

/// One flow step. Towards the latent (encoding) it applies, in order:
///   actnorm   h = scale * x + bias           (per channel)
///   mix       h' = W^-1 h                     (per frame)
///   coupling  first half kept; second half (h'_b - shift) * exp(-log_scale)
/// where (log_scale, shift) come from a tanh perceptron that sees the kept
/// half of every frame plus the condition of every frame. Generation runs
/// the inverse maps in reverse.
struct FlowStep {
  Eigen::VectorXd scale;
  Eigen::VectorXd bias;
  Eigen::MatrixXd mix;
  Eigen::MatrixXd w1;  // hidden x conditioner_inputs
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // conditioner_outputs x hidden; rows are raw log-scales then shifts
  Eigen::VectorXd b2;
};

class FlowModel {
 public:
  FlowModel() = default;
  /// Identity steps (unit scale, zero bias, W = I, zero coupling), not yet initialized.
  explicit FlowModel(const FlowConfig& cfg);

  const FlowConfig& config() const noexcept { return cfg_; }
  const std::vector<FlowStep>& steps() const noexcept { return steps_; }
  std::vector<FlowStep>& steps() noexcept { return steps_; }

  /// True once actnorm statistics are set (by data or explicitly).
  bool initialized() const noexcept { return initialized_; }
  void mark_initialized() noexcept { initialized_ = true; }

  std::size_t parameter_count() const;
  /// Flat parameter vector: per step scale, bias, W, w1, b1, w2, b2 (matrices row-major).
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);

 private:
  FlowConfig cfg_;
  std::vector<FlowStep> steps_;
  bool initialized_ = false;
};

/// Identity model that is already initialized.
FlowModel make_identity_flow(const FlowConfig& cfg);
/// Random-rotation mixes and small random first coupling layers; the last
/// coupling layer is zero, so each coupling starts as the identity.
FlowModel make_flow(const FlowConfig& cfg, SeededRng& rng);

/// Targets are T x channels; conditions T x cond_dim (may be omitted when cond_dim is 0).
struct ConditionedBatch {
  std::vector<Grid> targets;
  std::vector<Grid> conditions;

  std::size_t size() const noexcept { return targets.size(); }
};

/// Data-dependent init: every actnorm standardizes its input over `batch`.
void actnorm_init(FlowModel& model, const ConditionedBatch& batch);

struct FlowResult {
  Grid value;
  double logdet = 0.0;
};

/// Latent to data.
FlowResult forward(const FlowModel& model, const Grid& z, const Grid& cond = {});
/// Data to latent.
FlowResult inverse(const FlowModel& model, const Grid& y, const Grid& cond = {});

/// Mean over the batch of -[log N(z; 0, I) + inverse logdet].
double nll(const FlowModel& model, const ConditionedBatch& batch);

struct NllGradient {
  double nll = 0.0;
  /// Same layout as FlowModel::parameters().
  std::vector<double> grad;
};
NllGradient nll_gradient(const FlowModel& model, const ConditionedBatch& batch);

/// z ~ N(0, temperature^2 I) pushed through forward.
Grid sample(const FlowModel& model, const Grid& cond, SeededRng& rng, double temperature = 1.0);

struct TrainConfig {
  std::size_t epochs = 40;
  std::size_t batch_size = 64;
  double step_size = 5e-3;
  std::uint64_t seed = 0;
  /// Round parameters to float32 before the final evaluation so a saved
  /// checkpoint scores exactly the reported final NLL.
  bool quantize_result = true;
};

struct CurvePoint {
  std::size_t step = 0;
  double nll = 0.0;
};

struct TrainResult {
  FlowModel model;
  /// Full-data NLL after init and after every epoch; the last entry scores the returned model.
  std::vector<CurvePoint> curve;
  double initial_nll = 0.0;
  double final_nll = 0.0;
};

/// Adam on minibatches with a seeded shuffle; uninitialized models get
/// actnorm_init on the first minibatch. Keeps the best parameters seen.
TrainResult train_flow(FlowModel model, const ConditionedBatch& data, const TrainConfig& cfg);

std::string curve_csv(const std::vector<CurvePoint>& curve);

/// FLW1: magic, K, channels, cond_dim, frames, hidden (u32), then parameters as f32.
std::vector<std::uint8_t> encode_flow(const FlowModel& model);
FlowModel decode_flow(std::span<const std::uint8_t> bytes);
void write_flow(const FlowModel& model, const std::filesystem::path& path);
FlowModel read_flow(const std::filesystem::path& path);

}  // namespace oversmooth::flow
